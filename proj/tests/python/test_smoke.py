import math

import pytest

import streamks as sk


def test_uniform_model_basics():
    u = sk.Model.uniform_unit()
    assert u.kind == "uniform-unit"
    assert u.cdf(0.25) == pytest.approx(0.25)
    assert u.quantile(0.75) == pytest.approx(0.75)


def test_wedge_distance_is_exact():
    u = sk.Model.uniform_unit()
    w = sk.wedge_perturb(u, 0.1, 0.5)
    assert sk.exact_kdistance(w, u) == pytest.approx(0.1, abs=1e-12)


def test_required_samples_matches_level_formulas():
    cfg = sk.TesterConfig(eps=0.1, delta=0.1, c=4)
    req = sk.required_samples(cfg)
    assert req["rounds"] == 1
    per_level = [sk.level_params(cfg, j)["samples"] for j in range(1, sk.level_count(0.1) + 1)]
    assert req["per_round"] == max(per_level)
    assert sk.memory_report(cfg) == 3050


def test_amplified_test_on_list():
    cfg = sk.TesterConfig(eps=0.1, delta=0.1, c=4)
    u = sk.Model.uniform_unit()
    need = sk.required_samples(cfg)["total"]
    w = sk.wedge_perturb(u, 0.2, 0.5)
    out = sk.amplified_test(cfg, u, w.sample(need, seed=3))
    assert out["decision"] == "reject"
    assert out["samples_consumed"] == need
    assert out["witness"]["j"] >= 1


def test_short_stream_raises():
    cfg = sk.TesterConfig(eps=0.1, c=4)
    with pytest.raises(sk.InsufficientSamples):
        sk.amplified_test(cfg, sk.Model.uniform_unit(), [0.5] * 10)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        sk.TesterConfig(eps=0.0)
    with pytest.raises(ValueError):
        sk.TesterConfig(eps=0.1, mode="fast")


def test_ks_and_dkw():
    assert sk.dkw_threshold(1000, 0.1) == pytest.approx(math.sqrt(math.log(20) / 2000))
    res = sk.ks_test([0.1, 0.2, 0.3, 0.4], sk.Model.uniform_unit(), 0.1)
    assert res["statistic"] == pytest.approx(0.6)


def test_dyadic_and_witness():
    num, parts = sk.dyadic_decompose(0.625, 3)
    assert num == 5
    assert parts == [(1, 1), (5, 3)]
    u = sk.Model.uniform_unit()
    rep = sk.lemma1_witness(sk.wedge_perturb(u, 0.1, 0.37), u, 0.1)
    assert rep["satisfied"]


def test_chernoff_dominates_exact_tail():
    b = sk.chernoff_bounds(200, 0.3, 0.1)
    assert b["upper"] >= sk.binomial_tail_exact(200, 0.3, "above", 80)
    with pytest.raises(ValueError):
        sk.chernoff_bounds(200, 0.3, 0.3)


def test_experiment_csv_is_reproducible():
    plan = {"eps": 0.1, "c": 4, "alt_models": ["wedge:0.1"], "trials": 3, "base_seed": 5}
    a = sk.run_experiment(plan)
    assert a == sk.run_experiment(plan)
    lines = a.strip().splitlines()
    assert lines[0] == "trial,hypothesis,distance,decision,samples,peak_words,ms"
    assert len(lines) == 1 + 6 + 2
