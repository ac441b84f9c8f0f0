#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "streamks/errors.hpp"
#include "streamks/harness.hpp"
#include "streamks/model_json.hpp"
#include "streamks/oracle.hpp"
#include "streamks/reference.hpp"
#include "streamks/rng.hpp"
#include "streamks/sketch.hpp"
#include "streamks/stream.hpp"

namespace py = pybind11;
using namespace streamks;

namespace {

Mode parse_mode(const std::string& s) {
  if (s == "theory") return Mode::kTheory;
  if (s == "practical") return Mode::kPractical;
  throw DomainError("mode must be 'theory' or 'practical'");
}

TailKind parse_tail(const std::string& s) {
  if (s == "above") return TailKind::kAbove;
  if (s == "below") return TailKind::kBelow;
  if (s == "abs") return TailKind::kAbsDeviation;
  throw DomainError("tail must be 'above', 'below' or 'abs'");
}

py::object witness_dict(const std::optional<Witness>& w) {
  if (!w) return py::none();
  py::dict d;
  d["i"] = w->i;
  d["j"] = w->j;
  d["observed_frequency"] = w->observed_frequency;
  d["threshold"] = w->threshold;
  return d;
}

std::vector<Value> lift_all(const Model& model, const std::vector<double>& xs, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<Value> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(model.lift(x, rng));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming identity testing in Kolmogorov distance";

  static py::exception<DomainError> domain_exc(m, "DomainError", PyExc_ValueError);
  static py::exception<StateError> state_exc(m, "StateError", PyExc_RuntimeError);
  static py::exception<UnsupportedModel> unsupported_exc(m, "UnsupportedModel", PyExc_ValueError);
  static py::exception<ParseError> parse_exc(m, "ParseError", PyExc_ValueError);
  static py::exception<IoError> io_exc(m, "IoError", PyExc_OSError);
  static py::exception<InsufficientSamples> short_exc(m, "InsufficientSamples", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::set_error(domain_exc, e.what());
    } catch (const StateError& e) {
      py::set_error(state_exc, e.what());
    } catch (const UnsupportedModel& e) {
      py::set_error(unsupported_exc, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse_exc, e.what());
    } catch (const IoError& e) {
      py::set_error(io_exc, e.what());
    } catch (const InsufficientSamples& e) {
      py::set_error(short_exc, e.what());
    }
  });

  py::class_<Model>(m, "Model")
      .def_static("uniform_unit", &Model::uniform_unit)
      .def_static("piecewise_linear",
                  [](const std::vector<std::pair<double, double>>& knots) {
                    std::vector<Knot> k;
                    for (auto [x, c] : knots) k.push_back({x, c});
                    return Model::piecewise_linear(std::move(k));
                  },
                  py::arg("knots"))
      .def_static("discrete",
                  [](const std::vector<std::pair<double, double>>& atoms) {
                    std::vector<Atom> a;
                    for (auto [v, w] : atoms) a.push_back({v, w});
                    return Model::discrete_lifted(std::move(a));
                  },
                  py::arg("atoms"))
      .def_static("from_spec", &parse_model_spec, py::arg("spec"))
      .def_static("from_json", [](const std::string& s) { return model_from_json(nlohmann::json::parse(s)); })
      .def("to_json", [](const Model& self) { return model_to_json(self).dump(); })
      .def_property_readonly("kind", [](const Model& self) { return std::string(to_string(self.kind())); })
      .def("cdf", [](const Model& self, double x, double residual) { return self.cdf(Value(x, residual)); },
           py::arg("x"), py::arg("residual") = 0.0)
      .def("cdf_left", &Model::cdf_left, py::arg("b"))
      .def("quantile", [](const Model& self, double x) { return self.quantile(x).base; }, py::arg("x"))
      .def("sample",
           [](const Model& self, std::size_t n, std::uint64_t seed) {
             Rng rng = make_rng(seed);
             std::vector<double> out;
             out.reserve(n);
             for (std::size_t k = 0; k < n; ++k) out.push_back(self.sample(rng).base);
             return out;
           },
           py::arg("n"), py::arg("seed") = 0)
      .def("__repr__", [](const Model& self) { return "Model(" + model_to_json(self).dump() + ")"; });

  m.def("wedge_perturb", &wedge_perturb, py::arg("base"), py::arg("eps"), py::arg("center") = 0.5);
  m.def("exact_kdistance", &exact_kdistance, py::arg("a"), py::arg("b"));

  py::class_<TesterConfig>(m, "TesterConfig")
      .def(py::init([](double eps, double delta, std::optional<double> c, const std::string& mode, bool early_exit) {
             TesterConfig cfg;
             cfg.eps = eps;
             cfg.delta = delta;
             cfg.c = c;
             cfg.mode = parse_mode(mode);
             cfg.early_exit = early_exit;
             cfg.validate();
             return cfg;
           }),
           py::arg("eps"), py::arg("delta") = 0.1, py::arg("c") = py::none(), py::arg("mode") = "practical",
           py::arg("early_exit") = false)
      .def_readonly("eps", &TesterConfig::eps)
      .def_readonly("delta", &TesterConfig::delta)
      .def_readonly("early_exit", &TesterConfig::early_exit)
      .def_property_readonly("c", &TesterConfig::chernoff_c)
      .def_property_readonly("mode",
                             [](const TesterConfig& c) { return c.mode == Mode::kTheory ? "theory" : "practical"; });

  m.def("level_count", &level_count, py::arg("eps"));
  m.def("level_params", [](const TesterConfig& cfg, int j) {
    const LevelParams p = level_params(cfg, j);
    py::dict d;
    d["j"] = p.j;
    d["delta_j"] = p.delta_j;
    d["t_j"] = p.t_j;
    d["batch_size"] = p.batch_size;
    d["bucket_count"] = p.bucket_count;
    d["batch_count"] = p.batch_count();
    d["samples"] = p.samples();
    return d;
  }, py::arg("config"), py::arg("j"));
  m.def("required_samples", [](const TesterConfig& cfg) {
    const SampleRequirement r = required_samples(cfg);
    py::dict d;
    d["per_level"] = r.per_level;
    d["per_round"] = r.per_round;
    d["rounds"] = r.rounds;
    d["total"] = r.total;
    return d;
  }, py::arg("config"));
  m.def("memory_report", &memory_report, py::arg("config"));

  m.def("amplified_test",
        [](const TesterConfig& cfg, const Model& model, const std::vector<double>& samples, std::uint64_t seed) {
          const std::vector<Value> lifted = lift_all(model, samples, seed);
          SpanSource src(lifted);
          const AmplifiedResult r = amplified_test(cfg, model, src);
          py::dict d;
          d["decision"] = r.verdict.rejected() ? "reject" : "accept";
          d["witness"] = witness_dict(r.verdict.witness);
          d["rounds"] = r.rounds;
          d["reject_votes"] = r.reject_votes;
          d["samples_consumed"] = r.samples_consumed;
          d["peak_live_words"] = r.peak_live_words;
          return d;
        },
        py::arg("config"), py::arg("model"), py::arg("samples"), py::arg("seed") = 0);

  m.def("run_trial",
        [](const TesterConfig& cfg, const Model& reference, const Model& sampled, std::uint64_t seed) {
          const TrialReport r = run_trial(cfg, reference, sampled, seed);
          py::dict d;
          d["decision"] = r.verdict.rejected() ? "reject" : "accept";
          d["witness"] = witness_dict(r.verdict.witness);
          d["distance"] = r.distance;
          d["samples_consumed"] = r.samples_consumed;
          d["peak_live_words"] = r.peak_live_words;
          return d;
        },
        py::arg("config"), py::arg("reference"), py::arg("sampled"), py::arg("seed") = 0);

  m.def("ks_statistic",
        [](const std::vector<double>& samples, const Model& model, std::uint64_t seed) {
          std::vector<Value> v = lift_all(model, samples, seed);
          std::sort(v.begin(), v.end(), [](const Value& a, const Value& b) { return a < b; });
          return ks_statistic(v, model);
        },
        py::arg("samples"), py::arg("model"), py::arg("seed") = 0);
  m.def("dkw_threshold", &dkw_threshold, py::arg("n"), py::arg("delta"));
  m.def("ks_test",
        [](const std::vector<double>& samples, const Model& model, double delta, std::uint64_t seed) {
          const KsTestResult r = ks_test(lift_all(model, samples, seed), model, delta);
          py::dict d;
          d["statistic"] = r.statistic;
          d["threshold"] = r.threshold;
          d["decision"] = r.reject ? "reject" : "accept";
          return d;
        },
        py::arg("samples"), py::arg("model"), py::arg("delta"), py::arg("seed") = 0);

  m.def("dyadic_decompose", [](double x, int levels) {
    const DyadicDecomposition d = dyadic_decompose(x, levels);
    std::vector<std::pair<std::uint64_t, int>> parts;
    for (const BucketId& b : d.parts) parts.emplace_back(b.i, b.j);
    return py::make_tuple(d.numerator, parts);
  }, py::arg("x"), py::arg("levels"));

  m.def("lemma1_witness", [](const Model& unknown, const Model& reference, double eps) {
    const WitnessReport r = lemma1_witness(unknown, reference, eps);
    py::dict d;
    d["i"] = r.best_bucket.i;
    d["j"] = r.best_bucket.j;
    d["gap"] = r.gap;
    d["threshold"] = r.threshold;
    d["satisfied"] = r.satisfied;
    return d;
  }, py::arg("unknown"), py::arg("reference"), py::arg("eps"));

  m.def("binomial_tail_exact",
        [](std::uint64_t n, double p, const std::string& tail, double threshold) {
          return binomial_tail_exact(n, p, parse_tail(tail), threshold);
        },
        py::arg("n"), py::arg("p"), py::arg("tail"), py::arg("threshold"));
  m.def("chernoff_bounds", [](std::uint64_t n, double p, double d) {
    const ChernoffBounds b = chernoff_bounds(n, p, d);
    py::dict out;
    out["upper"] = b.upper;
    out["lower"] = b.lower;
    out["two_sided"] = b.two_sided;
    return out;
  }, py::arg("n"), py::arg("p"), py::arg("d"));

  m.def("run_experiment_json",
        [](const std::string& plan_json, bool with_timing) {
          const ExperimentPlan plan = ExperimentPlan::from_json(nlohmann::json::parse(plan_json));
          py::gil_scoped_release release;
          return experiment_csv(run_experiment(plan), with_timing);
        },
        py::arg("plan_json"), py::arg("with_timing") = false);
}
