#include "streamks/stream.hpp"

#include <charconv>
#include <cmath>

#include "streamks/errors.hpp"

namespace streamks {

std::optional<double> parse_sample_line(const std::string& text, std::size_t line) {
  std::string_view view(text);
  if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
  const auto first = view.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return std::nullopt;
  const auto last = view.find_last_not_of(" \t\r\n");
  view = view.substr(first, last - first + 1);
  if (!view.empty() && view.front() == '+') view.remove_prefix(1);

  double value = 0.0;
  auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
  if (ec != std::errc() || ptr != view.data() + view.size() || !std::isfinite(value)) {
    throw ParseError(line, "expected a decimal number, got \"" + std::string(view) + "\"");
  }
  return value;
}

LineSource::LineSource(std::istream& in, Model model, Rng rng)
    : in_(in), model_(std::move(model)), rng_(std::move(rng)) {}

std::optional<Value> LineSource::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (auto v = parse_sample_line(text, line_)) return model_.lift(*v, rng_);
  }
  return std::nullopt;
}

}  // namespace streamks
