#include "uqzoo/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "uqzoo/score.hpp"

namespace uqzoo {

std::string_view to_string(Orientation orientation) noexcept {
  return orientation == Orientation::confidence ? "confidence" : "uncertainty";
}

double entropy(std::span<const double> probs) noexcept {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  if (probs.empty()) return 0.0;
  return std::clamp(h, 0.0, std::log(static_cast<double>(probs.size())));
}

// Accumulating offsets from the first value keeps the mean of equal values
// exact, so spread metrics on identical samples come out as exactly 0.
double mean(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  const double pivot = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - pivot;
  return pivot + sum / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) noexcept {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size());
}

std::vector<double> mean_rows(std::span<const std::span<const double>> rows) {
  if (rows.empty()) return {};
  const auto pivot = rows.front();
  std::vector<double> out(pivot.size(), 0.0);
  for (const auto row : rows) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += row[i] - pivot[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pivot[i] + out[i] / static_cast<double>(rows.size());
  return out;
}

}  // namespace uqzoo
