#pragma once

#include <span>
#include <vector>

// Small kernels shared by the metric families. Logs are natural.

namespace uqzoo {

/// Shannon entropy -sum p ln p with 0 ln 0 = 0, clamped to [0, ln n].
double entropy(std::span<const double> probs) noexcept;

double mean(std::span<const double> values) noexcept;

/// Divides by n, not n - 1. Zero for fewer than two values.
double population_variance(std::span<const double> values) noexcept;

/// Element-wise mean of equally sized rows.
std::vector<double> mean_rows(std::span<const std::span<const double>> rows);

}  // namespace uqzoo
