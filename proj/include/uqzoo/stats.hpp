#pragma once

#include <cstddef>
#include <span>

namespace uqzoo::stats {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
/// Modified Lentz continued fraction, evaluated on whichever side of the
/// symmetry point (a + 1) / (a + b + 2) converges fast.
double regularized_incomplete_beta(double a, double b, double x);

/// Pearson product-moment correlation, clamped to [-1, 1].
/// Throws Error(DegenerateInput) when lengths differ, n < 3, or either
/// sequence is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Two-tailed p-value of a Pearson r over n pairs, from Student's t with
/// n - 2 degrees of freedom: p = I_{df/(df+t^2)}(df/2, 1/2).
/// Throws Error(DegenerateInput) when |r| > 1 or n < 3.
double p_value(double r, std::size_t n);

}  // namespace uqzoo::stats
