#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace symdyn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Pairwise (tree) summation; fixed reduction order keeps results bit-stable.
double pairwise_sum(std::span<const double> values) noexcept;

/// log Σ exp(v_i) with max-shift and pairwise summation. Empty input gives -inf.
double log_sum_exp(std::span<const double> log_values) noexcept;

inline double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace symdyn
