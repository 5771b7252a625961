#include "symdyn/numeric.hpp"

#include <algorithm>

namespace symdyn {

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_sum_exp(std::span<const double> log_values) noexcept {
  if (log_values.empty()) return kNegInf;
  const double peak = *std::max_element(log_values.begin(), log_values.end());
  if (peak == kNegInf || !std::isfinite(peak)) return peak;
  std::vector<double> shifted(log_values.size());
  std::transform(log_values.begin(), log_values.end(), shifted.begin(),
                 [peak](double v) { return std::exp(v - peak); });
  return peak + std::log(pairwise_sum(shifted));
}

}  // namespace symdyn
