#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

namespace symdyn {

/// One-block factor map between subshifts.
class FactorMap {
 public:
  /// Checks that symbol images are admissible and that every codomain word of
  /// length <= verify_length has a preimage.
  FactorMap(Subshift domain, Subshift codomain, std::vector<Symbol> symbol_map,
            std::size_t verify_length = 8);

  const Subshift& domain() const noexcept { return domain_; }
  const Subshift& codomain() const noexcept { return codomain_; }
  Symbol image(Symbol x) const noexcept { return symbol_map_[static_cast<std::size_t>(x)]; }
  const std::vector<Symbol>& symbol_map() const noexcept { return symbol_map_; }
  Word image(WordView w) const;
  /// Domain symbols over `y`, ascending.
  const std::vector<Symbol>& fiber(Symbol y) const { return fibers_[static_cast<std::size_t>(y)]; }

  std::vector<Word> preimage_cylinders(WordView y) const;
  std::uint64_t preimage_count(WordView y) const;
  double log_count(WordView y) const { return std::log(static_cast<double>(preimage_count(y))); }

 private:
  struct Cache;
  Subshift domain_;
  Subshift codomain_;
  std::vector<Symbol> symbol_map_;
  std::vector<std::vector<Symbol>> fibers_;
  std::shared_ptr<Cache> cache_;
};

struct ConditionAReport {
  bool holds_up_to_n_max = false;
  double best_D = 0.0;
  std::size_t n_max = 0;
  /// per_length_D[L] = min ratio over words of length L (entries 0 and 1 unused).
  std::vector<double> per_length_D;
  /// per_length_D[n_max] / per_length_D[ceil(n_max/2)] (1 when too short to tell).
  double decay_ratio = 1.0;
  bool trend_decaying = false;
  Word witness;
  std::size_t witness_split = 0;
};

ConditionAReport check_condition_A(const FactorMap& map, std::size_t n_max);

}  // namespace symdyn
