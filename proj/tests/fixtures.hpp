#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "symdyn/factor_map.hpp"
#include "symdyn/potential.hpp"
#include "symdyn/subshift.hpp"

namespace fixtures {

using namespace symdyn;

inline Subshift golden_mean() { return build_sft({{1, 1}, {1, 0}}); }

/// Full shift on {a,b,c} collapsed onto full {A,B} by a,b -> A and c -> B.
inline FactorMap f1_map() { return FactorMap(build_full_shift(3), build_full_shift(2), {0, 0, 1}); }

/// Weights 1, 2, 3 on a, b, c.
inline Potential f2_potential(const Subshift& x) {
  return from_single_function(x, 1, std::vector<double>{0.0, std::log(2.0), std::log(3.0)});
}

/// Window-2 function on the full 2-shift: f(00)=0, f(01)=log 2, f(10)=0, f(11)=log 3.
inline Potential w2_potential(const Subshift& full2) {
  return from_single_function(full2, 2, std::vector<double>{0.0, std::log(2.0), 0.0, std::log(3.0)});
}

inline FactorMap collapse_map(const Subshift& x) {
  return FactorMap(x, build_full_shift(1), std::vector<Symbol>(x.alphabet_size(), 0));
}

/// Window-2 function on the full 3-shift, diagonal-heavy so the u-iteration
/// contracts slowly enough to stay above rounding for 20 steps.
inline std::vector<double> w3_values() {
  return {0.75, 0.15, 0.30, 0.10, 0.70, 0.45, 0.40, 0.25, 0.55};
}
inline Potential w3_potential(const Subshift& full3) { return from_single_function(full3, 2, w3_values()); }

/// SFT on {0,1,2} where 0 cannot follow 1; with 0,1 -> A and 2 -> B the
/// preimage count of A^n is n+1, so the concatenation ratio decays.
inline Subshift monotone_switch() { return build_sft({{1, 1, 1}, {0, 1, 1}, {1, 1, 1}}); }
inline FactorMap monotone_switch_map() {
  return FactorMap(monotone_switch(), build_full_shift(2), {0, 0, 1});
}

/// Non-full SFT over {a,b,c} whose count structure is 2 or 1 depending only on
/// the first image symbol.
inline Subshift f3_shift() { return build_sft({{0, 1, 1}, {1, 0, 1}, {1, 0, 1}}); }
inline FactorMap f3_map() { return FactorMap(f3_shift(), build_full_shift(2), {0, 0, 1}); }

/// Brute-force count of words of length n for a 0/1 matrix by scanning all
/// q^n sequences.
inline std::uint64_t brute_count(const std::vector<std::vector<int>>& t, std::size_t n) {
  const std::size_t q = t.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= q;
  std::uint64_t good = 0;
  std::vector<std::size_t> digits(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (std::size_t i = n; i-- > 0;) {
      digits[i] = c % q;
      c /= q;
    }
    bool ok = true;
    for (std::size_t i = 0; i + 1 < n && ok; ++i) ok = t[digits[i]][digits[i + 1]] == 1;
    good += ok ? 1 : 0;
  }
  return good;
}

}  // namespace fixtures
