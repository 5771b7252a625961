#include <doctest.h>

#include "fixtures.hpp"
#include "symdyn/error.hpp"

using namespace symdyn;

namespace {

// Brute force: scan every domain word of the length and filter by image.
std::vector<Word> brute_preimages(const FactorMap& map, const Word& y) {
  std::vector<Word> out;
  const WordList& xs = map.domain().words(y.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (map.image(xs[i]) == y) out.emplace_back(xs[i].begin(), xs[i].end());
  return out;
}

std::vector<FactorMap> all_maps() {
  return {fixtures::f1_map(), fixtures::collapse_map(fixtures::golden_mean()), fixtures::monotone_switch_map(),
          fixtures::f3_map(), fixtures::collapse_map(build_full_shift(2))};
}

}  // namespace

TEST_CASE("preimage cylinders on the collapse fixture") {
  const FactorMap f1 = fixtures::f1_map();
  CHECK(f1.preimage_cylinders(Word{0, 1}) == std::vector<Word>{{0, 2}, {1, 2}});
  CHECK(f1.preimage_cylinders(Word{1, 1}) == std::vector<Word>{{2, 2}});
  CHECK(f1.preimage_count(Word{0, 0, 1}) == 4);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(f1.preimage_count(Word(n, 1)) == 1);
  const FactorMap gc = fixtures::collapse_map(fixtures::golden_mean());
  CHECK(gc.preimage_cylinders(Word{0, 0, 0}).size() == 5);
  CHECK(gc.preimage_cylinders(Word{0, 0, 0}) == fixtures::golden_mean().words(3).to_vector());
}

TEST_CASE("invalid inputs") {
  const FactorMap f1 = fixtures::f1_map();
  try {
    f1.preimage_cylinders(Word{0, 2});
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  // Not onto: both symbols land on A.
  CHECK_THROWS_AS(FactorMap(build_full_shift(2), build_full_shift(2), {0, 0}), Error);
  // Image word BB is forbidden in the golden mean codomain.
  CHECK_THROWS_AS(FactorMap(build_full_shift(2), fixtures::golden_mean(), {0, 1}), Error);
}

TEST_CASE("counts match enumeration and partition the domain language") {
  for (const FactorMap& map : all_maps()) {
    for (std::size_t n = 1; n <= 7; ++n) {
      const WordList& ys = map.codomain().words(n);
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < ys.size(); ++i) {
        const Word y(ys[i].begin(), ys[i].end());
        const auto brute = brute_preimages(map, y);
        CHECK(map.preimage_cylinders(y) == brute);
        CHECK(map.preimage_count(y) == brute.size());
        total += map.preimage_count(y);
      }
      CHECK(total == map.domain().count(n));
    }
  }
}

TEST_CASE("full-shift counts are products of fiber sizes") {
  const FactorMap f1 = fixtures::f1_map();
  for (std::size_t n = 1; n <= 10; ++n) {
    const WordList& ys = f1.codomain().words(n);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      std::uint64_t expect = 1;
      for (Symbol s : ys[i]) expect *= s == 0 ? 2 : 1;
      CHECK(f1.preimage_count(ys[i]) == expect);
    }
  }
}

TEST_CASE("counts are submultiplicative") {
  for (const FactorMap& map : all_maps()) {
    for (std::size_t len = 2; len <= 12; ++len) {
      const WordList& ys = map.codomain().words(len);
      for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t s = 1; s < len; ++s)
          CHECK(map.preimage_count(ys[i]) <=
                map.preimage_count(ys[i].first(s)) * map.preimage_count(ys[i].subspan(s)));
    }
  }
}

TEST_CASE("condition A") {
  const auto f1 = check_condition_A(fixtures::f1_map(), 8);
  CHECK(f1.holds_up_to_n_max);
  CHECK(f1.best_D == doctest::Approx(1.0).epsilon(1e-15));

  const auto gm = check_condition_A(fixtures::collapse_map(fixtures::golden_mean()), 8);
  // Oracle: min over n+m <= 8 of |B_{n+m}| / (|B_n| |B_m|) with Fibonacci counts.
  std::vector<double> fib{0, 2, 3};
  for (int i = 3; i <= 8; ++i) fib.push_back(fib[i - 1] + fib[i - 2]);
  double expect = 1.0;
  for (int n = 1; n < 8; ++n)
    for (int m = 1; n + m <= 8; ++m) expect = std::min(expect, fib[n + m] / (fib[n] * fib[m]));
  CHECK(gm.best_D == doctest::Approx(expect).epsilon(1e-14));
  CHECK_FALSE(gm.trend_decaying);

  const auto f3 = check_condition_A(fixtures::f3_map(), 10);
  CHECK(f3.best_D == doctest::Approx(0.5));
  CHECK_FALSE(f3.trend_decaying);

  // count(A^n) = n + 1 drives the ratio down like 4/L.
  const auto sw8 = check_condition_A(fixtures::monotone_switch_map(), 8);
  const auto sw12 = check_condition_A(fixtures::monotone_switch_map(), 12);
  CHECK(sw8.holds_up_to_n_max);
  CHECK(sw12.best_D < sw8.best_D);
  CHECK(sw12.best_D == doctest::Approx(13.0 / 49.0));
  CHECK(sw12.trend_decaying);
  CHECK(fixtures::monotone_switch_map().preimage_count(Word(9, 0)) == 10);
}
