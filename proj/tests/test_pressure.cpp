#include <doctest.h>

#include <cmath>
#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "symdyn/error.hpp"
#include "symdyn/gibbs.hpp"
#include "symdyn/pressure.hpp"

using namespace symdyn;

namespace {

const double kGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

// Oracle: spectral radius of exp(f_i) T_ij from a dense eigensolver.
double spectral_log_radius(const Potential& p) {
  const auto& t = p.shift().transition_matrix();
  const std::size_t q = t.size();
  Eigen::MatrixXd l(q, q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) l(i, j) = std::exp(p.window_table()->log_values[i]) * t[i][j];
  Eigen::EigenSolver<Eigen::MatrixXd> es(l);
  double r = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
  return std::log(r);
}

// Oracle: log of the brute sum over all words of exp(sup).
double brute_log_sum(const Potential& p, std::size_t n) {
  const WordList& ws = p.shift().words(n);
  double s = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) s += std::exp(p.envelope(ws[i]).hi);
  return std::log(s);
}

}  // namespace

TEST_CASE("pressure estimates") {
  const auto x3 = build_full_shift(3);
  const Potential f2 = fixtures::f2_potential(x3);
  for (std::size_t n = 1; n <= 6; ++n) {
    CHECK(pressure_estimate(f2, n) == doctest::Approx(std::log(6.0)).epsilon(1e-13));
    CHECK(log_partition(f2, n) == doctest::Approx(brute_log_sum(f2, n)).epsilon(1e-13));
  }
  CHECK(std::abs(pressure_estimate(zero_potential(fixtures::golden_mean()), 12) - kGolden) < 0.05);
  for (std::size_t n = 1; n <= 5; ++n)
    CHECK(pressure_estimate(zero_potential(build_full_shift(4)), n) == doctest::Approx(std::log(4.0)));
  CHECK_THROWS_AS(pressure_estimate(f2, 0), Error);
}

TEST_CASE("pressure brackets") {
  const auto x3 = build_full_shift(3);
  const auto b = pressure_bracket(fixtures::f2_potential(x3), 5);
  CHECK(b.lo == doctest::Approx(std::log(6.0)));
  CHECK(b.hi == doctest::Approx(std::log(6.0)));

  const Potential z = zero_potential(fixtures::golden_mean());
  const auto g = pressure_bracket(z, 16);
  CHECK(g.has_lower);
  CHECK(g.gap == std::optional<std::size_t>(1));
  CHECK(g.lo <= kGolden);
  CHECK(g.hi >= kGolden);
  CHECK(g.hi - g.lo <= 0.06);

  const auto full2 = build_full_shift(2);
  const Potential w2 = fixtures::w2_potential(full2);
  const auto b12 = pressure_bracket(w2, 12), b14 = pressure_bracket(w2, 14);
  CHECK(std::max(b12.lo, b14.lo) <= std::min(b12.hi, b14.hi));

  // Window-1 on a mixing SFT: the oracle sits inside every bracket.
  const Potential gw = from_single_function(fixtures::golden_mean(), 1, std::vector<double>{0.3, -0.4});
  const double oracle = spectral_log_radius(gw);
  for (std::size_t n = 1; n <= 14; ++n) {
    const auto br = pressure_bracket(gw, n);
    CHECK(br.lo <= oracle + 1e-12);
    CHECK(br.hi >= oracle - 1e-12);
  }
  // Subadditivity of log(e^C S_n) along divisibility chains.
  for (std::size_t n : {1, 2, 4, 8}) CHECK(pressure_bracket(gw, 2 * n).hi <= pressure_bracket(gw, n).hi + 1e-12);

  const auto none = pressure_bracket(zero_potential(build_sft({{1, 0}, {0, 1}})), 6);
  CHECK_FALSE(none.has_lower);
  CHECK(none.hi == doctest::Approx(std::log(2.0) / 6.0));
}

TEST_CASE("relative pressure") {
  const FactorMap f1 = fixtures::f1_map();
  const Potential one = zero_potential(f1.domain());
  const Point a_inf{{}, {0}}, b_inf{{}, {1}};
  for (std::size_t n = 1; n <= 8; ++n) {
    CHECK(relative_pressure_estimate(f1, one, a_inf, n) == doctest::Approx(std::log(2.0)));
    CHECK(relative_pressure_estimate(f1, one, b_inf, n) == doctest::Approx(0.0));
    CHECK(relative_pressure_estimate(f1, fixtures::f2_potential(f1.domain()), a_inf, n) ==
          doctest::Approx(std::log(3.0)));
  }
  // Fiber sums are sub-sums of the full sum.
  const std::vector<FactorMap> maps{f1, fixtures::f3_map(), fixtures::monotone_switch_map(),
                                    fixtures::collapse_map(fixtures::golden_mean())};
  for (const FactorMap& m : maps) {
    const Potential p = zero_potential(m.domain());
    const std::vector<Point> ys{{{}, {0}}, {{0}, {0, 0}}, {{}, {0}}};
    for (std::size_t n = 1; n <= 8; ++n) {
      const Point y = m.codomain().canonical_point(Word{0});
      CHECK(relative_pressure_estimate(m, p, y, n) <= pressure_estimate(p, n) + 1e-12);
    }
  }
  // Over the switch: after 1 the fiber over A^inf cannot return to 0.
  const FactorMap sw = fixtures::monotone_switch_map();
  CHECK(fiber_cylinders(sw, Point{{}, {0}}, 3).size() == 4);
  // Partition identity at window 1 on a full domain.
  const Potential f2 = fixtures::f2_potential(f1.domain());
  for (std::size_t n = 1; n <= 6; ++n) {
    const WordList& ys = f1.codomain().words(n);
    double total = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i)
      total += std::exp(static_cast<double>(n) *
                        relative_pressure_estimate(f1, f2, f1.codomain().canonical_point(ys[i]), n));
    CHECK(std::log(total) == doctest::Approx(log_partition(f2, n)).epsilon(1e-12));
  }
  // f3 fiber over (AB)^inf: a and b alternate so only words ending before c survive.
  const FactorMap f3 = fixtures::f3_map();
  const auto cyl = fiber_cylinders(f3, Point{{}, {0, 1}}, 4);
  for (const Word& w : cyl) CHECK(f3.image(w) == Word{0, 1, 0, 1});
  const auto series = relative_pressure_series(f1, one, a_inf, 5);
  CHECK(series.terms.size() == 5);
  CHECK(series.max == doctest::Approx(std::log(2.0)));
}

TEST_CASE("markov lower bounds") {
  const auto x3 = build_full_shift(3);
  const MarkovBound b0 = markov_lower_bound(fixtures::f2_potential(x3), 0, 200);
  CHECK(b0.value == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(b0.params.transition(0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(b0.params.transition(0, 2) == doctest::Approx(0.5));
  const MarkovBound full2 = markov_lower_bound(zero_potential(build_full_shift(2)), 0, 50);
  CHECK(full2.value == doctest::Approx(std::log(2.0)));
  CHECK(full2.params.transition(0, 1) == doctest::Approx(0.5));

  const MarkovBound gm = markov_lower_bound(zero_potential(fixtures::golden_mean()), 1, 2000);
  CHECK(gm.value == doctest::Approx(kGolden).epsilon(1e-10));
  // Parry measure: transition 0 -> 0 is 1/phi.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(gm.params.transition(0, 0) == doctest::Approx(1.0 / phi).epsilon(1e-9));
  CHECK(gm.params.stationary(0) == doctest::Approx(phi * phi / (1 + phi * phi)).epsilon(1e-9));

  const auto full2s = build_full_shift(2);
  const MarkovBound w2 = markov_lower_bound(fixtures::w2_potential(full2s), 1, 2000);
  CHECK(w2.value <= pressure_bracket(fixtures::w2_potential(full2s), 12).hi);
  CHECK_THROWS_AS(markov_lower_bound(fixtures::w2_potential(full2s), 0, 10), Error);
  CHECK_THROWS_AS(markov_lower_bound(zero_potential(fixtures::golden_mean()), 0, 10), Error);
  CHECK_THROWS_AS(markov_lower_bound(tilt(zero_potential(x3), 1.0), 1, 10), Error);
}
