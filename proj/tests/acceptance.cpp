// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "symdyn/error.hpp"
#include "symdyn/factor_transfer.hpp"
#include "symdyn/gibbs.hpp"
#include "symdyn/pressure.hpp"

using namespace symdyn;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double product(const std::vector<double>& p, WordView w) {
  double s = 1.0;
  for (Symbol a : w) s *= p[static_cast<std::size_t>(a)];
  return s;
}

MarkovMeasure bernoulli(const std::vector<double>& p) {
  const auto q = static_cast<Eigen::Index>(p.size());
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(p.data(), q);
  return MarkovMeasure(v, v.transpose().replicate(q, 1));
}

void pressure_exactness(Outcome& o, double& budget) {
  budget = 1.0;
  const Potential f2 = fixtures::f2_potential(build_full_shift(3));
  const double closed = std::log(1.0 + 2.0 + 3.0);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) worst = std::max(worst, std::abs(pressure_estimate(f2, n) - closed));
  o.detail << "max |P_n - log 6| over n<=12 = " << worst;
  o.require(worst <= 1e-12, "error above 1e-12");
}

void bracket_soundness(Outcome& o, double& budget) {
  budget = 5.0;
  const Subshift g = fixtures::golden_mean();
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 0;
  const double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0);
  const double perron_log = std::log(perron(a).eigenvalue);
  const PressureBracket b = pressure_bracket(zero_potential(g), 16);
  o.detail << "bracket [" << b.lo << ", " << b.hi << "] width " << b.hi - b.lo << ", oracle " << perron_log;
  o.require(std::abs(perron_log - golden) <= 1e-12, "power-iteration oracle off the closed form");
  o.require(b.has_lower, "no lower bound");
  o.require(b.lo <= perron_log && perron_log <= b.hi, "bracket misses log phi");
  o.require(b.hi - b.lo <= 0.06, "width above 0.06");
}

void sandwich(Outcome& o, double& budget) {
  budget = 60.0;
  const FactorMap f1 = fixtures::f1_map();
  const auto x2 = build_full_shift(2);
  struct Case {
    const char* name;
    FactorMap map;
    Potential F;
  };
  const std::vector<Case> cases{{"F2/F1", f1, fixtures::f2_potential(f1.domain())},
                                {"W2/collapse", fixtures::collapse_map(x2), fixtures::w2_potential(x2)},
                                {"W3/F1", f1, fixtures::w3_potential(f1.domain())}};
  for (const Case& c : cases) {
    const auto rep = verify_pressure_equality(c.map, c.F, 12);
    double worst_gap = 0.0;
    for (const auto& r : rep.rows) {
      const double n = static_cast<double>(r.n);
      // Sandwich N_n/M <= G_n <= M N_n on both envelope variants.
      o.require(r.log_N_hi - r.log_M <= r.log_G + 1e-12 && r.log_G <= r.log_N_lo + r.log_M + 1e-12,
                std::string(c.name) + " sandwich at n=" + std::to_string(r.n));
      const double diff = std::abs(r.log_G - r.log_N_hi) / n;
      o.require(diff <= 2.0 * r.log_M / n + 1e-12, std::string(c.name) + " estimates too far apart");
      worst_gap = std::max(worst_gap, diff);
    }
    o.require(rep.pass, std::string(c.name) + " report");
    o.detail << c.name << " M_hat=" << c.F.M().value << " max|dP|=" << worst_gap << "; ";
  }
}

void image_gibbs(Outcome& o, double& budget) {
  budget = 60.0;
  const FactorMap f1 = fixtures::f1_map();
  const Potential f2 = fixtures::f2_potential(f1.domain());
  const RpfOracle oracle = rpf_oracle(f2);
  const auto exact = verify_image_gibbs(f1, oracle.gibbs, f2, oracle.pressure, 10);
  double worst = 0.0;
  for (const auto& r : exact.rows) worst = std::max({worst, std::abs(r.min_ratio - 1.0), std::abs(r.max_ratio - 1.0)});
  const HiddenMarkovMeasure nu = pushforward(oracle.gibbs, f1);
  double worst_nu = 0.0;
  for (std::size_t n = 1; n <= 10; ++n) {
    const WordList& ys = f1.codomain().words(n);
    for (std::size_t i = 0; i < ys.size(); ++i) worst_nu = std::max(worst_nu, std::abs(nu.prob(ys[i]) - product({0.5, 0.5}, ys[i])));
  }
  o.detail << "F2: max|ratio-1|=" << worst << ", max|nu - Bernoulli(1/2,1/2)|=" << worst_nu;
  o.require(exact.pass, "F2 report");
  o.require(worst <= 1e-10, "F2 ratio not identically 1");
  o.require(worst_nu <= 1e-12, "pushforward differs from Bernoulli(1/2,1/2)");

  const Potential w3 = fixtures::w3_potential(f1.domain());
  const BlockOracle block = block_rpf_oracle(w3);
  const auto win = verify_image_gibbs(f1, block.gibbs, w3, block.pressure, 12, 6);
  const double m = w3.M().value;
  double lo_min = 1e300, lo_max = 0.0, hi_min = 1e300, hi_max = 0.0, spread = 0.0, cert = 0.0;
  for (const auto& r : win.rows) {
    lo_min = std::min(lo_min, r.min_ratio);
    lo_max = std::max(lo_max, r.min_ratio);
    hi_min = std::min(hi_min, r.max_ratio);
    hi_max = std::max(hi_max, r.max_ratio);
    spread = std::max(spread, r.max_ratio / r.min_ratio);
    cert = std::max(cert, r.C1 * r.C1 * m * m);
    o.require(r.max_ratio / r.min_ratio <= r.C1 * r.C1 * m * m, "spread above C1^2 M^2 at n=" + std::to_string(r.n));
  }
  const double var_lo = lo_max / lo_min - 1.0, var_hi = hi_max / hi_min - 1.0;
  o.detail << "; W3 n=6..12: max/min<=" << spread << " (cert " << cert << "), variation " << var_lo << " / " << var_hi;
  o.require(win.pass, "W3 report");
  o.require(var_lo < 0.05 && var_hi < 0.05, "W3 envelope varies by 5% or more");
}

void preimage(Outcome& o, double& budget) {
  budget = 30.0;
  const FactorMap f1 = fixtures::f1_map();
  const Potential psi = from_single_function(f1.codomain(), 1, std::vector<double>{std::log(2.0), std::log(5.0)});
  const PreimageGibbs pg = preimage_gibbs(f1, psi, 8, 10);
  o.require(pg.mu1.has_value(), "no oracle route");
  if (!pg.mu1) return;
  double worst_mu = 0.0, worst_push = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const WordList& xs = f1.domain().words(n);
    for (std::size_t i = 0; i < xs.size(); ++i)
      worst_mu = std::max(worst_mu, std::abs(pg.mu1->prob(xs[i]) - product({1.0 / 7, 1.0 / 7, 5.0 / 7}, xs[i])));
  }
  const HiddenMarkovMeasure pushed = pushforward(*pg.mu1, f1);
  for (std::size_t n = 1; n <= 10; ++n) {
    const WordList& ys = f1.codomain().words(n);
    for (std::size_t i = 0; i < ys.size(); ++i)
      worst_push = std::max(worst_push, std::abs(pushed.prob(ys[i]) - product({2.0 / 7, 5.0 / 7}, ys[i])));
  }
  const ConditionAReport ca = check_condition_A(f1, 12);
  o.detail << "max|mu1 - Bernoulli(1/7,1/7,5/7)|=" << worst_mu << ", max|pi mu1 - Bernoulli(2/7,5/7)|=" << worst_push
           << ", D(F1)=" << ca.best_D;
  o.require(worst_mu <= 1e-10, "mu1 differs from the closed form");
  o.require(worst_push <= 1e-10, "pushforward differs from the Psi-Gibbs measure");
  o.require(pg.check.max_abs_diff <= 1e-10, "module pushforward check");
  o.require(std::abs(ca.best_D - 1.0) <= 1e-15 && ca.holds_up_to_n_max, "Condition A constant for F1 is not 1");

  const std::vector<FactorMap> maps{f1, fixtures::f3_map(), fixtures::monotone_switch_map(),
                                    fixtures::collapse_map(build_full_shift(2)),
                                    FactorMap(build_full_shift(4), build_full_shift(2), {0, 0, 0, 1})};
  std::size_t pairs = 0;
  for (const FactorMap& map : maps)
    for (std::size_t len = 2; len <= 12; ++len) {
      const WordList& ws = map.codomain().words(len);
      for (std::size_t i = 0; i < ws.size(); ++i)
        for (std::size_t s = 1; s < len; ++s) {
          ++pairs;
          const auto whole = map.preimage_count(ws[i]);
          const auto split = map.preimage_count(ws[i].first(s)) * map.preimage_count(ws[i].subspan(s));
          if (whole > split) o.require(false, "count submultiplicativity");
        }
    }
  o.detail << ", submultiplicativity on " << pairs << " splits";
}

void criterion_discrimination(Outcome& o, double& budget) {
  budget = 30.0;
  const FactorMap f1 = fixtures::f1_map();
  const Potential pulled = compose_with_factor(fixtures::w2_potential(f1.codomain()), f1);
  const RatioCriterion fc = equality_criterion_ratio(f1, pulled, 10);
  const double m_hat = estimate_bounded_variation(pulled, 10);
  const RatioCriterion f2 = equality_criterion_ratio(f1, fixtures::f2_potential(f1.domain()), 10);
  const double growth = f2.per_n[10] / f2.per_n[4];
  o.detail << "fiber-constant A_hat=" << fc.A_hat << " M_hat=" << m_hat << (fc.growing ? " growing" : " stable")
           << "; F2 A_10/A_4=" << growth;
  o.require(std::abs(fc.A_hat - m_hat) <= 1e-12 * m_hat, "A_hat differs from M_hat");
  o.require(!fc.growing, "fiber-constant trend grows");
  o.require(growth >= 1.2 && f2.growing, "F2 growth below 1.2x");
}

void section_six(Outcome& o, double& budget) {
  budget = 30.0;
  const FactorMap f1 = fixtures::f1_map();
  const auto mult = first_coordinate_multiplicativity_check(f1, fixtures::f2_potential(f1.domain()), 12);
  const Potential w3 = fixtures::w3_potential(f1.domain());
  const KemptonReport k = kempton_u(f1, w3, {Point{{}, {0}}, Point{{}, {2}}}, 20, 4);
  o.detail << "multiplicativity rel err " << mult.max_rel_error << "; u: ratio " << k.geometric_ratio
           << ", w_sensitivity[20]=" << k.w_sensitivity[20] << ", min u=" << k.min_u
           << ", max u/(M g1)=" << k.max_u_over_bound;
  o.require(mult.pass && mult.max_rel_error <= 1e-12, "multiplicativity");
  o.require(k.sup_diffs_decreasing, "sup_diffs not decreasing");
  o.require(k.geometric_ratio < 0.9, "geometric ratio not below 0.9");
  o.require(k.w_sensitivity[20] <= 1e-8, "w_sensitivity[20] above 1e-8");
  o.require(k.bound_violations == 0, "u bound violated");
}

void relative_identity(Outcome& o, double& budget) {
  budget = 30.0;
  const FactorMap f1 = fixtures::f1_map();
  const FactorMap four(build_full_shift(4), build_full_shift(2), {0, 0, 0, 1});
  const std::vector<Point> ys{Point{{}, {0}}, Point{{}, {1}}, Point{{0, 1}, {1, 0, 0}}, Point{{1, 1, 0}, {0, 1}}};
  double worst = 0.0;
  for (const Point& y : ys) {
    worst = std::max(worst, relative_vs_image_gap(f1, fixtures::f2_potential(f1.domain()), y, 10));
    worst = std::max(worst, relative_vs_image_gap(f1, fixtures::w3_potential(f1.domain()), y, 10));
    worst = std::max(worst, relative_vs_image_gap(four, zero_potential(four.domain()), y, 8));
  }
  o.detail << "max termwise gap " << worst;
  o.require(worst <= 1e-12, "gap above 1e-12");
}

void mixing(Outcome& o, double& budget) {
  budget = 30.0;
  const FactorMap f1 = fixtures::f1_map();
  const HiddenMarkovMeasure nu = pushforward(rpf_oracle(fixtures::f2_potential(f1.domain())).gibbs, f1);
  const std::size_t gap_y = f1.codomain().specification_gap(8).value_or(0);
  double image_min = 1e300;
  for (std::size_t lu = 1; lu <= 4; ++lu)
    for (std::size_t lv = 1; lv <= 4; ++lv) {
      const WordList& us = f1.codomain().words(lu);
      const WordList& vs = f1.codomain().words(lv);
      const std::size_t t_lo = std::max<std::size_t>(3, lu + 2 * gap_y + 1);
      for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j)
          image_min = std::min(image_min, mixing_lower_bound_check(nu, us[i], vs[j], t_lo, 12, gap_y).min_C_tilde);
    }
  const Subshift g = fixtures::golden_mean();
  const MarkovMeasure parry = rpf_oracle(zero_potential(g)).gibbs;
  const std::size_t gap_g = g.specification_gap(8).value_or(0);
  double parry_min = 1e300, dev_first = 0.0, dev_last = 0.0;
  for (std::size_t lu = 1; lu <= 4; ++lu)
    for (std::size_t lv = 1; lv <= 4; ++lv) {
      const WordList& us = g.words(lu);
      const WordList& vs = g.words(lv);
      for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) {
          const std::size_t t_lo = std::max<std::size_t>(3, 4 + 2 * gap_g + 1);
          const MixingReport r = mixing_lower_bound_check(parry, us[i], vs[j], t_lo, 12, gap_g);
          parry_min = std::min(parry_min, r.min_C_tilde);
          dev_first = std::max(dev_first, std::abs(r.ratios.front() - 1.0));
          dev_last = std::max(dev_last, std::abs(r.ratios.back() - 1.0));
        }
    }
  o.detail << "image min ratio " << image_min << " (t runs from max(3, |u|+2p+1) to 12)"
           << "; Parry min " << parry_min << ", max|ratio-1| " << dev_first << " -> " << dev_last;
  o.require(image_min >= 0.99, "image mixing ratio below 0.99");
  o.require(parry_min > 0.0, "Parry ratio not positive");
  o.require(dev_last < dev_first && dev_last < 1e-2, "Parry ratios do not approach 1");
}

void variational(Outcome& o, double& budget) {
  budget = 60.0;
  struct Case {
    const char* name;
    Potential p;
    std::size_t order;
    std::optional<double> exact;
  };
  const auto x3 = build_full_shift(3);
  const auto x2 = build_full_shift(2);
  const auto x4 = build_full_shift(4);
  const std::vector<double> v4{0.3, -0.2, 1.1, 0.4};
  double z4 = 0.0;
  for (double v : v4) z4 += std::exp(v);
  const std::vector<Case> cases{
      {"F2", fixtures::f2_potential(x3), 0, std::log(6.0)},
      {"F2/order1", fixtures::f2_potential(x3), 1, std::log(6.0)},
      {"zero-full2", zero_potential(x2), 0, std::log(2.0)},
      {"full4", from_single_function(x4, 1, v4), 0, std::log(z4)},
      {"golden", zero_potential(fixtures::golden_mean()), 1, std::nullopt},
      {"W2", fixtures::w2_potential(x2), 1, std::nullopt},
      {"W3", fixtures::w3_potential(x3), 1, std::nullopt},
      {"F3-zero", zero_potential(fixtures::f3_shift()), 1, std::nullopt},
      {"switch-zero", zero_potential(fixtures::monotone_switch()), 1, std::nullopt}};
  for (const Case& c : cases) {
    const MarkovBound mb = markov_lower_bound(c.p, c.order, 400, 1, 4);
    const PressureBracket b = pressure_bracket(c.p, 12);
    o.require(mb.value <= b.hi + 1e-12, std::string(c.name) + " bound above bracket hi");
    if (c.exact) o.require(std::abs(mb.value - *c.exact) <= 1e-9, std::string(c.name) + " differs from oracle");
    o.detail << c.name << ":" << mb.value << "<=" << b.hi << " ";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&, double&)>>> criteria{
      {"pressure exactness, window-1 full shift", pressure_exactness},
      {"pressure bracket soundness, golden mean", bracket_soundness},
      {"image pressure sandwich", sandwich},
      {"image measure Gibbs ratio", image_gibbs},
      {"preimage Gibbs measure and Condition A", preimage},
      {"ratio criterion discrimination", criterion_discrimination},
      {"first-coordinate multiplicativity and u convergence", section_six},
      {"relative pressure equals averaged image potential", relative_identity},
      {"mixing lower bound", mixing},
      {"Markov lower bound below pressure", variational}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    double budget = 0.0;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o, budget);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget) {
      o.pass = false;
      o.detail << " [runtime above " << budget << " s]";
    }
    all = all && o.pass;
    std::printf("criterion %zu: %s (%.2f s) %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs, criteria[i].first,
                o.detail.str().c_str());
  }
  return all ? 0 : 1;
}
