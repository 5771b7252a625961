#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symdyn/factor_map.hpp"
#include "symdyn/gibbs.hpp"
#include "symdyn/potential.hpp"
#include "symdyn/pressure.hpp"

namespace symdyn {

/// One asserted relation `lhs <= rhs` (or an equality within tolerance).
struct CheckRecord {
  std::string check;
  std::size_t n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

bool all_pass(const std::vector<CheckRecord>& records);

/// log g_n on B_n(Y) from sup (hi) and inf (lo) envelopes of F, minus n * tilt.
struct ImagePotentialTable {
  std::size_t level = 0;
  Subshift shift;
  std::vector<double> log_g_hi;  // aligned with shift.words(level)
  std::vector<double> log_g_lo;
  double tilt = 0.0;

  double hi(WordView y) const;
  double lo(WordView y) const;
  ImagePotentialTable tilted(double per_step) const;
};

enum class ImageRoute { Auto, Enumerate, ClosedForm };

ImagePotentialTable image_potential(const FactorMap& map, const Potential& F, std::size_t n,
                                    ImageRoute route = ImageRoute::Auto);

/// {log g_n} as a potential on Y: envelope = [log g_lo, log g_hi] of the word prefix.
Potential image_potential_sequence(const FactorMap& map, const Potential& F);

struct PressureEqualityRow {
  std::size_t n = 0;
  double log_G = 0.0;     // log sum over B_n(X) of sup f_n
  double log_N_hi = 0.0;  // log sum over B_n(Y) of g_n (hi)
  double log_N_lo = 0.0;
  double log_M = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  bool sandwich = false;
  bool intersect = false;
};

struct PressureEqualityReport {
  std::vector<PressureEqualityRow> rows;
  std::vector<CheckRecord> checks;
  bool pass = false;
  Word witness;  // widest hi/lo gap when the sandwich fails
};

PressureEqualityReport verify_pressure_equality(const FactorMap& map, const Potential& F, std::size_t n_max);

struct ImageGibbsRow {
  std::size_t n = 0;
  GibbsRatioEnvelope source;  // mu against F
  double min_ratio = 0.0;     // nu / g~ over both envelopes
  double max_ratio = 0.0;
  double C1 = 0.0;
  double M = 1.0;
};

struct ImageGibbsReport {
  std::vector<ImageGibbsRow> rows;
  std::vector<CheckRecord> checks;
  double C1 = 0.0;
  bool pass = false;
};

/// `mu` is a measure on X, `pressure` its pressure P_X(F). Rows cover n_min..n_max.
ImageGibbsReport verify_image_gibbs(const FactorMap& map, const CylinderMeasure& mu, const Potential& F,
                                    double pressure, std::size_t n_max, std::size_t n_min = 1);

struct SubadditivityReport {
  double max_defect = 0.0;  // max of log g_{n+m} - log g_n - log g_m(shifted) - C
  std::vector<CheckRecord> checks;
  bool pass = false;
};

SubadditivityReport check_image_subadditivity(const FactorMap& map, const Potential& F, std::size_t n_max);

struct PushforwardCheck {
  std::size_t n_max = 0;
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  bool exact_route = false;
};

struct PreimageGibbs {
  Potential phi1;
  ConditionAReport condition;
  /// Set when counts factor symbol by symbol and an RPF oracle applies.
  std::optional<HiddenMarkovMeasure> mu1;
  std::optional<CylinderDistribution> mu1_approx;
  std::optional<HiddenMarkovMeasure> nu_psi;
  PushforwardCheck check;
  std::string provenance;
};

PreimageGibbs preimage_gibbs(const FactorMap& map, const Potential& psi, std::size_t n_max,
                             std::size_t n_check = 10);

/// Full shifts: g(i) = log |pi^{-1}{i}|.
Potential compensation_function_full_shift(const FactorMap& map);

struct CompensationCheck {
  std::size_t n = 0;
  double mean_log_count = 0.0;  // (1/n) integral of log count over B_n(Y)
  double integral_g = 0.0;
  double abs_diff = 0.0;
};

CompensationCheck compensation_check(const FactorMap& map, const CylinderMeasure& m, std::size_t n);

struct RatioCriterion {
  std::vector<double> per_n;  // per_n[n], entry 0 unused
  double A_hat = 1.0;
  bool growing = false;
  Word witness;  // x-word attaining the extreme ratio at n_max
};

RatioCriterion equality_criterion_ratio(const FactorMap& map, const Potential& F, std::size_t n_max);

Word psi_selector(const FactorMap& map, WordView y);

struct BowenImage {
  Potential potential;
  RatioCriterion criterion;
  double max_abs_diff = 0.0;  // oracle of the image potential vs pushforward of mu_f
  std::size_t n_check = 0;
};

BowenImage bowen_image_potential(const FactorMap& map, const Potential& f, std::size_t n_max,
                                 std::size_t n_check = 8);

struct KemptonReport {
  std::size_t n_max = 0;
  /// u_tables[t][n] holds u_{w_t,n} on B_{n+1}(Y) in radix order, for n <= stored_level.
  std::vector<std::vector<std::vector<double>>> u_tables;
  std::size_t stored_level = 0;
  std::vector<double> sup_diffs;      // sup_diffs[n], 1 <= n < n_max
  std::vector<double> w_sensitivity;  // w_sensitivity[n], 1 <= n <= n_max
  double min_u = 0.0;
  double max_u_over_bound = 0.0;  // max of u / (M * g1bar(y_1))
  std::size_t bound_violations = 0;
  double geometric_ratio = 0.0;   // (sup_diffs[n_max-1] / sup_diffs[1])^(1/(n_max-2))
  bool sup_diffs_decreasing = false;
};

KemptonReport kempton_u(const FactorMap& map, const Potential& f, const std::vector<Point>& tails,
                        std::size_t n_max, std::size_t stored_level = 8);

struct MultiplicativityReport {
  std::size_t n_max = 0;
  double max_rel_error = 0.0;
  Word witness;
  /// (1/n) integral of log g_n per test measure vs integral of log g_1.
  std::vector<std::pair<double, double>> integrals;
  std::vector<CheckRecord> checks;
  bool pass = false;
};

MultiplicativityReport first_coordinate_multiplicativity_check(
    const FactorMap& map, const Potential& f, std::size_t n_max,
    const std::vector<const CylinderMeasure*>& test_measures = {});

/// max over n <= n_max of |relative pressure term - (1/n) log g_n(prefix)|.
double relative_vs_image_gap(const FactorMap& map, const Potential& F, const Point& y, std::size_t n_max);

}  // namespace symdyn
