#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symdyn/factor_map.hpp"
#include "symdyn/potential.hpp"

namespace symdyn {

/// Symbol used in patterns for "any symbol at this position".
inline constexpr Symbol kWildcard = -1;

/// Shift-invariant measure evaluated on cylinders.
class CylinderMeasure {
 public:
  virtual ~CylinderMeasure() = default;
  virtual std::size_t alphabet_size() const = 0;
  /// log of the mass of the pattern set; wildcards are allowed.
  virtual double log_pattern_prob(WordView pattern) const = 0;
  double log_prob(WordView w) const { return log_pattern_prob(w); }
  double prob(WordView w) const { return std::exp(log_pattern_prob(w)); }
};

/// Chain whose hidden states emit one symbol each.
class HiddenMarkovMeasure final : public CylinderMeasure {
 public:
  HiddenMarkovMeasure(Eigen::VectorXd initial, Eigen::MatrixXd transition, std::vector<Symbol> emission,
                      std::size_t alphabet_size);

  std::size_t alphabet_size() const override { return alphabet_; }
  double log_pattern_prob(WordView pattern) const override;

  const Eigen::VectorXd& initial() const noexcept { return initial_; }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  const std::vector<Symbol>& emission() const noexcept { return emission_; }

 private:
  Eigen::VectorXd initial_;
  Eigen::MatrixXd transition_;
  std::vector<Symbol> emission_;
  std::size_t alphabet_;
};

/// Stationary first-order chain on the symbols themselves.
class MarkovMeasure final : public CylinderMeasure {
 public:
  MarkovMeasure(Eigen::VectorXd initial, Eigen::MatrixXd transition);

  std::size_t alphabet_size() const override { return static_cast<std::size_t>(initial_.size()); }
  double log_pattern_prob(WordView pattern) const override;

  const Eigen::VectorXd& initial() const noexcept { return initial_; }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  HiddenMarkovMeasure as_hidden() const;
  /// max_i |(initial * transition)_i - initial_i|
  double stationarity_defect() const;

 private:
  Eigen::VectorXd initial_;
  Eigen::MatrixXd transition_;
};

struct CylinderDistribution {
  Subshift shift;
  std::size_t level = 0;
  /// Aligned with shift.words(level).
  std::vector<double> weights;
  std::string provenance;

  double weight(WordView w) const;
  double total() const;
};

/// Weights of a finite-level distribution read as a measure on patterns no
/// longer than its level.
class FiniteLevelMeasure final : public CylinderMeasure {
 public:
  explicit FiniteLevelMeasure(CylinderDistribution dist) : dist_(std::move(dist)) {}
  std::size_t alphabet_size() const override { return dist_.shift.alphabet_size(); }
  double log_pattern_prob(WordView pattern) const override;

 private:
  CylinderDistribution dist_;
};

struct PerronData {
  double eigenvalue = 0.0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;
  std::size_t iterations = 0;
};

/// Dominant eigenpair of a nonnegative primitive matrix by power iteration.
PerronData perron(const Eigen::MatrixXd& m, double tol = 1e-15, std::size_t max_iter = 1000000);

struct RpfOracle {
  double pressure = 0.0;
  MarkovMeasure gibbs;
  PerronData perron;
};

/// Window-1 potential on a primitive full shift or SFT.
RpfOracle rpf_oracle(const Potential& p);

struct BlockOracle {
  double pressure = 0.0;
  HiddenMarkovMeasure gibbs;
  WordList blocks;
};

/// Window-k potential recoded on k-blocks; the measure emits first block symbols.
BlockOracle block_rpf_oracle(const Potential& p);

CylinderDistribution cylinder_distribution(const CylinderMeasure& mu, const Subshift& shift, std::size_t n,
                                           std::string provenance = "measure");

/// Weights proportional to exp(sup log f_n - n * pressure).
CylinderDistribution gibbs_approximant(const Potential& p, std::size_t n, double pressure);

/// Level-m distribution of positions offset..offset+m-1.
CylinderDistribution marginalize(const CylinderDistribution& d, std::size_t m, std::size_t offset = 0);
/// The family of shifted marginals sigma^i(d) at level m, i < count.
std::vector<CylinderDistribution> shifted_marginals(const CylinderDistribution& d, std::size_t m,
                                                    std::size_t count);
CylinderDistribution cesaro_average(const std::vector<CylinderDistribution>& dists);
/// L1 distance between the first and the shifted level-(n-1) marginals.
double invariance_defect(const CylinderDistribution& d);

struct GibbsRatioEnvelope {
  double min_hi = 0.0, max_hi = 0.0;
  double min_lo = 0.0, max_lo = 0.0;
  double min_ratio = 0.0, max_ratio = 0.0;
  /// max(max_ratio, 1/min_ratio); infinite if some admissible word has zero mass.
  double constant() const;
};

GibbsRatioEnvelope gibbs_ratio_envelope(const CylinderDistribution& d, const Potential& p, double pressure);

CylinderDistribution pushforward(const CylinderDistribution& d, const FactorMap& map);
HiddenMarkovMeasure pushforward(const HiddenMarkovMeasure& mu, const FactorMap& map);
HiddenMarkovMeasure pushforward(const MarkovMeasure& mu, const FactorMap& map);

struct MixingReport {
  double min_C_tilde = 0.0;
  std::vector<std::size_t> t_values;
  std::vector<double> ratios;
};

/// Ratios mu([u] and sigma^{-t}[v]) / (mu[u] mu[v]) over t in [t_lo, t_hi].
/// Every t must satisfy t > |u| + 2 * gap.
MixingReport mixing_lower_bound_check(const CylinderMeasure& mu, WordView u, WordView v, std::size_t t_lo,
                                      std::size_t t_hi, std::size_t gap);

}  // namespace symdyn
