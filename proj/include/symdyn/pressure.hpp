#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symdyn/factor_map.hpp"
#include "symdyn/potential.hpp"

namespace symdyn {

/// log S_n, with S_n the sum over B_n of exp(sup log f_n).
double log_partition(const Potential& p, std::size_t n);
/// Same sum with the inf envelope.
double log_partition_lo(const Potential& p, std::size_t n);

/// (1/n) log S_n.
double pressure_estimate(const Potential& p, std::size_t n);

struct BracketOptions {
  std::optional<double> C;
  std::optional<double> M;
  std::optional<std::size_t> gap;
  std::size_t max_gap = 8;
};

struct PressureBracket {
  std::size_t n = 0;
  double lo = 0.0;
  double hi = 0.0;
  double s_n_log = 0.0;
  /// False when no specification gap was found; `lo` is then -inf.
  bool has_lower = false;
  double C = 0.0;
  double M = 1.0;
  std::optional<std::size_t> gap;
  double log_c_lower = 0.0;
  ConstantSource C_source = ConstantSource::Estimated;
  ConstantSource M_source = ConstantSource::Estimated;

  bool contains(double v, double tol = 1e-12) const { return v >= lo - tol && v <= hi + tol; }
};

PressureBracket pressure_bracket(const Potential& p, std::size_t n, const BracketOptions& opts = {});

/// Domain words w of length n whose cylinder meets the fiber over `y`, in
/// lexicographic order.
std::vector<Word> fiber_cylinders(const FactorMap& map, const Point& y, std::size_t n);

double relative_pressure_estimate(const FactorMap& map, const Potential& p, const Point& y, std::size_t n);

struct RelativePressureSeries {
  std::vector<double> terms;        // terms[n-1]
  std::vector<double> running_max;  // running_max[n-1]
  double last = 0.0;
  double max = 0.0;
};

RelativePressureSeries relative_pressure_series(const FactorMap& map, const Potential& p, const Point& y,
                                                std::size_t n_max);

struct MarkovParams {
  std::size_t order = 0;
  /// Chain states are the words of length `order` (a single empty state at order 0).
  WordList states;
  /// transition(s, a): probability of emitting symbol a from state s.
  Eigen::MatrixXd transition;
  Eigen::VectorXd stationary;
};

struct MarkovBound {
  double value = 0.0;
  double entropy = 0.0;
  double energy = 0.0;
  MarkovParams params;
  std::size_t best_restart = 0;
};

/// Entropy plus energy of the best order-k Markov measure found by damped soft
/// value iteration from seeded random starts.
MarkovBound markov_lower_bound(const Potential& p, std::size_t order, std::size_t steps,
                               std::uint64_t seed = 1, std::size_t restarts = 4);

}  // namespace symdyn
