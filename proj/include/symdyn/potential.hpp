#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "symdyn/factor_map.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

namespace symdyn {

/// Bounds of log f_n over a cylinder.
struct LogEnvelope {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
};

enum class Flavor { Additive, AlmostAdditive, Subadditive, AsymptoticallySubadditive };
enum class ConstantSource { Certified, Estimated, UserSupplied };

const char* to_string(Flavor f) noexcept;
const char* to_string(ConstantSource s) noexcept;

struct Constant {
  double value = 0.0;
  ConstantSource source = ConstantSource::Estimated;
};

/// Log-values of a single function on B_k, aligned with shift.words(k).
struct WindowTable {
  std::size_t window = 1;
  std::vector<double> log_values;
};

class PotentialModel {
 public:
  virtual ~PotentialModel() = default;
  virtual const Subshift& shift() const = 0;
  /// Bounds of log f_n over [w]; requires 1 <= n <= |w|.
  virtual LogEnvelope envelope(WordView w, std::size_t n) const = 0;
  virtual double value_at(const Point& x, std::size_t n) const = 0;
  virtual std::string describe() const = 0;
  virtual const WindowTable* window_table() const { return nullptr; }
};

class Potential {
 public:
  Potential(std::shared_ptr<const PotentialModel> model, Flavor flavor, Constant C, Constant M);

  const Subshift& shift() const { return model_->shift(); }
  LogEnvelope envelope(WordView w) const { return envelope(w, w.size()); }
  LogEnvelope envelope(WordView w, std::size_t n) const;
  double value_at(const Point& x, std::size_t n) const { return model_->value_at(x, n); }
  /// Envelopes for every word of shift().words(n), in that order.
  std::vector<LogEnvelope> level_envelopes(std::size_t n) const;

  Flavor flavor() const noexcept { return flavor_; }
  const Constant& C() const noexcept { return C_; }
  const Constant& M() const noexcept { return M_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const WindowTable* window_table() const { return model_->window_table(); }
  const std::shared_ptr<const PotentialModel>& model() const noexcept { return model_; }
  std::string describe() const { return model_->describe(); }

  Potential with_C(Constant c) const;
  Potential with_M(Constant m) const;
  Potential with_warning(std::string w) const;
  Potential with_flavor(Flavor f) const;

 private:
  std::shared_ptr<const PotentialModel> model_;
  Flavor flavor_;
  Constant C_;
  Constant M_;
  std::vector<std::string> warnings_;
};

/// Additive potential from the Birkhoff sums of a window-k function.
/// `log_values` is aligned with shift.words(window).
Potential from_single_function(const Subshift& shift, std::size_t window,
                               std::vector<double> log_values);
Potential from_single_function(const Subshift& shift, std::size_t window,
                               const std::map<Word, double>& log_values);
Potential zero_potential(const Subshift& shift);

Potential compose_with_factor(const Potential& on_codomain, const FactorMap& map);
/// log f_n(pi w) - log count(pi w). Condition A is checked up to `n_check`.
Potential quotient_by_count(const Potential& composed, const FactorMap& map, std::size_t n_check = 8);
Potential tilt(const Potential& p, double per_step_log);

double estimate_almost_additivity(const Potential& p, std::size_t n_max);
double estimate_bounded_variation(const Potential& p, std::size_t n_max);

/// Point-level image under a one-block map.
Point image_point(const FactorMap& map, const Point& x);

}  // namespace symdyn
