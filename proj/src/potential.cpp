#include "symdyn/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "symdyn/error.hpp"

namespace symdyn {

const char* to_string(Flavor f) noexcept {
  switch (f) {
    case Flavor::Additive: return "additive";
    case Flavor::AlmostAdditive: return "almost-additive";
    case Flavor::Subadditive: return "subadditive";
    case Flavor::AsymptoticallySubadditive: return "asymptotically-subadditive";
  }
  return "?";
}

const char* to_string(ConstantSource s) noexcept {
  switch (s) {
    case ConstantSource::Certified: return "certified";
    case ConstantSource::Estimated: return "estimated";
    case ConstantSource::UserSupplied: return "user";
  }
  return "?";
}

Potential::Potential(std::shared_ptr<const PotentialModel> model, Flavor flavor, Constant C, Constant M)
    : model_(std::move(model)), flavor_(flavor), C_(C), M_(M) {}

LogEnvelope Potential::envelope(WordView w, std::size_t n) const {
  if (n == 0 || n > w.size())
    throw Error(ErrorKind::Domain, "envelope level must satisfy 1 <= n <= |w|");
  return model_->envelope(w, n);
}

std::vector<LogEnvelope> Potential::level_envelopes(std::size_t n) const {
  const WordList& ws = shift().words(n);
  std::vector<LogEnvelope> out(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) out[i] = model_->envelope(ws[i], n);
  return out;
}

Potential Potential::with_C(Constant c) const {
  Potential p = *this;
  p.C_ = c;
  return p;
}
Potential Potential::with_M(Constant m) const {
  Potential p = *this;
  p.M_ = m;
  return p;
}
Potential Potential::with_warning(std::string w) const {
  Potential p = *this;
  p.warnings_.push_back(std::move(w));
  return p;
}
Potential Potential::with_flavor(Flavor f) const {
  Potential p = *this;
  p.flavor_ = f;
  return p;
}

Point image_point(const FactorMap& map, const Point& x) {
  return Point{map.image(x.prefix), map.image(x.cycle)};
}

namespace {

class SingleFunctionModel final : public PotentialModel {
 public:
  SingleFunctionModel(Subshift shift, WindowTable table) : shift_(std::move(shift)), table_(std::move(table)) {
    const std::size_t q = shift_.alphabet_size();
    std::size_t dense = 1;
    for (std::size_t i = 0; i < table_.window; ++i) {
      dense *= q;
      if (dense > 10000000) throw Error(ErrorKind::Budget, "window table too large");
    }
    dense_.assign(dense, std::nan(""));
    const WordList& ws = shift_.words(table_.window);
    for (std::size_t i = 0; i < ws.size(); ++i) dense_[encode(ws[i], q)] = table_.log_values[i];
  }

  const Subshift& shift() const override { return shift_; }
  const WindowTable* window_table() const override { return &table_; }

  std::string describe() const override {
    std::ostringstream os;
    os << "single-function(window=" << table_.window << ")";
    return os.str();
  }

  double term(WordView window_word) const { return dense_[encode(window_word, shift_.alphabet_size())]; }

  LogEnvelope envelope(WordView w, std::size_t n) const override {
    const std::size_t k = table_.window;
    const std::size_t need = n + k - 1;
    double fixed = 0.0;
    std::size_t full_terms = 0;
    for (std::size_t i = 0; i < n && i + k <= w.size(); ++i) {
      fixed += term(w.subspan(i, k));
      ++full_terms;
    }
    if (need <= w.size()) return {fixed, fixed};
    // Enumerate admissible continuations to cover the remaining terms.
    const std::size_t extra = need - w.size();
    Word buf(w.begin(), w.end());
    buf.resize(need);
    LogEnvelope env{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto state = shift_.run(shift_.start_state(), w);
    if (!state) throw Error(ErrorKind::Domain, "envelope: word is not admissible");
    extend(buf, w.size(), extra, *state, full_terms, n, fixed, env);
    return env;
  }

  double value_at(const Point& x, std::size_t n) const override {
    const std::size_t k = table_.window;
    Word window(k);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) window[j] = x.at(i + j);
      s += term(window);
    }
    return s;
  }

 private:
  void extend(Word& buf, std::size_t pos, std::size_t remaining, LanguageState state,
              std::size_t first_open_term, std::size_t n, double fixed, LogEnvelope& env) const {
    if (remaining == 0) {
      double s = fixed;
      const std::size_t k = table_.window;
      for (std::size_t i = first_open_term; i < n; ++i) s += term(WordView(buf).subspan(i, k));
      env.lo = std::min(env.lo, s);
      env.hi = std::max(env.hi, s);
      return;
    }
    for (std::size_t a = 0; a < shift_.alphabet_size(); ++a) {
      auto next = shift_.advance(state, static_cast<Symbol>(a));
      if (!next) continue;
      buf[pos] = static_cast<Symbol>(a);
      extend(buf, pos + 1, remaining - 1, *next, first_open_term, n, fixed, env);
    }
  }

  Subshift shift_;
  WindowTable table_;
  std::vector<double> dense_;
};

class CompositionModel final : public PotentialModel {
 public:
  CompositionModel(Potential source, FactorMap map) : source_(std::move(source)), map_(std::move(map)) {}
  const Subshift& shift() const override { return map_.domain(); }
  LogEnvelope envelope(WordView w, std::size_t n) const override {
    return source_.envelope(map_.image(w), n);
  }
  double value_at(const Point& x, std::size_t n) const override {
    return source_.value_at(image_point(map_, x), n);
  }
  std::string describe() const override { return "compose(" + source_.describe() + ")"; }
  const FactorMap& map() const { return map_; }
  const Potential& source() const { return source_; }

 private:
  Potential source_;
  FactorMap map_;
};

class QuotientModel final : public PotentialModel {
 public:
  QuotientModel(Potential composed, FactorMap map) : composed_(std::move(composed)), map_(std::move(map)) {}
  const Subshift& shift() const override { return map_.domain(); }
  LogEnvelope envelope(WordView w, std::size_t n) const override {
    LogEnvelope e = composed_.envelope(w, n);
    const double c = map_.log_count(map_.image(w.first(n)));
    return {e.lo - c, e.hi - c};
  }
  double value_at(const Point& x, std::size_t n) const override {
    return composed_.value_at(x, n) - map_.log_count(map_.image(x.take(n)));
  }
  std::string describe() const override { return "quotient(" + composed_.describe() + ")"; }

 private:
  Potential composed_;
  FactorMap map_;
};

class TiltModel final : public PotentialModel {
 public:
  TiltModel(Potential source, double per_step) : source_(std::move(source)), per_step_(per_step) {}
  const Subshift& shift() const override { return source_.shift(); }
  LogEnvelope envelope(WordView w, std::size_t n) const override {
    LogEnvelope e = source_.envelope(w, n);
    const double t = per_step_ * static_cast<double>(n);
    return {e.lo + t, e.hi + t};
  }
  double value_at(const Point& x, std::size_t n) const override {
    return source_.value_at(x, n) + per_step_ * static_cast<double>(n);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "tilt(" << source_.describe() << ", " << per_step_ << ")";
    return os.str();
  }

 private:
  Potential source_;
  double per_step_;
};

}  // namespace

Potential from_single_function(const Subshift& shift, std::size_t window, std::vector<double> log_values) {
  if (window == 0) throw Error(ErrorKind::Domain, "window must be positive");
  if (log_values.size() != shift.count(window))
    throw Error(ErrorKind::Domain, "window table must cover every admissible block of the window length");
  for (double v : log_values)
    if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "window table values must be finite");
  auto model = std::make_shared<SingleFunctionModel>(shift, WindowTable{window, std::move(log_values)});
  Potential p(model, Flavor::Additive, {0.0, ConstantSource::Certified}, {1.0, ConstantSource::Certified});
  if (window == 1) return p;
  // For one-step presentations the envelope width only depends on the last
  // window-1 symbols, so a scan to level `window` sees every width.
  const bool exact = shift.kind() != ShiftKind::Sofic;
  const std::size_t depth = exact ? window : window + 4;
  const double m = estimate_bounded_variation(p, depth);
  return p.with_M({m, exact ? ConstantSource::Certified : ConstantSource::Estimated});
}

Potential from_single_function(const Subshift& shift, std::size_t window,
                               const std::map<Word, double>& log_values) {
  const WordList& ws = shift.words(window);
  std::vector<double> aligned(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    auto it = log_values.find(Word(ws[i].begin(), ws[i].end()));
    if (it == log_values.end())
      throw Error(ErrorKind::Domain, "window table misses block " + format_word(ws[i], shift.alphabet_size()));
    aligned[i] = it->second;
  }
  return from_single_function(shift, window, std::move(aligned));
}

Potential zero_potential(const Subshift& shift) {
  return from_single_function(shift, 1, std::vector<double>(shift.alphabet_size(), 0.0));
}

Potential compose_with_factor(const Potential& on_codomain, const FactorMap& map) {
  if (!on_codomain.shift().same_as(map.codomain()))
    throw Error(ErrorKind::Domain, "compose_with_factor: potential is not defined on the codomain");
  auto model = std::make_shared<CompositionModel>(on_codomain, map);
  Potential p(model, on_codomain.flavor(), on_codomain.C(), on_codomain.M());
  for (const auto& w : on_codomain.warnings()) p = p.with_warning(w);
  return p;
}

Potential quotient_by_count(const Potential& composed, const FactorMap& map, std::size_t n_check) {
  const auto* comp = dynamic_cast<const CompositionModel*>(composed.model().get());
  if (comp == nullptr || !comp->map().domain().same_as(map.domain()) ||
      !comp->map().codomain().same_as(map.codomain()))
    throw Error(ErrorKind::Precondition, "quotient_by_count: potential must be composed with the same map");
  auto model = std::make_shared<QuotientModel>(composed, map);
  const ConditionAReport cond = check_condition_A(map, std::max<std::size_t>(n_check, 2));
  const double c_value = composed.C().value + std::log(1.0 / cond.best_D);
  Potential p(model, Flavor::AlmostAdditive, {c_value, ConstantSource::Estimated}, composed.M());
  if (!cond.holds_up_to_n_max || cond.trend_decaying) {
    std::ostringstream os;
    os << "condition A fails to stabilize up to n=" << n_check << " (decay ratio " << cond.decay_ratio
       << "); treated as subadditive";
    p = p.with_flavor(Flavor::Subadditive).with_warning(os.str());
  }
  return p;
}

Potential tilt(const Potential& p, double per_step_log) {
  auto model = std::make_shared<TiltModel>(p, per_step_log);
  Potential out(model, p.flavor(), p.C(), p.M());
  for (const auto& w : p.warnings()) out = out.with_warning(w);
  return out;
}

double estimate_almost_additivity(const Potential& p, std::size_t n_max) {
  if (n_max < 2) throw Error(ErrorKind::Precondition, "estimate_almost_additivity needs n_max >= 2");
  const Subshift& x_shift = p.shift();
  double c_hat = 0.0;
  for (std::size_t len = 2; len <= n_max; ++len) {
    const WordList& ws = x_shift.words(len);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const Point x = x_shift.canonical_point(ws[i]);
      const double whole = p.value_at(x, len);
      for (std::size_t n = 1; n < len; ++n) {
        const double defect = whole - p.value_at(x, n) - p.value_at(x.shifted(n), len - n);
        c_hat = std::max(c_hat, std::abs(defect));
      }
    }
  }
  return c_hat;
}

double estimate_bounded_variation(const Potential& p, std::size_t n_max) {
  if (n_max < 1) throw Error(ErrorKind::Precondition, "estimate_bounded_variation needs n_max >= 1");
  double widest = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (const LogEnvelope& e : p.level_envelopes(n)) widest = std::max(widest, e.width());
  }
  return std::exp(widest);
}

}  // namespace symdyn
