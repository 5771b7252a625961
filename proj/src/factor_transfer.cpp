#include "symdyn/factor_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "symdyn/error.hpp"
#include "symdyn/numeric.hpp"

namespace symdyn {

namespace {

constexpr double kTol = 1e-12;

double tol_for(double a, double b) { return kTol * std::max({1.0, std::abs(a), std::abs(b)}); }

CheckRecord le_check(std::string name, std::size_t n, double lhs, double rhs) {
  return CheckRecord{std::move(name), n, lhs, rhs, lhs <= rhs + tol_for(lhs, rhs)};
}

bool is_full_language(const Subshift& s) {
  if (s.kind() == ShiftKind::Full) return true;
  if (s.kind() != ShiftKind::SFT) return false;
  for (const auto& row : s.transition_matrix())
    for (int v : row)
      if (!v) return false;
  return true;
}

void require_full_pair(const FactorMap& map, const char* what) {
  if (!is_full_language(map.domain()) || !is_full_language(map.codomain()))
    throw Error(ErrorKind::Unsupported, std::string(what) + " needs full shifts on both sides");
}

std::string fmt_word(const Subshift& s, WordView w) { return format_word(w, s.alphabet_size()); }

}  // namespace

bool all_pass(const std::vector<CheckRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

double ImagePotentialTable::hi(WordView y) const {
  const WordList& ws = shift.words(level);
  const std::size_t i = ws.index_of(y);
  if (i == ws.size()) throw Error(ErrorKind::Domain, "word is not in the image language");
  return log_g_hi[i] - tilt * static_cast<double>(level);
}

double ImagePotentialTable::lo(WordView y) const {
  const WordList& ws = shift.words(level);
  const std::size_t i = ws.index_of(y);
  if (i == ws.size()) throw Error(ErrorKind::Domain, "word is not in the image language");
  return log_g_lo[i] - tilt * static_cast<double>(level);
}

ImagePotentialTable ImagePotentialTable::tilted(double per_step) const {
  ImagePotentialTable t = *this;
  t.tilt += per_step;
  return t;
}

ImagePotentialTable image_potential(const FactorMap& map, const Potential& F, std::size_t n, ImageRoute route) {
  if (n == 0) throw Error(ErrorKind::Domain, "image_potential needs n >= 1");
  if (!F.shift().same_as(map.domain())) throw Error(ErrorKind::Domain, "potential must live on the domain");
  if (!map.domain().is_irreducible())
    throw Error(ErrorKind::Precondition, "image_potential needs an irreducible domain");
  const Subshift& y_shift = map.codomain();
  const WordList& ys = y_shift.words(n);
  ImagePotentialTable t{n, y_shift, std::vector<double>(ys.size()), std::vector<double>(ys.size()), 0.0};

  const WindowTable* table = F.window_table();
  const bool closed_ok = table != nullptr && table->window == 1 && is_full_language(map.domain());
  if (route == ImageRoute::ClosedForm && !closed_ok)
    throw Error(ErrorKind::Unsupported, "closed-form image potential needs window 1 on a full domain");
  if (closed_ok && route != ImageRoute::Enumerate) {
    std::vector<double> fiber_log(y_shift.alphabet_size());
    for (std::size_t b = 0; b < fiber_log.size(); ++b) {
      std::vector<double> v;
      for (Symbol x : map.fiber(static_cast<Symbol>(b))) v.push_back(table->log_values[static_cast<std::size_t>(x)]);
      fiber_log[b] = log_sum_exp(v);
    }
    for (std::size_t i = 0; i < ys.size(); ++i) {
      double s = 0.0;
      for (Symbol b : ys[i]) s += fiber_log[static_cast<std::size_t>(b)];
      t.log_g_hi[i] = t.log_g_lo[i] = s;
    }
    return t;
  }
  const WordList& xs = map.domain().words(n);
  const auto envs = F.level_envelopes(n);
  std::vector<std::vector<double>> hi(ys.size()), lo(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t j = ys.index_of(map.image(xs[i]));
    hi[j].push_back(envs[i].hi);
    lo[j].push_back(envs[i].lo);
  }
  for (std::size_t j = 0; j < ys.size(); ++j) {
    t.log_g_hi[j] = log_sum_exp(hi[j]);
    t.log_g_lo[j] = log_sum_exp(lo[j]);
  }
  return t;
}

namespace {

class ImageSequenceModel final : public PotentialModel {
 public:
  ImageSequenceModel(FactorMap map, Potential F) : map_(std::move(map)), F_(std::move(F)) {}
  const Subshift& shift() const override { return map_.codomain(); }
  LogEnvelope envelope(WordView w, std::size_t n) const override { return lookup(w.first(n)); }
  double value_at(const Point& y, std::size_t n) const override { return lookup(y.take(n)).hi; }
  std::string describe() const override { return "image(" + F_.describe() + ")"; }

 private:
  LogEnvelope lookup(WordView y) const {
    Word key(y.begin(), y.end());
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const auto cyl = map_.preimage_cylinders(y);
    std::vector<double> hi(cyl.size()), lo(cyl.size());
    for (std::size_t i = 0; i < cyl.size(); ++i) {
      const LogEnvelope e = F_.envelope(cyl[i]);
      hi[i] = e.hi;
      lo[i] = e.lo;
    }
    const LogEnvelope env{log_sum_exp(lo), log_sum_exp(hi)};
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(std::move(key), env);
    return env;
  }

  FactorMap map_;
  Potential F_;
  mutable std::mutex mutex_;
  mutable std::map<Word, LogEnvelope> cache_;
};

}  // namespace

Potential image_potential_sequence(const FactorMap& map, const Potential& F) {
  if (!F.shift().same_as(map.domain())) throw Error(ErrorKind::Domain, "potential must live on the domain");
  auto model = std::make_shared<ImageSequenceModel>(map, F);
  return Potential(model, Flavor::AsymptoticallySubadditive, F.C(), F.M());
}

PressureEqualityReport verify_pressure_equality(const FactorMap& map, const Potential& F, std::size_t n_max) {
  PressureEqualityReport rep;
  const double log_m = std::log(F.M().value);
  double widest = -1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    PressureEqualityRow row;
    row.n = n;
    row.log_M = log_m;
    row.log_G = log_partition(F, n);
    const ImagePotentialTable t = image_potential(map, F, n);
    row.log_N_hi = log_sum_exp(t.log_g_hi);
    row.log_N_lo = log_sum_exp(t.log_g_lo);
    for (std::size_t i = 0; i < t.log_g_hi.size(); ++i) {
      const double gap = t.log_g_hi[i] - t.log_g_lo[i];
      if (gap > widest) {
        widest = gap;
        const WordView y = t.shift.words(n)[i];
        rep.witness.assign(y.begin(), y.end());
      }
    }
    const PressureBracket xb = pressure_bracket(F, n);
    row.x_lo = xb.lo;
    row.x_hi = xb.hi;
    row.y_hi = (row.log_N_hi + xb.C) / nn;
    row.y_lo = xb.has_lower ? (row.log_N_lo - log_m + xb.log_c_lower) / nn
                            : -std::numeric_limits<double>::infinity();
    const CheckRecord c1 = le_check("sandwich-lower", n, row.log_G - log_m, row.log_N_lo);
    const CheckRecord c2 = le_check("sandwich-upper", n, row.log_N_hi, row.log_G + log_m);
    const CheckRecord c3 = le_check("estimate-gap", n, std::abs(row.log_G - row.log_N_lo) / nn, 2.0 * log_m / nn);
    const CheckRecord c4 = le_check("brackets-intersect", n, std::max(row.x_lo, row.y_lo), std::min(row.x_hi, row.y_hi));
    row.sandwich = c1.pass && c2.pass;
    row.intersect = c4.pass;
    for (const auto& c : {c1, c2, c3, c4}) rep.checks.push_back(c);
    rep.rows.push_back(row);
  }
  rep.pass = all_pass(rep.checks);
  return rep;
}

ImageGibbsReport verify_image_gibbs(const FactorMap& map, const CylinderMeasure& mu, const Potential& F,
                                    double pressure, std::size_t n_max, std::size_t n_min) {
  ImageGibbsReport rep;
  const double m = F.M().value;
  for (std::size_t n = std::max<std::size_t>(n_min, 1); n <= n_max; ++n) {
    const CylinderDistribution dx = cylinder_distribution(mu, map.domain(), n, "source");
    ImageGibbsRow row;
    row.n = n;
    row.M = m;
    row.source = gibbs_ratio_envelope(dx, F, pressure);
    if (row.source.min_ratio <= 0.0)
      throw Error(ErrorKind::Precondition, "source measure fails its own Gibbs check at n=" + std::to_string(n));
    row.C1 = row.source.constant();
    const CylinderDistribution dy = pushforward(dx, map);
    const ImagePotentialTable t = image_potential(map, F, n).tilted(pressure);
    row.min_ratio = std::numeric_limits<double>::infinity();
    row.max_ratio = 0.0;
    const double shift = t.tilt * static_cast<double>(n);
    for (std::size_t i = 0; i < dy.weights.size(); ++i) {
      const double lw = std::log(dy.weights[i]);
      const double rh = std::exp(lw - (t.log_g_hi[i] - shift));
      const double rl = std::exp(lw - (t.log_g_lo[i] - shift));
      row.min_ratio = std::min({row.min_ratio, rh, rl});
      row.max_ratio = std::max({row.max_ratio, rh, rl});
    }
    rep.checks.push_back(le_check("image-ratio-lower", n, 1.0 / (row.C1 * m), row.min_ratio));
    rep.checks.push_back(le_check("image-ratio-upper", n, row.max_ratio, row.C1 * m));
    rep.checks.push_back(le_check("image-ratio-spread", n, row.max_ratio / row.min_ratio, row.C1 * row.C1 * m * m));
    rep.C1 = std::max(rep.C1, row.C1);
    rep.rows.push_back(row);
  }
  rep.pass = all_pass(rep.checks);
  return rep;
}

SubadditivityReport check_image_subadditivity(const FactorMap& map, const Potential& F, std::size_t n_max) {
  SubadditivityReport rep;
  rep.max_defect = -std::numeric_limits<double>::infinity();
  std::vector<ImagePotentialTable> tables;
  tables.reserve(n_max + 1);
  tables.push_back(image_potential(map, F, 1));
  for (std::size_t n = 1; n <= n_max; ++n) tables.push_back(image_potential(map, F, n));
  const double c = F.C().value;
  for (std::size_t len = 2; len <= n_max; ++len) {
    const WordList& ys = map.codomain().words(len);
    double worst_lhs = 0.0, worst_rhs = 0.0, worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double lhs = tables[len].log_g_hi[i];
      for (std::size_t s = 1; s < len; ++s) {
        const double rhs = tables[s].hi(ys[i].first(s)) + tables[len - s].hi(ys[i].subspan(s)) + c;
        if (lhs - rhs > worst) {
          worst = lhs - rhs;
          worst_lhs = lhs;
          worst_rhs = rhs;
        }
      }
    }
    rep.max_defect = std::max(rep.max_defect, worst);
    rep.checks.push_back(le_check("image-subadditivity", len, worst_lhs, worst_rhs));
  }
  rep.pass = all_pass(rep.checks);
  return rep;
}

namespace {

/// r(b) with count(y b) = r(b) count(y) for every y of length 1..n-1, if such factors exist.
std::optional<std::vector<double>> symbolwise_count_factors(const FactorMap& map, std::size_t n) {
  const Subshift& ys = map.codomain();
  std::vector<double> r(ys.alphabet_size(), -1.0);
  for (std::size_t len = 1; len < n; ++len) {
    const WordList& ws = ys.words(len);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const double base = static_cast<double>(map.preimage_count(ws[i]));
      for (std::size_t b = 0; b < ys.alphabet_size(); ++b) {
        Word ext = concat(ws[i], Word{static_cast<Symbol>(b)});
        if (!ys.admissible(ext)) continue;
        const double ratio = static_cast<double>(map.preimage_count(ext)) / base;
        if (r[b] < 0.0) r[b] = ratio;
        else if (std::abs(r[b] - ratio) > 1e-12 * ratio) return std::nullopt;
      }
    }
  }
  for (double& v : r)
    if (v < 0.0) v = 1.0;
  return r;
}

bool oracle_ready(const Subshift& s) { return s.kind() != ShiftKind::Sofic && s.is_primitive(); }

}  // namespace

PreimageGibbs preimage_gibbs(const FactorMap& map, const Potential& psi, std::size_t n_max, std::size_t n_check) {
  const ConditionAReport cond = check_condition_A(map, std::max<std::size_t>(n_max, 2));
  if (!cond.holds_up_to_n_max || cond.trend_decaying) {
    std::ostringstream os;
    os << "condition A does not stabilize up to n=" << cond.n_max << ": best D " << cond.best_D << ", decay ratio "
       << cond.decay_ratio << ", witness " << fmt_word(map.codomain(), cond.witness) << " split at "
       << cond.witness_split;
    throw Error(ErrorKind::Refused, os.str());
  }
  const Potential composed = compose_with_factor(psi, map);
  PreimageGibbs out{quotient_by_count(composed, map, std::max<std::size_t>(n_max, 2)), cond, {}, {}, {}, {}, ""};
  out.check.n_max = n_check;

  const WindowTable* table = psi.window_table();
  const auto factors = symbolwise_count_factors(map, std::max<std::size_t>(n_max, 2));
  if (table != nullptr && oracle_ready(map.codomain())) out.nu_psi = block_rpf_oracle(psi).gibbs;

  if (table != nullptr && factors && oracle_ready(map.domain())) {
    // Additive potential within bounded distance of the quotient.
    const std::size_t k = table->window;
    const WordList& xk = map.domain().words(k);
    const WordList& yk = map.codomain().words(k);
    std::vector<double> stand_in(xk.size());
    for (std::size_t i = 0; i < xk.size(); ++i) {
      const Word y = map.image(xk[i]);
      stand_in[i] = table->log_values[yk.index_of(y)] - std::log((*factors)[static_cast<std::size_t>(y[0])]);
    }
    out.mu1 = block_rpf_oracle(from_single_function(map.domain(), k, stand_in)).gibbs;
    out.provenance = "rpf-oracle";
    out.check.exact_route = true;
  } else {
    const double p_hat = pressure_estimate(out.phi1, n_max);
    out.mu1_approx = gibbs_approximant(out.phi1, n_max, p_hat);
    out.provenance = "gibbs-approximant";
    n_check = std::min(n_check, n_max);
    out.check.n_max = n_check;
  }

  std::optional<CylinderDistribution> nu_approx;
  if (!out.nu_psi) nu_approx = gibbs_approximant(psi, n_check, pressure_estimate(psi, n_check));
  for (std::size_t n = 1; n <= n_check; ++n) {
    const WordList& ys = map.codomain().words(n);
    std::optional<HiddenMarkovMeasure> pushed;
    std::optional<CylinderDistribution> pushed_d;
    if (out.mu1) pushed = pushforward(*out.mu1, map);
    else pushed_d = pushforward(marginalize(*out.mu1_approx, n), map);
    std::optional<CylinderDistribution> nu_n;
    if (nu_approx) nu_n = marginalize(*nu_approx, n);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double a = pushed ? pushed->prob(ys[i]) : pushed_d->weights[i];
      const double b = out.nu_psi ? out.nu_psi->prob(ys[i]) : nu_n->weights[i];
      out.check.max_abs_diff = std::max(out.check.max_abs_diff, std::abs(a - b));
      out.check.max_rel_diff = std::max(out.check.max_rel_diff, std::abs(a - b) / std::max(b, 1e-300));
    }
  }
  return out;
}

Potential compensation_function_full_shift(const FactorMap& map) {
  require_full_pair(map, "compensation_function_full_shift");
  std::vector<double> g(map.codomain().alphabet_size());
  for (std::size_t b = 0; b < g.size(); ++b) g[b] = std::log(static_cast<double>(map.fiber(static_cast<Symbol>(b)).size()));
  return from_single_function(map.codomain(), 1, g);
}

CompensationCheck compensation_check(const FactorMap& map, const CylinderMeasure& m, std::size_t n) {
  const Potential g = compensation_function_full_shift(map);
  CompensationCheck c;
  c.n = n;
  const CylinderDistribution d = cylinder_distribution(m, map.codomain(), n, "test");
  const WordList& ys = map.codomain().words(n);
  std::vector<double> terms(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) terms[i] = d.weights[i] * map.log_count(ys[i]);
  c.mean_log_count = pairwise_sum(terms) / static_cast<double>(n);
  for (std::size_t b = 0; b < map.codomain().alphabet_size(); ++b)
    c.integral_g += m.prob(Word{static_cast<Symbol>(b)}) * g.window_table()->log_values[b];
  c.abs_diff = std::abs(c.mean_log_count - c.integral_g);
  return c;
}

RatioCriterion equality_criterion_ratio(const FactorMap& map, const Potential& F, std::size_t n_max) {
  RatioCriterion rc;
  rc.per_n.assign(n_max + 1, 1.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const ImagePotentialTable t = image_potential(map, F, n);
    const WordList& xs = map.domain().words(n);
    const WordList& ys = map.codomain().words(n);
    const auto envs = F.level_envelopes(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Word y = map.image(xs[i]);
      const double base = t.log_g_hi[ys.index_of(y)] - map.log_count(y);
      const double dev = std::max(std::abs(base - envs[i].lo), std::abs(base - envs[i].hi));
      if (dev > worst) {
        worst = dev;
        if (n == n_max) rc.witness.assign(xs[i].begin(), xs[i].end());
      }
    }
    rc.per_n[n] = std::exp(worst);
    rc.A_hat = std::max(rc.A_hat, rc.per_n[n]);
  }
  if (n_max >= 4) rc.growing = rc.per_n[n_max] > 1.05 * rc.per_n[(n_max + 1) / 2];
  return rc;
}

Word psi_selector(const FactorMap& map, WordView y) {
  require_full_pair(map, "psi_selector");
  Word x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = map.fiber(y[i]).front();
  return x;
}

BowenImage bowen_image_potential(const FactorMap& map, const Potential& f, std::size_t n_max, std::size_t n_check) {
  require_full_pair(map, "bowen_image_potential");
  const WindowTable* table = f.window_table();
  if (table == nullptr) throw Error(ErrorKind::Unsupported, "bowen_image_potential needs a window table");
  RatioCriterion crit = equality_criterion_ratio(map, f, n_max);
  if (crit.growing) {
    std::ostringstream os;
    os << "ratio bound fails to stabilize: A_hat grows from " << crit.per_n[(n_max + 1) / 2] << " to "
       << crit.per_n[n_max] << ", witness cylinder " << fmt_word(map.domain(), crit.witness);
    throw Error(ErrorKind::Refused, os.str());
  }
  const std::size_t k = table->window;
  const WordList& yk = map.codomain().words(k);
  const WordList& xk = map.domain().words(k);
  std::vector<double> values(yk.size());
  for (std::size_t i = 0; i < yk.size(); ++i) {
    const Word x = psi_selector(map, yk[i]);
    values[i] = std::log(static_cast<double>(map.fiber(yk[i][0]).size())) + table->log_values[xk.index_of(x)];
  }
  BowenImage out{from_single_function(map.codomain(), k, values), std::move(crit), 0.0, n_check};
  const HiddenMarkovMeasure nu = block_rpf_oracle(out.potential).gibbs;
  const HiddenMarkovMeasure pushed = pushforward(block_rpf_oracle(f).gibbs, map);
  for (std::size_t n = 1; n <= n_check; ++n) {
    const WordList& ys = map.codomain().words(n);
    for (std::size_t i = 0; i < ys.size(); ++i)
      out.max_abs_diff = std::max(out.max_abs_diff, std::abs(nu.prob(ys[i]) - pushed.prob(ys[i])));
  }
  return out;
}

namespace {

struct KemptonTail {
  std::vector<std::vector<double>> u;  // u[n] on radix-ordered B_{n+1}(Y), n = 1..n_max
};

/// Depth-first over the prepend tree of y-suffixes; each node carries the
/// backward sums indexed by the first window-1 symbols of (suffix . w).
KemptonTail kempton_tail(const FactorMap& map, const WindowTable& table, const Point& w, std::size_t n_max,
                         double bound_scale, const std::vector<double>& g1bar, KemptonReport& rep) {
  const std::size_t qx = map.domain().alphabet_size();
  const std::size_t qy = map.codomain().alphabet_size();
  const std::size_t k = table.window;
  std::size_t n_states = 1;
  for (std::size_t i = 0; i + 1 < k; ++i) n_states *= qx;
  std::vector<double> dense(n_states * qx);
  {
    const WordList& blocks = map.domain().words(k);
    for (std::size_t i = 0; i < blocks.size(); ++i) dense[encode(blocks[i], qx)] = std::exp(table.log_values[i]);
  }
  KemptonTail out;
  out.u.assign(n_max + 1, {});
  std::size_t size = qy;
  for (std::size_t n = 1; n <= n_max; ++n) {
    size *= qy;
    out.u[n].assign(size, 0.0);
  }
  std::vector<double> start(n_states, 0.0);
  start[encode(w.take(k - 1), qx)] = 1.0;

  // Each level keeps its own buffers; depth d holds the suffix of length d.
  std::vector<std::vector<double>> vec(n_max + 2, std::vector<double>(n_states));
  vec[0] = start;
  std::vector<double> g(n_max + 2, 1.0);
  std::vector<std::uint64_t> code(n_max + 2, 0);
  std::vector<std::uint64_t> weight(n_max + 2, 1);
  for (std::size_t d = 1; d <= n_max + 1; ++d) weight[d] = weight[d - 1] * qy;
  const std::size_t tail_div = n_states / qx == 0 ? 1 : n_states / qx;

  auto rec = [&](auto&& self, std::size_t depth) -> void {
    if (depth == n_max + 1) return;
    for (std::size_t b = 0; b < qy; ++b) {
      std::vector<double>& next = vec[depth + 1];
      std::fill(next.begin(), next.end(), 0.0);
      const std::vector<double>& cur = vec[depth];
      for (Symbol x : map.fiber(static_cast<Symbol>(b))) {
        for (std::size_t s = 0; s < n_states; ++s) {
          if (cur[s] == 0.0) continue;
          const double term = dense[static_cast<std::size_t>(x) * n_states + s] * cur[s];
          // New leading window: x followed by the first k-2 symbols of s.
          const std::size_t ns = k == 1 ? 0 : static_cast<std::size_t>(x) * tail_div + s / qx;
          next[ns] += term;
        }
      }
      double total = 0.0;
      for (double v : next) total += v;
      // Normalized per level, so the total is g(child) / g(parent).
      for (double& v : next) v /= total;
      g[depth + 1] = total;
      code[depth + 1] = b * weight[depth] + code[depth];
      if (depth + 1 >= 2) {
        const std::size_t n = depth;  // u_{w,n} on words of length n+1
        const double u = total;
        out.u[n][code[depth + 1]] = u;
        rep.min_u = std::min(rep.min_u, u);
        const double bound = bound_scale * g1bar[b];
        rep.max_u_over_bound = std::max(rep.max_u_over_bound, u / bound);
        if (!(u > 1.0) || u > bound * (1.0 + 1e-12)) ++rep.bound_violations;
      }
      self(self, depth + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

KemptonReport kempton_u(const FactorMap& map, const Potential& f, const std::vector<Point>& tails,
                        std::size_t n_max, std::size_t stored_level) {
  if (!is_full_language(map.domain())) throw Error(ErrorKind::Unsupported, "kempton_u needs a full domain");
  if (!is_full_language(map.codomain())) throw Error(ErrorKind::Unsupported, "kempton_u needs a full codomain");
  const WindowTable* table = f.window_table();
  if (table == nullptr) throw Error(ErrorKind::Unsupported, "kempton_u needs a window table");
  if (n_max < 2) throw Error(ErrorKind::Precondition, "kempton_u needs n_max >= 2");
  if (tails.empty()) throw Error(ErrorKind::Precondition, "kempton_u needs at least one tail");
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i <= n_max; ++i) {
    cells *= map.codomain().alphabet_size();
    if (cells > 50000000ull) throw Error(ErrorKind::Budget, "kempton_u table exceeds 5e7 cells");
  }
  KemptonReport rep;
  rep.n_max = n_max;
  rep.stored_level = std::min(stored_level, n_max);
  rep.min_u = std::numeric_limits<double>::infinity();
  rep.sup_diffs.assign(n_max, 0.0);
  rep.w_sensitivity.assign(n_max + 1, 0.0);
  const ImagePotentialTable g1 = image_potential(map, f, 1);
  std::vector<double> g1bar(g1.log_g_hi.size());
  for (std::size_t b = 0; b < g1bar.size(); ++b) g1bar[b] = std::exp(g1.log_g_hi[b]);
  const std::size_t qy = map.codomain().alphabet_size();

  std::optional<KemptonTail> first;
  for (const Point& w : tails) {
    KemptonTail t = kempton_tail(map, *table, w, n_max, f.M().value, g1bar, rep);
    for (std::size_t n = 1; n < n_max; ++n) {
      const auto& a = t.u[n];
      const auto& b = t.u[n + 1];
      double worst = 0.0;
      for (std::size_t z = 0; z < b.size(); ++z) worst = std::max(worst, std::abs(b[z] - a[z / qy]));
      rep.sup_diffs[n] = std::max(rep.sup_diffs[n], worst);
    }
    if (first) {
      for (std::size_t n = 1; n <= n_max; ++n) {
        double worst = 0.0;
        for (std::size_t z = 0; z < t.u[n].size(); ++z) worst = std::max(worst, std::abs(t.u[n][z] - first->u[n][z]));
        rep.w_sensitivity[n] = std::max(rep.w_sensitivity[n], worst);
      }
    }
    std::vector<std::vector<double>> kept(t.u.begin(), t.u.begin() + static_cast<std::ptrdiff_t>(rep.stored_level + 1));
    rep.u_tables.push_back(std::move(kept));
    if (!first) first = std::move(t);
  }
  // Rounding-level differences count as converged.
  const double floor = 1e-13 * std::max(1.0, rep.min_u);
  rep.sup_diffs_decreasing = true;
  for (std::size_t n = 2; n < n_max; ++n)
    rep.sup_diffs_decreasing &= rep.sup_diffs[n] < rep.sup_diffs[n - 1] || rep.sup_diffs[n] <= floor;
  if (n_max >= 3 && rep.sup_diffs[1] > 0.0 && rep.sup_diffs[n_max - 1] > 0.0) {
    rep.geometric_ratio =
        std::pow(rep.sup_diffs[n_max - 1] / rep.sup_diffs[1], 1.0 / static_cast<double>(n_max - 2));
  }
  return rep;
}

MultiplicativityReport first_coordinate_multiplicativity_check(const FactorMap& map, const Potential& f,
                                                               std::size_t n_max,
                                                               const std::vector<const CylinderMeasure*>& tests) {
  const WindowTable* table = f.window_table();
  if (table == nullptr || table->window != 1)
    throw Error(ErrorKind::Precondition, "multiplicativity check needs a window-1 function");
  require_full_pair(map, "first_coordinate_multiplicativity_check");
  MultiplicativityReport rep;
  rep.n_max = n_max;
  std::vector<ImagePotentialTable> tables{image_potential(map, f, 1, ImageRoute::Enumerate)};
  for (std::size_t n = 1; n <= n_max; ++n) tables.push_back(image_potential(map, f, n, ImageRoute::Enumerate));
  for (std::size_t n = 2; n <= n_max; ++n) {
    const WordList& ys = map.codomain().words(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double lhs = tables[n].log_g_hi[i];
      const double rhs = tables[1].hi(ys[i].first(1)) + tables[n - 1].hi(ys[i].subspan(1));
      const double rel = std::abs(std::expm1(lhs - rhs));
      if (rel > worst) worst = rel;
      if (rel > rep.max_rel_error) {
        rep.max_rel_error = rel;
        rep.witness.assign(ys[i].begin(), ys[i].end());
      }
    }
    rep.checks.push_back(le_check("multiplicativity-rel-error", n, worst, 1e-12));
  }
  for (const CylinderMeasure* m : tests) {
    const CylinderDistribution d = cylinder_distribution(*m, map.codomain(), n_max, "test");
    std::vector<double> terms(d.weights.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = d.weights[i] * tables[n_max].log_g_hi[i];
    const double lhs = pairwise_sum(terms) / static_cast<double>(n_max);
    double rhs = 0.0;
    for (std::size_t b = 0; b < map.codomain().alphabet_size(); ++b)
      rhs += m->prob(Word{static_cast<Symbol>(b)}) * tables[1].log_g_hi[b];
    rep.integrals.emplace_back(lhs, rhs);
    rep.checks.push_back(CheckRecord{"integral-identity", n_max, lhs, rhs, std::abs(lhs - rhs) <= tol_for(lhs, rhs) * 10});
  }
  rep.pass = all_pass(rep.checks);
  return rep;
}

double relative_vs_image_gap(const FactorMap& map, const Potential& F, const Point& y, std::size_t n_max) {
  double worst = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double rel = relative_pressure_estimate(map, F, y, n);
    const double img = image_potential(map, F, n, ImageRoute::Enumerate).hi(y.take(n)) / static_cast<double>(n);
    worst = std::max(worst, std::abs(rel - img));
  }
  return worst;
}

}  // namespace symdyn
