#include "symdyn/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "symdyn/error.hpp"
#include "symdyn/numeric.hpp"

namespace symdyn {

double log_partition(const Potential& p, std::size_t n) {
  if (n == 0) return 0.0;
  const auto envs = p.level_envelopes(n);
  std::vector<double> v(envs.size());
  for (std::size_t i = 0; i < envs.size(); ++i) v[i] = envs[i].hi;
  return log_sum_exp(v);
}

double log_partition_lo(const Potential& p, std::size_t n) {
  if (n == 0) return 0.0;
  const auto envs = p.level_envelopes(n);
  std::vector<double> v(envs.size());
  for (std::size_t i = 0; i < envs.size(); ++i) v[i] = envs[i].lo;
  return log_sum_exp(v);
}

double pressure_estimate(const Potential& p, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Domain, "pressure_estimate needs n >= 1");
  return log_partition(p, n) / static_cast<double>(n);
}

PressureBracket pressure_bracket(const Potential& p, std::size_t n, const BracketOptions& opts) {
  if (n == 0) throw Error(ErrorKind::Domain, "pressure_bracket needs n >= 1");
  PressureBracket b;
  b.n = n;
  b.C = opts.C.value_or(p.C().value);
  b.M = opts.M.value_or(p.M().value);
  b.C_source = opts.C ? ConstantSource::UserSupplied : p.C().source;
  b.M_source = opts.M ? ConstantSource::UserSupplied : p.M().source;
  b.s_n_log = log_partition(p, n);
  const double nn = static_cast<double>(n);
  b.hi = (b.s_n_log + b.C) / nn;
  b.gap = opts.gap ? opts.gap : p.shift().specification_gap(opts.max_gap);
  if (!b.gap) {
    b.lo = -std::numeric_limits<double>::infinity();
    return b;
  }
  const std::size_t k = *b.gap;
  // Exact superadditivity ratios for pairs that fit inside the gap, then the
  // bridging estimate for everything longer.
  std::vector<double> log_s(2 * k + 1, 0.0);
  for (std::size_t j = 1; j <= 2 * k; ++j) log_s[j] = log_partition(p, j);
  double log_c = std::numeric_limits<double>::infinity();
  for (std::size_t l = 1; l <= k; ++l)
    for (std::size_t m = 1; m <= k; ++m) log_c = std::min(log_c, log_s[l + m] - log_s[l] - log_s[m]);
  double log_min_fk = 0.0;
  if (k > 0) {
    log_min_fk = std::numeric_limits<double>::infinity();
    for (const LogEnvelope& e : p.level_envelopes(k)) log_min_fk = std::min(log_min_fk, e.lo);
  }
  const double bridge = -3.0 * b.C + log_min_fk - 3.0 * std::log(b.M) - log_s[k];
  b.log_c_lower = std::min(log_c, bridge);
  b.lo = (b.s_n_log + b.log_c_lower) / nn;
  b.has_lower = true;
  return b;
}

namespace {

struct FiberNode {
  std::size_t phase;
  LanguageState state;
  bool operator<(const FiberNode& o) const {
    return phase != o.phase ? phase < o.phase : state < o.state;
  }
};

/// Nodes (position in y's finite description, domain state) from which the
/// fiber over y continues forever.
std::map<FiberNode, bool> live_fiber_nodes(const FactorMap& map, const Point& y) {
  const Subshift& x = map.domain();
  std::map<FiberNode, std::vector<FiberNode>> succ;
  std::vector<FiberNode> stack{{0, x.start_state()}};
  succ[stack.back()];
  while (!stack.empty()) {
    const FiberNode node = stack.back();
    stack.pop_back();
    const Symbol ys = y.at(node.phase);
    std::vector<FiberNode> out;
    for (Symbol xs : map.fiber(ys)) {
      if (auto t = x.advance(node.state, xs)) {
        FiberNode nxt{y.next_phase(node.phase), *t};
        out.push_back(nxt);
        if (succ.emplace(nxt, std::vector<FiberNode>{}).second) stack.push_back(nxt);
      }
    }
    succ[node] = std::move(out);
  }
  std::map<FiberNode, bool> live;
  for (const auto& [node, _] : succ) live[node] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [node, alive] : live) {
      if (!alive) continue;
      bool any = false;
      for (const FiberNode& s : succ[node]) any |= live[s];
      if (!any) {
        alive = false;
        changed = true;
      }
    }
  }
  return live;
}

}  // namespace

std::vector<Word> fiber_cylinders(const FactorMap& map, const Point& y, std::size_t n) {
  if (y.cycle.empty()) throw Error(ErrorKind::Domain, "fiber point needs a nonempty cycle");
  if (!map.codomain().admissible(y.take(y.phase_count() + 2 * y.cycle.size())))
    throw Error(ErrorKind::Domain, "fiber point is not admissible in the codomain");
  const auto live = live_fiber_nodes(map, y);
  const Subshift& x = map.domain();
  std::vector<Word> out;
  Word w(n);
  // Depth-first in lexicographic order through live nodes only.
  auto rec = [&](auto&& self, std::size_t depth, FiberNode node) -> void {
    if (depth == n) {
      out.push_back(w);
      return;
    }
    for (Symbol xs : map.fiber(y.at(node.phase))) {
      auto t = x.advance(node.state, xs);
      if (!t) continue;
      FiberNode nxt{y.next_phase(node.phase), *t};
      auto it = live.find(nxt);
      if (it == live.end() || !it->second) continue;
      w[depth] = xs;
      self(self, depth + 1, nxt);
    }
  };
  rec(rec, 0, FiberNode{0, x.start_state()});
  if (out.empty()) throw Error(ErrorKind::Domain, "fiber over the point is empty");
  return out;
}

double relative_pressure_estimate(const FactorMap& map, const Potential& p, const Point& y, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Domain, "relative_pressure_estimate needs n >= 1");
  if (!p.shift().same_as(map.domain()))
    throw Error(ErrorKind::Domain, "potential must live on the domain of the map");
  const auto cyl = fiber_cylinders(map, y, n);
  std::vector<double> v(cyl.size());
  for (std::size_t i = 0; i < cyl.size(); ++i) v[i] = p.envelope(cyl[i]).hi;
  return log_sum_exp(v) / static_cast<double>(n);
}

RelativePressureSeries relative_pressure_series(const FactorMap& map, const Potential& p, const Point& y,
                                                std::size_t n_max) {
  RelativePressureSeries s;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double t = relative_pressure_estimate(map, p, y, n);
    best = std::max(best, t);
    s.terms.push_back(t);
    s.running_max.push_back(best);
  }
  s.last = s.terms.empty() ? 0.0 : s.terms.back();
  s.max = best;
  return s;
}

namespace {

struct ChainLayout {
  WordList states;
  // next[s][a] = successor state index or -1 when s.a is forbidden
  std::vector<std::vector<int>> next;
  std::vector<std::vector<double>> reward;
};

ChainLayout chain_layout(const Potential& p, std::size_t order) {
  const WindowTable* table = p.window_table();
  const Subshift& x = p.shift();
  const std::size_t q = x.alphabet_size();
  const WordList& blocks = x.words(table->window);
  ChainLayout c;
  c.states = x.words(order);
  const std::size_t ns = c.states.size();
  c.next.assign(ns, std::vector<int>(q, -1));
  c.reward.assign(ns, std::vector<double>(q, 0.0));
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < q; ++a) {
      Word ext = concat(c.states[s], Word{static_cast<Symbol>(a)});
      if (!x.admissible(ext)) continue;
      c.next[s][a] = order == 0 ? 0 : static_cast<int>(c.states.index_of(WordView(ext).subspan(1)));
      c.reward[s][a] = table->log_values[blocks.index_of(WordView(ext).first(table->window))];
    }
  }
  return c;
}

Eigen::VectorXd stationary_of(const Eigen::MatrixXd& chain) {
  const Eigen::Index n = chain.rows();
  Eigen::MatrixXd a = chain.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  return pi / pi.sum();
}

}  // namespace

MarkovBound markov_lower_bound(const Potential& p, std::size_t order, std::size_t steps, std::uint64_t seed,
                               std::size_t restarts) {
  const WindowTable* table = p.window_table();
  if (table == nullptr)
    throw Error(ErrorKind::Unsupported, "markov_lower_bound needs an additive single-function potential");
  if (table->window > order + 1)
    throw Error(ErrorKind::Precondition, "window exceeds order + 1; the energy would not be exact");
  const Subshift& x = p.shift();
  if (x.kind() == ShiftKind::Sofic)
    throw Error(ErrorKind::Unsupported, "markov_lower_bound needs a full shift or SFT");
  if (order == 0 && x.kind() != ShiftKind::Full)
    throw Error(ErrorKind::Precondition, "order-0 chains only fit full shifts");
  if (!x.is_irreducible()) throw Error(ErrorKind::Precondition, "markov_lower_bound needs an irreducible shift");

  const ChainLayout c = chain_layout(p, order);
  const std::size_t ns = c.states.size();
  const std::size_t q = x.alphabet_size();
  MarkovBound best;
  best.value = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> start(-1.0, 1.0);
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::vector<double> value(ns);
    for (double& v : value) v = start(rng);
    std::vector<double> logits(q);
    for (std::size_t it = 0; it < steps; ++it) {
      std::vector<double> updated(ns);
      for (std::size_t s = 0; s < ns; ++s) {
        std::vector<double> terms;
        for (std::size_t a = 0; a < q; ++a)
          if (c.next[s][a] >= 0) terms.push_back(c.reward[s][a] + value[static_cast<std::size_t>(c.next[s][a])]);
        updated[s] = log_sum_exp(terms);
      }
      const double ref = updated[0];
      double moved = 0.0;
      for (std::size_t s = 0; s < ns; ++s) {
        const double v = 0.5 * value[s] + 0.5 * (updated[s] - ref);
        moved = std::max(moved, std::abs(v - value[s]));
        value[s] = v;
      }
      if (moved < 1e-15) break;
    }
    MarkovParams params;
    params.order = order;
    params.states = c.states;
    params.transition = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(q));
    Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ns));
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<double> terms;
      for (std::size_t a = 0; a < q; ++a)
        if (c.next[s][a] >= 0) terms.push_back(c.reward[s][a] + value[static_cast<std::size_t>(c.next[s][a])]);
      const double norm = log_sum_exp(terms);
      for (std::size_t a = 0; a < q; ++a) {
        if (c.next[s][a] < 0) continue;
        const double pr = std::exp(c.reward[s][a] + value[static_cast<std::size_t>(c.next[s][a])] - norm);
        params.transition(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = pr;
        chain(static_cast<Eigen::Index>(s), c.next[s][a]) += pr;
      }
    }
    params.stationary = stationary_of(chain);
    double h = 0.0, e = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < q; ++a) {
        const double pr = params.transition(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
        if (pr <= 0.0) continue;
        const double mass = params.stationary(static_cast<Eigen::Index>(s)) * pr;
        h -= mass * std::log(pr);
        e += mass * c.reward[s][a];
      }
    }
    if (h + e > best.value) {
      best.value = h + e;
      best.entropy = h;
      best.energy = e;
      best.params = std::move(params);
      best.best_restart = r;
    }
  }
  return best;
}

}  // namespace symdyn
