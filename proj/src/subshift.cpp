#include "symdyn/subshift.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "symdyn/error.hpp"

namespace symdyn {

const char* to_string(ShiftKind kind) noexcept {
  switch (kind) {
    case ShiftKind::Full: return "full";
    case ShiftKind::SFT: return "sft";
    case ShiftKind::Sofic: return "sofic";
  }
  return "?";
}

struct Subshift::Impl {
  std::size_t alphabet = 0;
  ShiftKind kind = ShiftKind::Full;
  std::vector<std::vector<int>> matrix;
  LabeledGraph graph;
  // next[state * alphabet + label] = target graph state or -1
  std::vector<int> next;
  LanguageState all_states = 0;

  mutable std::mutex cache_mutex;
  mutable std::map<std::size_t, std::unique_ptr<WordList>> cache;
};

namespace {

std::shared_ptr<Subshift::Impl> make_impl(std::size_t alphabet, ShiftKind kind,
                                          const LabeledGraph& graph) {
  auto impl = std::make_shared<Subshift::Impl>();
  impl->alphabet = alphabet;
  impl->kind = kind;
  impl->graph = graph;
  impl->next.assign(static_cast<std::size_t>(graph.states) * alphabet, -1);
  for (const auto& e : graph.edges) {
    int& slot = impl->next[static_cast<std::size_t>(e.from) * alphabet + static_cast<std::size_t>(e.label)];
    if (slot != -1 && slot != e.to) {
      throw Error(ErrorKind::Unsupported, "labeled graph is not right-resolving at state " +
                                              std::to_string(e.from));
    }
    slot = e.to;
  }
  impl->all_states = graph.states == 64 ? ~LanguageState{0}
                                        : ((LanguageState{1} << graph.states) - 1);
  return impl;
}

std::vector<std::vector<int>> graph_adjacency(const LabeledGraph& g) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.states),
                                    std::vector<int>(static_cast<std::size_t>(g.states), 0));
  for (const auto& e : g.edges) adj[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)] = 1;
  return adj;
}

std::vector<std::vector<int>> bool_product(const std::vector<std::vector<int>>& a,
                                           const std::vector<std::vector<int>>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<int>> c(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (b[k][j]) c[i][j] = 1;
  return c;
}

}  // namespace

bool matrix_is_irreducible(const std::vector<std::vector<int>>& m) {
  const std::size_t n = m.size();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{s};
    std::size_t reached = 0;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (m[i][j] && !seen[j]) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
      }
    }
    if (reached != n) return false;
  }
  return true;
}

bool matrix_is_primitive(const std::vector<std::vector<int>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return false;
  // Wielandt: primitive iff m^((n-1)^2+1) is strictly positive.
  const std::size_t exponent = (n - 1) * (n - 1) + 1;
  std::vector<std::vector<int>> result = m, base = m;
  std::size_t e = exponent - 1;
  while (e > 0) {
    if (e & 1u) result = bool_product(result, base);
    base = bool_product(base, base);
    e >>= 1u;
  }
  for (const auto& row : result)
    for (int v : row)
      if (!v) return false;
  return true;
}

Subshift build_full_shift(std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidAlphabet, "full shift needs at least one symbol");
  if (k > Subshift::kMaxAlphabet) throw Error(ErrorKind::InvalidAlphabet, "alphabet larger than 64");
  LabeledGraph g{1, {}};
  for (std::size_t a = 0; a < k; ++a) g.edges.push_back({0, 0, static_cast<Symbol>(a)});
  auto impl = make_impl(k, ShiftKind::Full, g);
  impl->matrix.assign(k, std::vector<int>(k, 1));
  return Subshift(impl);
}

Subshift build_sft(const std::vector<std::vector<int>>& t) {
  const std::size_t k = t.size();
  if (k == 0) throw Error(ErrorKind::InvalidAlphabet, "empty transition matrix");
  if (k > Subshift::kMaxAlphabet) throw Error(ErrorKind::InvalidAlphabet, "alphabet larger than 64");
  for (const auto& row : t) {
    if (row.size() != k) throw Error(ErrorKind::InvalidAlphabet, "transition matrix is not square");
    for (int v : row)
      if (v != 0 && v != 1) throw Error(ErrorKind::InvalidAlphabet, "transition matrix must be 0/1");
  }
  for (std::size_t i = 0; i < k; ++i) {
    bool row_ok = false, col_ok = false;
    for (std::size_t j = 0; j < k; ++j) {
      row_ok |= t[i][j] == 1;
      col_ok |= t[j][i] == 1;
    }
    if (!row_ok || !col_ok) {
      throw Error(ErrorKind::DeadSymbol, "symbol " + std::to_string(i) +
                                             (row_ok ? " has no predecessor" : " has no successor"));
    }
  }
  LabeledGraph g{static_cast<int>(k), {}};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (t[i][j]) g.edges.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<Symbol>(j)});
  auto impl = make_impl(k, ShiftKind::SFT, g);
  impl->matrix = t;
  return Subshift(impl);
}

Subshift build_sofic(std::size_t alphabet, const LabeledGraph& graph) {
  if (alphabet == 0 || alphabet > Subshift::kMaxAlphabet)
    throw Error(ErrorKind::InvalidAlphabet, "alphabet size must be in 1..64");
  if (graph.states <= 0 || static_cast<std::size_t>(graph.states) > Subshift::kMaxGraphStates)
    throw Error(ErrorKind::InvalidAlphabet, "graph must have 1..64 states");
  std::vector<char> has_in(static_cast<std::size_t>(graph.states), 0),
      has_out(static_cast<std::size_t>(graph.states), 0), used(alphabet, 0);
  for (const auto& e : graph.edges) {
    if (e.from < 0 || e.from >= graph.states || e.to < 0 || e.to >= graph.states)
      throw Error(ErrorKind::InvalidAlphabet, "edge endpoint out of range");
    if (e.label < 0 || static_cast<std::size_t>(e.label) >= alphabet)
      throw Error(ErrorKind::InvalidAlphabet, "edge label out of range");
    has_out[static_cast<std::size_t>(e.from)] = 1;
    has_in[static_cast<std::size_t>(e.to)] = 1;
    used[static_cast<std::size_t>(e.label)] = 1;
  }
  for (int s = 0; s < graph.states; ++s)
    if (!has_in[static_cast<std::size_t>(s)] || !has_out[static_cast<std::size_t>(s)])
      throw Error(ErrorKind::DeadSymbol, "graph state " + std::to_string(s) + " is not essential");
  for (std::size_t a = 0; a < alphabet; ++a)
    if (!used[a]) throw Error(ErrorKind::DeadSymbol, "symbol " + std::to_string(a) + " labels no edge");
  auto impl = make_impl(alphabet, ShiftKind::Sofic, graph);
  return Subshift(impl);
}

std::size_t Subshift::alphabet_size() const noexcept { return impl_->alphabet; }
ShiftKind Subshift::kind() const noexcept { return impl_->kind; }
const std::vector<std::vector<int>>& Subshift::transition_matrix() const noexcept { return impl_->matrix; }
const LabeledGraph& Subshift::graph() const noexcept { return impl_->graph; }
LanguageState Subshift::start_state() const noexcept { return impl_->all_states; }

std::optional<LanguageState> Subshift::advance(LanguageState state, Symbol s) const noexcept {
  if (s < 0 || static_cast<std::size_t>(s) >= impl_->alphabet) return std::nullopt;
  LanguageState out = 0;
  while (state) {
    const int g = std::countr_zero(state);
    state &= state - 1;
    const int t = impl_->next[static_cast<std::size_t>(g) * impl_->alphabet + static_cast<std::size_t>(s)];
    if (t >= 0) out |= LanguageState{1} << t;
  }
  if (!out) return std::nullopt;
  return out;
}

std::optional<LanguageState> Subshift::run(LanguageState state, WordView w) const noexcept {
  for (Symbol s : w) {
    auto nxt = advance(state, s);
    if (!nxt) return std::nullopt;
    state = *nxt;
  }
  return state;
}

bool Subshift::admissible(WordView w) const noexcept { return run(start_state(), w).has_value(); }

const WordList& Subshift::words(std::size_t n) const {
  std::lock_guard<std::mutex> lock(impl_->cache_mutex);
  auto it = impl_->cache.find(n);
  if (it != impl_->cache.end()) return *it->second;
  auto list = std::make_unique<WordList>(n);
  if (n == 0) {
    list->push_back({});
  } else {
    Word w(n);
    std::vector<LanguageState> states(n + 1);
    states[0] = start_state();
    // Iterative DFS in lexicographic order.
    std::size_t depth = 0;
    w[0] = -1;
    const Symbol q = static_cast<Symbol>(impl_->alphabet);
    while (true) {
      ++w[depth];
      if (w[depth] >= q) {
        if (depth == 0) break;
        --depth;
        continue;
      }
      auto nxt = advance(states[depth], w[depth]);
      if (!nxt) continue;
      states[depth + 1] = *nxt;
      if (depth + 1 == n) {
        list->push_back(w);
      } else {
        ++depth;
        w[depth] = -1;
      }
    }
  }
  auto [pos, _] = impl_->cache.emplace(n, std::move(list));
  return *pos->second;
}

std::optional<std::size_t> Subshift::specification_gap(std::size_t max_gap,
                                                       std::size_t word_len_bound) const {
  std::set<LanguageState> after_u;
  std::vector<const WordList*> vs;
  for (std::size_t l = 1; l <= word_len_bound; ++l) {
    const WordList& ws = words(l);
    vs.push_back(&ws);
    for (std::size_t i = 0; i < ws.size(); ++i) after_u.insert(*run(start_state(), ws[i]));
  }
  for (std::size_t p = 0; p <= max_gap; ++p) {
    bool all_ok = true;
    for (LanguageState su : after_u) {
      std::set<LanguageState> frontier{su};
      for (std::size_t step = 0; step < p; ++step) {
        std::set<LanguageState> nxt;
        for (LanguageState s : frontier)
          for (std::size_t a = 0; a < impl_->alphabet; ++a)
            if (auto t = advance(s, static_cast<Symbol>(a))) nxt.insert(*t);
        frontier = std::move(nxt);
      }
      for (const WordList* ws : vs) {
        for (std::size_t i = 0; i < ws->size() && all_ok; ++i) {
          bool bridged = false;
          for (LanguageState s : frontier) {
            if (run(s, (*ws)[i])) {
              bridged = true;
              break;
            }
          }
          all_ok = bridged;
        }
        if (!all_ok) break;
      }
      if (!all_ok) break;
    }
    if (all_ok) return p;
  }
  return std::nullopt;
}

Point Subshift::canonical_tail(WordView w) const {
  auto s0 = run(start_state(), w);
  if (!s0) throw Error(ErrorKind::Domain, "canonical_tail: word is not admissible");
  std::map<LanguageState, std::size_t> seen;
  Word symbols;
  LanguageState s = *s0;
  while (true) {
    auto [it, fresh] = seen.emplace(s, symbols.size());
    if (!fresh) {
      const std::size_t j = it->second;
      return Point{slice(symbols, 0, j), slice(symbols, j, symbols.size() - j)};
    }
    // Essential presentations never strand a nonempty state set, so the
    // minimal next symbol always extends to an infinite path.
    for (std::size_t a = 0; a < impl_->alphabet; ++a) {
      if (auto t = advance(s, static_cast<Symbol>(a))) {
        symbols.push_back(static_cast<Symbol>(a));
        s = *t;
        break;
      }
    }
  }
}

Point Subshift::canonical_point(WordView w) const {
  Point tail = canonical_tail(w);
  return Point{concat(w, tail.prefix), tail.cycle};
}

bool Subshift::is_irreducible() const {
  if (impl_->kind == ShiftKind::Full) return true;
  if (impl_->kind == ShiftKind::SFT) return matrix_is_irreducible(impl_->matrix);
  return matrix_is_irreducible(graph_adjacency(impl_->graph));
}

bool Subshift::is_primitive() const {
  if (impl_->kind == ShiftKind::Full) return true;
  if (impl_->kind == ShiftKind::SFT) return matrix_is_primitive(impl_->matrix);
  return matrix_is_primitive(graph_adjacency(impl_->graph));
}

bool Subshift::same_as(const Subshift& other) const noexcept {
  if (impl_ == other.impl_) return true;
  const Impl& a = *impl_;
  const Impl& b = *other.impl_;
  return a.alphabet == b.alphabet && a.kind == b.kind && a.graph.states == b.graph.states && a.next == b.next;
}

std::string Subshift::describe() const {
  std::ostringstream os;
  os << to_string(impl_->kind) << "(" << impl_->alphabet;
  if (impl_->kind == ShiftKind::Sofic) os << ", states=" << impl_->graph.states;
  os << ")";
  return os.str();
}

HigherBlock higher_block(const Subshift& shift, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Domain, "higher_block: k must be positive");
  if (shift.kind() == ShiftKind::Sofic)
    throw Error(ErrorKind::Unsupported, "higher_block: sofic presentations are not recoded");
  const WordList& blocks = shift.words(k);
  const std::size_t m = blocks.size();
  if (m > Subshift::kMaxAlphabet)
    throw Error(ErrorKind::InvalidAlphabet, "higher_block: more than 64 blocks");
  std::vector<std::vector<int>> t(m, std::vector<int>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      WordView u = blocks[i], v = blocks[j];
      if (!equal(u.subspan(1), v.first(k - 1))) continue;
      Word joined = concat(u, v.subspan(k - 1));
      t[i][j] = shift.admissible(joined) ? 1 : 0;
    }
  }
  return HigherBlock{build_sft(t), blocks};
}

}  // namespace symdyn
