#include "symdyn/factor_map.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>

#include "symdyn/error.hpp"

namespace symdyn {

struct FactorMap::Cache {
  std::mutex mutex;
  std::unordered_map<Word, std::uint64_t, WordHash> counts;
};

FactorMap::FactorMap(Subshift domain, Subshift codomain, std::vector<Symbol> symbol_map,
                     std::size_t verify_length)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      symbol_map_(std::move(symbol_map)),
      cache_(std::make_shared<Cache>()) {
  if (symbol_map_.size() != domain_.alphabet_size())
    throw Error(ErrorKind::Domain, "symbol map must cover the domain alphabet");
  fibers_.assign(codomain_.alphabet_size(), {});
  for (std::size_t x = 0; x < symbol_map_.size(); ++x) {
    const Symbol y = symbol_map_[x];
    if (y < 0 || static_cast<std::size_t>(y) >= codomain_.alphabet_size())
      throw Error(ErrorKind::Domain, "symbol map sends " + std::to_string(x) + " outside the codomain");
    fibers_[static_cast<std::size_t>(y)].push_back(static_cast<Symbol>(x));
  }
  // Domain words must land in the codomain language; cap the scan at a million words.
  for (std::size_t n = 1; n <= verify_length; ++n) {
    if (domain_.count(n) > 1000000) break;
    const WordList& xs = domain_.words(n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!codomain_.admissible(image(xs[i])))
        throw Error(ErrorKind::Domain, "image of " + format_word(xs[i], domain_.alphabet_size()) +
                                           " is not admissible in the codomain");
    }
  }
  for (std::size_t n = 1; n <= verify_length; ++n) {
    if (codomain_.count(n) > 1000000) break;
    const WordList& ys = codomain_.words(n);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (preimage_count(ys[i]) == 0)
        throw Error(ErrorKind::Domain, "map is not onto: no preimage of " +
                                           format_word(ys[i], codomain_.alphabet_size()));
    }
  }
}

Word FactorMap::image(WordView w) const {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = image(w[i]);
  return out;
}

std::vector<Word> FactorMap::preimage_cylinders(WordView y) const {
  if (!codomain_.admissible(y))
    throw Error(ErrorKind::Domain, "preimage_cylinders: word is not admissible in the codomain");
  std::vector<Word> out;
  const std::size_t n = y.size();
  if (n == 0) return {Word{}};
  Word x(n);
  std::vector<LanguageState> states(n + 1);
  std::vector<std::size_t> choice(n, 0);
  states[0] = domain_.start_state();
  std::size_t depth = 0;
  choice[0] = 0;
  while (true) {
    const auto& fib = fibers_[static_cast<std::size_t>(y[depth])];
    if (choice[depth] >= fib.size()) {
      if (depth == 0) break;
      --depth;
      ++choice[depth];
      continue;
    }
    x[depth] = fib[choice[depth]];
    auto nxt = domain_.advance(states[depth], x[depth]);
    if (!nxt) {
      ++choice[depth];
      continue;
    }
    states[depth + 1] = *nxt;
    if (depth + 1 == n) {
      out.push_back(x);
      ++choice[depth];
    } else {
      ++depth;
      choice[depth] = 0;
    }
  }
  return out;
}

std::uint64_t FactorMap::preimage_count(WordView y) const {
  Word key(y.begin(), y.end());
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->counts.find(key);
    if (it != cache_->counts.end()) return it->second;
  }
  std::map<LanguageState, std::uint64_t> layer{{domain_.start_state(), 1}};
  for (Symbol ys : y) {
    if (ys < 0 || static_cast<std::size_t>(ys) >= fibers_.size())
      throw Error(ErrorKind::Domain, "preimage_count: symbol outside the codomain alphabet");
    std::map<LanguageState, std::uint64_t> next;
    for (const auto& [state, cnt] : layer) {
      for (Symbol x : fibers_[static_cast<std::size_t>(ys)]) {
        if (auto t = domain_.advance(state, x)) {
          std::uint64_t& slot = next[*t];
          if (slot > std::numeric_limits<std::uint64_t>::max() - cnt)
            throw Error(ErrorKind::Budget, "preimage count overflows 64 bits");
          slot += cnt;
        }
      }
    }
    layer = std::move(next);
  }
  std::uint64_t total = 0;
  for (const auto& [_, cnt] : layer) total += cnt;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->counts.emplace(std::move(key), total);
  return total;
}

ConditionAReport check_condition_A(const FactorMap& map, std::size_t n_max) {
  if (n_max < 2) throw Error(ErrorKind::Precondition, "check_condition_A needs n_max >= 2");
  ConditionAReport rep;
  rep.n_max = n_max;
  rep.per_length_D.assign(n_max + 1, 1.0);
  rep.best_D = std::numeric_limits<double>::infinity();
  const Subshift& y_shift = map.codomain();
  for (std::size_t len = 2; len <= n_max; ++len) {
    double d_len = std::numeric_limits<double>::infinity();
    const WordList& ys = y_shift.words(len);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      WordView y = ys[i];
      const double whole = static_cast<double>(map.preimage_count(y));
      for (std::size_t split = 1; split < len; ++split) {
        const double parts = static_cast<double>(map.preimage_count(y.first(split))) *
                             static_cast<double>(map.preimage_count(y.subspan(split)));
        const double ratio = whole / parts;
        if (ratio < d_len) d_len = ratio;
        if (ratio < rep.best_D) {
          rep.best_D = ratio;
          rep.witness.assign(y.begin(), y.end());
          rep.witness_split = split;
        }
      }
    }
    rep.per_length_D[len] = d_len;
  }
  rep.best_D = std::min(rep.best_D, 1.0);
  rep.holds_up_to_n_max = rep.best_D > 0.0;
  if (n_max >= 4) {
    const std::size_t half = (n_max + 1) / 2;
    rep.decay_ratio = rep.per_length_D[n_max] / rep.per_length_D[half];
    rep.trend_decaying = rep.decay_ratio < 0.8;
  }
  return rep;
}

}  // namespace symdyn
