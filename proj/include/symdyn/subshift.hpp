#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symdyn/word.hpp"

namespace symdyn {

enum class ShiftKind { Full, SFT, Sofic };

const char* to_string(ShiftKind kind) noexcept;

struct LabeledEdge {
  int from = 0;
  int to = 0;
  Symbol label = 0;
};

struct LabeledGraph {
  int states = 0;
  std::vector<LabeledEdge> edges;
};

/// Set of presentation-graph states consistent with a word read so far.
/// Bit i set means graph state i is a possible current state.
using LanguageState = std::uint64_t;

/// Immutable one-sided subshift. Every kind is driven by a right-resolving
/// labeled graph (full: one state; SFT: states are symbols), so admissibility is
/// subset tracking throughout. Copies share the same language cache.
class Subshift {
 public:
  static constexpr std::size_t kMaxAlphabet = 64;
  static constexpr std::size_t kMaxGraphStates = 64;

  std::size_t alphabet_size() const noexcept;
  ShiftKind kind() const noexcept;
  /// Present only for SFT kind (full shifts report the all-ones matrix).
  const std::vector<std::vector<int>>& transition_matrix() const noexcept;
  const LabeledGraph& graph() const noexcept;

  LanguageState start_state() const noexcept;
  /// Empty result means the extended word is not admissible.
  std::optional<LanguageState> advance(LanguageState state, Symbol s) const noexcept;
  std::optional<LanguageState> run(LanguageState state, WordView w) const noexcept;

  bool admissible(WordView w) const noexcept;
  const WordList& words(std::size_t n) const;
  std::size_t count(std::size_t n) const { return words(n).size(); }

  /// Least p <= max_gap bridging every ordered pair of words of length
  /// 1..word_len_bound; empty when no such p exists in range.
  std::optional<std::size_t> specification_gap(std::size_t max_gap,
                                               std::size_t word_len_bound = 4) const;

  /// Lexicographically minimal admissible continuation of `w`, as a point whose
  /// prefix does not yet include `w`.
  Point canonical_tail(WordView w) const;
  /// `w` followed by its canonical tail.
  Point canonical_point(WordView w) const;

  bool is_irreducible() const;
  /// Irreducible with period one (graph-level, via the presentation).
  bool is_primitive() const;

  /// Identity for caching and cross-object checks.
  const void* id() const noexcept { return impl_.get(); }
  /// Same kind, alphabet and presentation.
  bool same_as(const Subshift& other) const noexcept;

  std::string describe() const;

  struct Impl;

 private:
  explicit Subshift(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend Subshift build_full_shift(std::size_t);
  friend Subshift build_sft(const std::vector<std::vector<int>>&);
  friend Subshift build_sofic(std::size_t, const LabeledGraph&);
};

Subshift build_full_shift(std::size_t alphabet_size);
Subshift build_sft(const std::vector<std::vector<int>>& transition);
/// The graph must be right-resolving and essential (every state has an incoming
/// and an outgoing edge), and every symbol must label some edge.
Subshift build_sofic(std::size_t alphabet_size, const LabeledGraph& graph);

/// k-block recoding of a full shift or SFT. Block symbols index `blocks`,
/// which is B_k of the source in lexicographic order.
struct HigherBlock {
  Subshift shift;
  WordList blocks;
};
HigherBlock higher_block(const Subshift& shift, std::size_t k);

/// Boolean primitivity test on a 0/1 matrix (Wielandt bound).
bool matrix_is_primitive(const std::vector<std::vector<int>>& m);
bool matrix_is_irreducible(const std::vector<std::vector<int>>& m);

}  // namespace symdyn
