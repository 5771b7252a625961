#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace symdyn {

using Symbol = int;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

/// Dense, lexicographically ordered list of equal-length words.
class WordList {
 public:
  WordList() = default;
  explicit WordList(std::size_t length) : length_(length) {}

  std::size_t length() const noexcept { return length_; }
  std::size_t size() const noexcept {
    return length_ == 0 ? (has_empty_ ? 1 : 0) : flat_.size() / length_;
  }
  bool empty() const noexcept { return size() == 0; }

  WordView operator[](std::size_t i) const noexcept {
    return WordView(flat_.data() + i * length_, length_);
  }

  void push_back(WordView w);

  /// Index of `w` in the list, or size() when absent. Relies on sorted order.
  std::size_t index_of(WordView w) const noexcept;
  bool contains(WordView w) const noexcept { return index_of(w) != size(); }

  std::vector<Word> to_vector() const;

 private:
  std::size_t length_ = 0;
  bool has_empty_ = false;
  std::vector<Symbol> flat_;
};

/// Eventually periodic sequence `prefix · cycle^∞`. The cycle is never empty.
struct Point {
  Word prefix;
  Word cycle;

  Symbol at(std::size_t i) const noexcept {
    return i < prefix.size() ? prefix[i] : cycle[(i - prefix.size()) % cycle.size()];
  }
  Word take(std::size_t n) const;
  Point shifted(std::size_t k) const;
  /// Index into the finite description: positions >= prefix.size() fold onto the cycle.
  std::size_t phase(std::size_t i) const noexcept {
    return i < prefix.size() ? i : prefix.size() + (i - prefix.size()) % cycle.size();
  }
  std::size_t phase_count() const noexcept { return prefix.size() + cycle.size(); }
  std::size_t next_phase(std::size_t phase) const noexcept {
    return phase + 1 < phase_count() ? phase + 1 : prefix.size();
  }
  bool operator==(const Point&) const = default;
};

Word concat(WordView a, WordView b);
Word slice(WordView w, std::size_t begin, std::size_t count);
bool lex_less(WordView a, WordView b) noexcept;
bool equal(WordView a, WordView b) noexcept;

/// Renders symbols with single-letter names when the alphabet allows it ("abc"),
/// otherwise space separated integers.
std::string format_word(WordView w, std::size_t alphabet_size);
std::string format_point(const Point& p, std::size_t alphabet_size);

/// Radix encoding used for dense tables over the full product alphabet.
std::uint64_t encode(WordView w, std::size_t alphabet_size) noexcept;

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

}  // namespace symdyn
