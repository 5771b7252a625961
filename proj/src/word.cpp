#include "symdyn/word.hpp"

#include <algorithm>
#include <sstream>

namespace symdyn {

void WordList::push_back(WordView w) {
  if (length_ == 0) {
    has_empty_ = true;
    return;
  }
  flat_.insert(flat_.end(), w.begin(), w.end());
}

std::size_t WordList::index_of(WordView w) const noexcept {
  const std::size_t n = size();
  if (w.size() != length_) return n;
  if (length_ == 0) return has_empty_ ? 0 : n;
  std::size_t lo = 0, hi = n;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less((*this)[mid], w)) lo = mid + 1;
    else hi = mid;
  }
  return lo < n && equal((*this)[lo], w) ? lo : n;
}

std::vector<Word> WordList::to_vector() const {
  std::vector<Word> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back((*this)[i].begin(), (*this)[i].end());
  return out;
}

Word Point::take(std::size_t n) const {
  Word out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  return out;
}

Point Point::shifted(std::size_t k) const {
  if (k <= prefix.size()) {
    return Point{Word(prefix.begin() + static_cast<std::ptrdiff_t>(k), prefix.end()), cycle};
  }
  const std::size_t r = (k - prefix.size()) % cycle.size();
  Word rotated(cycle.begin() + static_cast<std::ptrdiff_t>(r), cycle.end());
  rotated.insert(rotated.end(), cycle.begin(), cycle.begin() + static_cast<std::ptrdiff_t>(r));
  return Point{{}, rotated};
}

Word concat(WordView a, WordView b) {
  Word out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word slice(WordView w, std::size_t begin, std::size_t count) {
  return Word(w.begin() + static_cast<std::ptrdiff_t>(begin),
              w.begin() + static_cast<std::ptrdiff_t>(begin + count));
}

bool lex_less(WordView a, WordView b) noexcept {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool equal(WordView a, WordView b) noexcept {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::string format_word(WordView w, std::size_t alphabet_size) {
  std::string out;
  if (alphabet_size <= 26) {
    for (Symbol s : w) out.push_back(static_cast<char>('a' + s));
    return out;
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? " " : "") << w[i];
  return os.str();
}

std::string format_point(const Point& p, std::size_t alphabet_size) {
  return format_word(p.prefix, alphabet_size) + "(" + format_word(p.cycle, alphabet_size) + ")^inf";
}

std::uint64_t encode(WordView w, std::size_t alphabet_size) noexcept {
  std::uint64_t code = 0;
  for (Symbol s : w) code = code * alphabet_size + static_cast<std::uint64_t>(s);
  return code;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Symbol s : w) {
    h ^= static_cast<std::size_t>(s) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace symdyn
