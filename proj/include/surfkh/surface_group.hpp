#pragma once

// Fundamental group of the closed orientable genus-g surface
//   < a1, b1, ..., ag, bg | a1 b1 A1 B1 ... ag bg Ag Bg >
// (uppercase = inverse), its word and conjugacy problems, and the grading
// group generated by unoriented free loop classes with the contractible class
// set to zero.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "surfkh/errors.hpp"

namespace surfkh {

// +k is generator k, -k its inverse; a_i = 2i-1, b_i = 2i.
using Letter = int;

inline constexpr Letter gen_a(int i) { return 2 * i - 1; }
inline constexpr Letter gen_b(int i) { return 2 * i; }
inline constexpr int generator_of(Letter x) { return x < 0 ? -x : x; }
inline constexpr int surface_index(Letter x) { return (generator_of(x) + 1) / 2; }

struct SurfaceWord {
  int genus = 0;
  std::vector<Letter> letters;

  bool empty() const noexcept { return letters.empty(); }
  std::size_t size() const noexcept { return letters.size(); }
  friend bool operator==(const SurfaceWord&, const SurfaceWord&) = default;
};

inline void check_word(const SurfaceWord& w) {
  if (w.genus < 0) throw format_error("negative genus");
  for (Letter x : w.letters) {
    if (x == 0 || surface_index(x) > w.genus) {
      throw format_error("generator index out of range for genus " + std::to_string(w.genus));
    }
  }
}

inline std::string format_letter(Letter x) {
  const int k = generator_of(x);
  const bool is_a = (k % 2) == 1;
  std::string s(1, is_a ? 'a' : 'b');
  if (x < 0) s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s + std::to_string((k + 1) / 2);
}

inline std::string format_letters(const std::vector<Letter>& letters) {
  std::string out;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) out += ' ';
    out += format_letter(letters[i]);
  }
  return out;
}

inline std::string format_word(const SurfaceWord& w) { return format_letters(w.letters); }

// Tokens "a1", "B2", ... separated by whitespace. Empty text is the trivial word.
inline SurfaceWord parse_word(std::string_view text, int genus) {
  SurfaceWord w{genus, {}};
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const char c = text[i];
    if (c != 'a' && c != 'b' && c != 'A' && c != 'B') {
      throw format_error("bad generator token near '" + std::string(text.substr(i, 4)) + "'");
    }
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1) throw format_error("generator '" + std::string(1, c) + "' lacks an index");
    const int idx = std::stoi(std::string(text.substr(i + 1, j - i - 1)));
    if (idx < 1 || idx > genus) {
      throw format_error("generator " + std::string(text.substr(i, j - i)) +
                         " out of range for genus " + std::to_string(genus));
    }
    Letter x = (c == 'a' || c == 'A') ? gen_a(idx) : gen_b(idx);
    if (c == 'A' || c == 'B') x = -x;
    w.letters.push_back(x);
    i = j;
  }
  return w;
}

inline SurfaceWord free_reduce(const SurfaceWord& w) {
  check_word(w);
  SurfaceWord out{w.genus, {}};
  out.letters.reserve(w.letters.size());
  for (Letter x : w.letters) {
    if (!out.letters.empty() && out.letters.back() == -x) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(x);
    }
  }
  return out;
}

inline SurfaceWord inverse(const SurfaceWord& w) {
  SurfaceWord out{w.genus, {}};
  out.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(-*it);
  return out;
}

inline SurfaceWord concat(const SurfaceWord& x, const SurfaceWord& y) {
  if (x.genus != y.genus) throw domain_error("word genus mismatch");
  SurfaceWord out = x;
  out.letters.insert(out.letters.end(), y.letters.begin(), y.letters.end());
  return out;
}

// Exponent sums of a1, b1, a2, b2, ...
inline std::vector<long> abelianization(const SurfaceWord& w) {
  std::vector<long> v(2 * static_cast<std::size_t>(w.genus), 0);
  for (Letter x : w.letters) v[generator_of(x) - 1] += (x > 0 ? 1 : -1);
  return v;
}

namespace detail {

// Order on letters used for "lexicographically least": a1 < A1 < b1 < B1 < a2 ...
inline int letter_rank(Letter x) { return 2 * (generator_of(x) - 1) + (x < 0 ? 1 : 0); }

inline bool letters_less(const std::vector<Letter>& x, const std::vector<Letter>& y) {
  return std::lexicographical_compare(
      x.begin(), x.end(), y.begin(), y.end(),
      [](Letter p, Letter q) { return letter_rank(p) < letter_rank(q); });
}

// The two cyclic relator words (R and R^-1) and an index from each ordered
// letter pair to its unique position. For the standard relator every
// two-letter subword occurs once among all cyclic permutations of R^{+-1}.
struct RelatorTable {
  int genus = 0;
  int length = 0;  // 4g
  std::vector<Letter> cyc[2];
  std::map<std::pair<Letter, Letter>, std::pair<int, int>> pair_pos;

  explicit RelatorTable(int g) : genus(g), length(4 * g) {
    for (int i = 1; i <= g; ++i) {
      cyc[0].insert(cyc[0].end(), {gen_a(i), gen_b(i), -gen_a(i), -gen_b(i)});
    }
    for (auto it = cyc[0].rbegin(); it != cyc[0].rend(); ++it) cyc[1].push_back(-*it);
    for (int c = 0; c < 2; ++c) {
      for (int p = 0; p < length; ++p) {
        pair_pos[{cyc[c][p], cyc[c][(p + 1) % length]}] = {c, p};
      }
    }
  }

  Letter at(int c, int p) const { return cyc[c][((p % length) + length) % length]; }
};

inline const RelatorTable& relator_table(int genus) {
  static std::mutex mu;
  static std::map<int, RelatorTable> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto it = tables.find(genus);
  if (it == tables.end()) it = tables.emplace(genus, RelatorTable(genus)).first;
  return it->second;
}

inline void free_reduce_in_place(std::vector<Letter>& w) {
  std::vector<Letter> out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  w.swap(out);
}

inline void cyclic_reduce_in_place(std::vector<Letter>& w) {
  free_reduce_in_place(w);
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  w = std::vector<Letter>(w.begin() + static_cast<long>(lo), w.begin() + static_cast<long>(hi));
}

// Replacement for the first `run` letters of relator window (c, p): the
// inverse of the complementary window.
inline std::vector<Letter> complement_inverse(const RelatorTable& t, int c, int p, int run) {
  std::vector<Letter> repl;
  for (int k = t.length - 1; k >= run; --k) repl.push_back(-t.at(c, p + k));
  return repl;
}

// One Dehn step on a linear word. Returns false when no subword longer than
// half a relator remains.
inline bool dehn_step_linear(std::vector<Letter>& w, const RelatorTable& t) {
  const int half = 2 * t.genus;
  const std::size_t n = w.size();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    auto hit = t.pair_pos.find({w[j], w[j + 1]});
    if (hit == t.pair_pos.end()) continue;
    const auto [c, p] = hit->second;
    int run = 2;
    while (j + run < n && run < t.length && w[j + run] == t.at(c, p + run)) ++run;
    if (run > half) {
      std::vector<Letter> out(w.begin(), w.begin() + static_cast<long>(j));
      auto repl = complement_inverse(t, c, p, run);
      out.insert(out.end(), repl.begin(), repl.end());
      out.insert(out.end(), w.begin() + static_cast<long>(j + run), w.end());
      free_reduce_in_place(out);
      w.swap(out);
      return true;
    }
  }
  return false;
}

inline std::vector<Letter> rotated(const std::vector<Letter>& w, std::size_t start) {
  std::vector<Letter> out;
  out.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out.push_back(w[(start + k) % w.size()]);
  return out;
}

// Maximal relator run starting at cyclic position j, capped at min(|w|, 4g).
struct Run {
  int c = 0, p = 0, length = 0;
};

inline Run cyclic_run_at(const std::vector<Letter>& w, std::size_t j, const RelatorTable& t) {
  const std::size_t m = w.size();
  if (m < 2) return {};
  auto hit = t.pair_pos.find({w[j], w[(j + 1) % m]});
  if (hit == t.pair_pos.end()) return {};
  const auto [c, p] = hit->second;
  int run = 2;
  const int cap = static_cast<int>(std::min<std::size_t>(m, static_cast<std::size_t>(t.length)));
  while (run < cap && w[(j + run) % m] == t.at(c, p + run)) ++run;
  return {c, p, run};
}

inline bool dehn_step_cyclic(std::vector<Letter>& w, const RelatorTable& t) {
  const int half = 2 * t.genus;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Run r = cyclic_run_at(w, j, t);
    if (r.length > half) {
      auto rot = rotated(w, j);
      std::vector<Letter> out = complement_inverse(t, r.c, r.p, r.length);
      out.insert(out.end(), rot.begin() + r.length, rot.end());
      cyclic_reduce_in_place(out);
      w.swap(out);
      return true;
    }
  }
  return false;
}

inline void cyclic_dehn_reduce(std::vector<Letter>& w, const RelatorTable& t) {
  cyclic_reduce_in_place(w);
  while (dehn_step_cyclic(w, t)) {
  }
}

inline std::vector<Letter> least_rotation(const std::vector<Letter>& w) {
  std::vector<Letter> best = w;
  for (std::size_t s = 1; s < w.size(); ++s) {
    auto r = rotated(w, s);
    if (letters_less(r, best)) best = std::move(r);
  }
  return best;
}

inline std::vector<Letter> inverted(const std::vector<Letter>& w) {
  std::vector<Letter> out(w.rbegin(), w.rend());
  for (Letter& x : out) x = -x;
  return out;
}

// Length-preserving neighbours of a cyclically Dehn-reduced word: every
// exactly-half relator window replaced by its complementary half, and every
// corridor (a ring of relator cells each contributing 2g-1 letters) replaced
// by its opposite side.
inline std::vector<std::vector<Letter>> half_relator_moves(const std::vector<Letter>& w,
                                                           const RelatorTable& t) {
  std::vector<std::vector<Letter>> out;
  const int half = 2 * t.genus;
  const std::size_t m = w.size();
  for (std::size_t j = 0; j < m; ++j) {
    const Run r = cyclic_run_at(w, j, t);
    if (r.length < half) continue;
    auto rot = rotated(w, j);
    std::vector<Letter> next = complement_inverse(t, r.c, r.p, half);
    next.insert(next.end(), rot.begin() + half, rot.end());
    cyclic_reduce_in_place(next);
    out.push_back(std::move(next));
  }
  const std::size_t seg = static_cast<std::size_t>(half - 1);
  if (seg >= 2 && m > 0 && m % seg == 0) {
    const std::size_t k = m / seg;
    for (std::size_t off = 0; off < seg; ++off) {
      std::vector<Run> cells;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        const std::size_t start = off + i * seg;
        Run r = cyclic_run_at(w, start % m, t);
        if (r.length < static_cast<int>(seg)) ok = false;
        cells.push_back(r);
      }
      if (!ok) continue;
      // consecutive cells share the rung edge leaving each junction
      for (std::size_t i = 0; i < k && ok; ++i) {
        const Run& cur = cells[i];
        const Run& prev = cells[(i + k - 1) % k];
        const Letter rung_prev = t.at(prev.c, prev.p + static_cast<int>(seg));
        if (t.at(cur.c, cur.p - 1) != -rung_prev) ok = false;
      }
      if (!ok) continue;
      std::vector<Letter> other;
      for (const Run& r : cells) {
        // inner side is the inverse of the window strictly between both rungs
        std::vector<Letter> inner_inv;
        for (int q = static_cast<int>(seg) + 1; q <= t.length - 2; ++q) inner_inv.push_back(t.at(r.c, r.p + q));
        auto inner = inverted(inner_inv);
        other.insert(other.end(), inner.begin(), inner.end());
      }
      cyclic_reduce_in_place(other);
      out.push_back(std::move(other));
    }
  }
  return out;
}

struct CanonicalResult {
  std::vector<Letter> word;
  bool inconclusive = false;
};

inline CanonicalResult canonical_conjugacy_rep(std::vector<Letter> w, const RelatorTable& t,
                                               std::size_t max_states = 20000) {
  cyclic_dehn_reduce(w, t);
  bool inconclusive = false;
  for (;;) {
    std::set<std::vector<Letter>, decltype(&letters_less)> seen(&letters_less);
    std::deque<std::vector<Letter>> queue;
    const std::size_t len = w.size();
    auto start = least_rotation(w);
    seen.insert(start);
    queue.push_back(start);
    std::vector<Letter> shorter;
    bool found_shorter = false;
    while (!queue.empty() && !found_shorter) {
      auto cur = std::move(queue.front());
      queue.pop_front();
      for (auto& nb : half_relator_moves(cur, t)) {
        cyclic_dehn_reduce(nb, t);
        if (nb.size() < len) {
          shorter = std::move(nb);
          found_shorter = true;
          break;
        }
        auto key = least_rotation(nb);
        if (seen.insert(key).second) {
          if (seen.size() >= max_states) {
            inconclusive = true;
            queue.clear();
            break;
          }
          queue.push_back(std::move(key));
        }
      }
    }
    if (found_shorter) {
      w = std::move(shorter);
      continue;
    }
    std::vector<Letter> best = *seen.begin();
    for (const auto& s : seen) {
      auto inv = least_rotation(inverted(s));
      if (letters_less(inv, best)) best = inv;
    }
    return {best, inconclusive};
  }
}

}  // namespace detail

inline bool is_contractible(const SurfaceWord& w) {
  check_word(w);
  if (w.genus == 0) {
    throw unsupported_error("genus 0 has no surface group model; treat loops as contractible");
  }
  auto ab = abelianization(w);
  if (std::any_of(ab.begin(), ab.end(), [](long v) { return v != 0; })) return false;
  if (w.genus == 1) return true;
  const auto& t = detail::relator_table(w.genus);
  std::vector<Letter> letters = w.letters;
  detail::free_reduce_in_place(letters);
  while (detail::dehn_step_linear(letters, t)) {
  }
  return letters.empty();
}

// Unoriented free homotopy class of a loop, stored as its canonical word.
struct LoopClass {
  int genus = 0;
  std::vector<Letter> canonical;
  // set when the bounded conjugacy search hit its cap
  bool inconclusive = false;

  bool is_contractible() const noexcept { return canonical.empty(); }
  SurfaceWord canonical_word() const { return {genus, canonical}; }

  static LoopClass contractible(int genus) { return {genus, {}, false}; }

  friend bool operator==(const LoopClass& x, const LoopClass& y) {
    return x.genus == y.genus && x.canonical == y.canonical;
  }
  friend bool operator<(const LoopClass& x, const LoopClass& y) {
    if (x.genus != y.genus) return x.genus < y.genus;
    if (x.canonical.size() != y.canonical.size()) return x.canonical.size() < y.canonical.size();
    return detail::letters_less(x.canonical, y.canonical);
  }
};

inline std::string format_class(const LoopClass& c) { return "[" + format_letters(c.canonical) + "]"; }

inline LoopClass loop_class(const SurfaceWord& w) {
  check_word(w);
  if (w.genus == 0) return LoopClass::contractible(0);
  if (w.genus == 1) {
    auto ab = abelianization(w);
    long p = ab[0], q = ab[1];
    if (p < 0 || (p == 0 && q < 0)) {
      p = -p;
      q = -q;
    }
    LoopClass c{1, {}, false};
    for (long i = 0; i < std::labs(p); ++i) c.canonical.push_back(p > 0 ? gen_a(1) : -gen_a(1));
    for (long i = 0; i < std::labs(q); ++i) c.canonical.push_back(q > 0 ? gen_b(1) : -gen_b(1));
    return c;
  }
  auto res = detail::canonical_conjugacy_rep(w.letters, detail::relator_table(w.genus));
  return {w.genus, std::move(res.word), res.inconclusive};
}

// Element of the grading group: formal integer combination of
// non-contractible unoriented loop classes.
class HGradingElement {
 public:
  explicit HGradingElement(int genus = 0) : genus_(genus) {}

  static HGradingElement of(const LoopClass& c, long coefficient = 1) {
    HGradingElement h(c.genus);
    h.add_term(c, coefficient);
    return h;
  }

  int genus() const noexcept { return genus_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<LoopClass, long>& terms() const noexcept { return terms_; }

  void add_term(const LoopClass& c, long coefficient) {
    if (c.genus != genus_) throw domain_error("grading genus mismatch");
    if (c.is_contractible() || coefficient == 0) return;
    auto [it, inserted] = terms_.emplace(c, coefficient);
    if (!inserted) {
      it->second += coefficient;
      if (it->second == 0) terms_.erase(it);
    }
  }

  HGradingElement& operator+=(const HGradingElement& o) {
    if (o.genus_ != genus_) throw domain_error("grading genus mismatch");
    for (const auto& [c, k] : o.terms_) add_term(c, k);
    return *this;
  }

  friend HGradingElement operator+(HGradingElement x, const HGradingElement& y) { return x += y; }
  friend HGradingElement operator*(long k, const HGradingElement& x) {
    HGradingElement out(x.genus_);
    if (k == 0) return out;
    for (const auto& [c, v] : x.terms_) out.terms_.emplace(c, k * v);
    return out;
  }
  friend HGradingElement operator-(const HGradingElement& x) { return -1 * x; }

  friend bool operator==(const HGradingElement& x, const HGradingElement& y) {
    return x.genus_ == y.genus_ && x.terms_ == y.terms_;
  }
  friend bool operator<(const HGradingElement& x, const HGradingElement& y) {
    if (x.genus_ != y.genus_) return x.genus_ < y.genus_;
    return x.terms_ < y.terms_;
  }

  // "0" or e.g. "1*[a1] + -2*[b1]"
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [c, k] : terms_) {
      if (!s.empty()) s += " + ";
      s += std::to_string(k) + "*" + format_class(c);
    }
    return s;
  }

 private:
  int genus_;
  std::map<LoopClass, long> terms_;
};

inline HGradingElement h_add(const HGradingElement& x, const HGradingElement& y) { return x + y; }
inline HGradingElement h_scale(long k, const HGradingElement& x) { return k * x; }

}  // namespace surfkh
