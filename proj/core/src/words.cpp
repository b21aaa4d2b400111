#include "cubsc/words.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace cubsc {

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int x : w) {
    if (x == 0) throw std::invalid_argument("zero letter");
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

Word cyclic_reduce(const Word& w) {
  Word r = free_reduce(w);
  std::size_t a = 0, b = r.size();
  while (b - a >= 2 && r[a] == -r[b - 1]) {
    ++a;
    --b;
  }
  return Word(r.begin() + a, r.begin() + b);
}

Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
  return out;
}

bool is_reduced(const Word& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == -w[i + 1]) return false;
  return true;
}

bool is_cyclically_reduced(const Word& w) {
  if (!is_reduced(w)) return false;
  return w.size() < 2 || w.front() != -w.back();
}

Word rotate_word(const Word& w, std::size_t s) {
  if (w.empty()) return w;
  s %= w.size();
  Word out(w.begin() + s, w.end());
  out.insert(out.end(), w.begin(), w.begin() + s);
  return out;
}

int periodic_letter(const Word& w, std::size_t i) { return w[i % w.size()]; }

std::vector<std::size_t> rotation_symmetries(const Word& w) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < std::max<std::size_t>(w.size(), 1); ++s)
    if (rotate_word(w, s) == w) out.push_back(s);
  return out;
}

namespace {

// Guest line as placed: forward uses guest as-is, reversed uses the
// reverse-inverse word (reading the same line the other way).
int placed_letter(const Word& guest, bool reversed, std::size_t i) {
  if (!reversed) return periodic_letter(guest, i);
  const std::size_t n = guest.size();
  return -guest[(n - 1) - (i % n)];
}

// True when the placement (shift alignment) maps the guest line onto the host
// line as the same subcomplex of the tree. That happens exactly when the
// whole biinfinite labels agree under this alignment.
bool placement_is_identity(const Word& host, const Word& guest, bool reversed, std::size_t p,
                           std::size_t q) {
  if (host.size() != guest.size()) return false;
  const std::size_t n = host.size();
  for (std::size_t k = 0; k < n; ++k)
    if (periodic_letter(host, p + k) != placed_letter(guest, reversed, q + k)) return false;
  return true;
}

}  // namespace

std::vector<LineOverlap> line_overlaps(const Word& host, const Word& guest, bool same_relator,
                                       std::size_t min_len) {
  if (host.empty() || guest.empty()) return {};
  if (!is_cyclically_reduced(host) || !is_cyclically_reduced(guest))
    throw std::invalid_argument("line_overlaps wants cyclically reduced words");
  const std::size_t cap = host.size() + guest.size();
  // best[p] = longest admissible match starting at host position p
  std::vector<LineOverlap> best(host.size());
  for (int rev = 0; rev < 2; ++rev) {
    const bool reversed = rev == 1;
    for (std::size_t p = 0; p < host.size(); ++p) {
      for (std::size_t q = 0; q < guest.size(); ++q) {
        // For a single relator, placements matching everywhere are rotation or
        // reversal symmetries of its circle: the same line, not a piece.
        // Distinct relators with coinciding lines do overlap; the cap marks
        // those overlaps as effectively infinite.
        if (same_relator && placement_is_identity(host, guest, reversed, p, q)) continue;
        std::size_t len = 0;
        while (len < cap &&
               periodic_letter(host, p + len) == placed_letter(guest, reversed, q + len))
          ++len;
        // A match can extend backwards too; only count placements maximal on
        // the left so each overlap is reported once.
        if (periodic_letter(host, p + host.size() - 1) ==
            placed_letter(guest, reversed, q + guest.size() - 1) &&
            len < cap)
          continue;
        if (len > best[p].length) best[p] = LineOverlap{p, q, reversed, len};
      }
    }
  }
  std::vector<LineOverlap> out;
  for (auto& o : best)
    if (o.length >= std::max<std::size_t>(min_len, 1)) out.push_back(o);
  std::sort(out.begin(), out.end(),
            [](const LineOverlap& a, const LineOverlap& b) { return a.length > b.length; });
  return out;
}

LineOverlap max_line_overlap(const Word& host, const Word& guest, bool same_relator) {
  auto all = line_overlaps(host, guest, same_relator, 1);
  if (all.empty()) return {};
  return all.front();
}

std::size_t classical_max_piece(const Word& w) {
  return max_line_overlap(w, w, true).length;
}

std::string word_to_string(const Word& w) {
  std::string s;
  for (int x : w) {
    const int g = std::abs(x) - 1;
    if (g < 26) {
      char c = static_cast<char>('a' + g);
      s += x > 0 ? c : static_cast<char>(std::toupper(c));
    } else {
      s += x > 0 ? "x" : "X";
      s += std::to_string(g);
    }
  }
  return s;
}

std::optional<Word> word_from_string(const std::string& s) {
  Word w;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == 'x' || c == 'X') {
      std::size_t j = i + 1, g = 0;
      if (j >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j]))) return std::nullopt;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
        g = g * 10 + static_cast<std::size_t>(s[j++] - '0');
      w.push_back(c == 'x' ? static_cast<int>(g + 1) : -static_cast<int>(g + 1));
      i = j - 1;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      w.push_back(c - 'a' + 1);
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      w.push_back(-(c - 'A' + 1));
    } else {
      return std::nullopt;
    }
  }
  return w;
}

}  // namespace cubsc
