#include "cubsc/words.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using cubsc::Word;

namespace {

// independent reducer: scan for a cancelling pair, erase, repeat
Word reduce_oracle(Word w) {
  bool again = true;
  while (again) {
    again = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + i, w.begin() + i + 2);
        again = true;
        break;
      }
    }
  }
  return w;
}

std::vector<Word> symmetrized(const Word& w) {
  std::set<Word> s;
  Word inv = cubsc::inverse_word(w);
  for (std::size_t k = 0; k < w.size(); ++k) {
    s.insert(cubsc::rotate_word(w, k));
    s.insert(cubsc::rotate_word(inv, k));
  }
  return {s.begin(), s.end()};
}

// classical piece bound: longest common prefix over distinct pairs of the
// symmetrized closure
std::size_t piece_oracle(const Word& w) {
  auto s = symmetrized(w);
  std::size_t best = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      std::size_t l = 0;
      while (l < s[i].size() && s[i][l] == s[j][l]) ++l;
      best = std::max(best, l);
    }
  }
  return best;
}

Word random_cyclic_word(std::mt19937& rng, int letters, std::size_t len) {
  std::uniform_int_distribution<int> pick(0, 2 * letters - 1);
  while (true) {
    Word w;
    for (std::size_t i = 0; i < len; ++i) {
      int raw = pick(rng);
      int x = raw < letters ? raw + 1 : -(raw - letters + 1);
      if (!w.empty() && w.back() == -x) {
        --i;
        continue;
      }
      w.push_back(x);
    }
    if (cubsc::is_cyclically_reduced(w)) return w;
  }
}

Word artin_word(int m) {
  Word w;
  for (int i = 0; i < m; ++i) {
    w.push_back(1);
    w.push_back(2);
  }
  for (int i = 0; i < m; ++i) {
    w.push_back(-1);
    w.push_back(-2);
  }
  return w;
}

}  // namespace

TEST_CASE("free and cyclic reduction") {
  CHECK(cubsc::free_reduce({1, 2, -2}) == Word{1});
  CHECK(cubsc::free_reduce({1, -1}) == Word{});
  CHECK(cubsc::free_reduce({1, 2, -2, -1}) == Word{});
  CHECK(cubsc::cyclic_reduce({-2, 1, 2}) == Word{1});
  CHECK(cubsc::cyclic_reduce({1, 2, -1}) == Word{2});
  CHECK(cubsc::is_cyclically_reduced({1, 2, -1, -2}));
  CHECK(!cubsc::is_cyclically_reduced({1, 2, -1}));

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(-3, 3);
  for (int trial = 0; trial < 500; ++trial) {
    Word w;
    for (int i = 0; i < 12; ++i) {
      int x = pick(rng);
      if (x != 0) w.push_back(x);
    }
    CHECK(cubsc::free_reduce(w) == reduce_oracle(w));
  }
}

TEST_CASE("rotations and symmetries") {
  CHECK(cubsc::rotate_word({1, 2, 3}, 1) == Word{2, 3, 1});
  CHECK(cubsc::rotation_symmetries({1, 2, 1, 2, 1, 2}) == std::vector<std::size_t>{0, 2, 4});
  CHECK(cubsc::rotation_symmetries({1, 2}) == std::vector<std::size_t>{0});
  CHECK(cubsc::periodic_letter({1, 2}, 5) == 2);
}

TEST_CASE("classical max piece matches the symmetrized-prefix oracle") {
  CHECK(cubsc::classical_max_piece({1, 1, 2, 2}) == 1);
  CHECK(cubsc::classical_max_piece({1, 2, 1, 2}) == 0);
  CHECK(cubsc::classical_max_piece({1, 2, -1, -2}) == 1);
  CHECK(cubsc::classical_max_piece({1, 1, 1, 1, 1}) == 0);
  CHECK(piece_oracle(artin_word(3)) == 5);
  CHECK(piece_oracle(artin_word(5)) == 9);
  CHECK(cubsc::classical_max_piece(artin_word(3)) == 5);
  CHECK(cubsc::classical_max_piece(artin_word(5)) == 9);

  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    Word w = random_cyclic_word(rng, 2 + trial % 2, 3 + trial % 8);
    CAPTURE(cubsc::word_to_string(w));
    CHECK(cubsc::classical_max_piece(w) == piece_oracle(w));
  }
}

TEST_CASE("coinciding lines of distinct relators hit the cap") {
  CHECK(cubsc::max_line_overlap({1, 2}, {1, 2, 1, 2}, false).length == 6);
  CHECK(cubsc::max_line_overlap({1, 2}, {1, 2}, false).length == 4);
  // same relator: those placements are symmetries, not overlaps
  CHECK(cubsc::max_line_overlap({1, 2}, {1, 2}, true).length == 0);
  // genuinely disjoint lines
  CHECK(cubsc::max_line_overlap({1, 1}, {2, 2}, false).length == 0);
}

TEST_CASE("overlap tables are sorted and start at maximal placements") {
  auto all = cubsc::line_overlaps({1, 1, 2, 2}, {1, 1, 2, 2}, true, 1);
  REQUIRE(!all.empty());
  CHECK(all.front().length == 1);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].length >= all[i].length);
}

TEST_CASE("word strings") {
  CHECK(cubsc::word_to_string({1, 2, -1, -2}) == "abAB");
  CHECK(cubsc::word_from_string("abAB").value() == Word{1, 2, -1, -2});
  CHECK(cubsc::word_to_string({27, -27}) == "x26X26");
  CHECK(cubsc::word_from_string("x26X26").value() == Word{27, -27});
  CHECK(!cubsc::word_from_string("a-b").has_value());
  CHECK(!cubsc::word_from_string("x").has_value());
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Word w = random_cyclic_word(rng, 3, 6);
    CHECK(cubsc::word_from_string(cubsc::word_to_string(w)).value() == w);
  }
}
