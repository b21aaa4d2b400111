#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cubsc {

/// Letters are nonzero ints: +k / -k traverse directed edge (or wedge loop)
/// k-1 forwards / backwards. Words are edge paths; the graph structure that
/// makes a word a valid path lives with the caller.
using Word = std::vector<int>;

Word free_reduce(const Word& w);
/// Cyclically reduces (conjugates off matching first/last letters after reduction).
Word cyclic_reduce(const Word& w);
Word inverse_word(const Word& w);
bool is_reduced(const Word& w);
bool is_cyclically_reduced(const Word& w);

Word rotate_word(const Word& w, std::size_t s);

/// Letter at position i of the biinfinite periodic word w^inf, i may exceed |w|.
int periodic_letter(const Word& w, std::size_t i);

/// Shifts s with rotate(w, s) == w; always contains 0. Proper rotational
/// symmetry here means w is a proper power.
std::vector<std::size_t> rotation_symmetries(const Word& w);

/// A placement of one periodic line against another: the factor starting at
/// position `pos_host` of host^inf matches the factor of guest^inf (reversed
/// and inverted when `reversed`) starting at `pos_guest`, for `length` letters.
struct LineOverlap {
  std::size_t pos_host = 0;
  std::size_t pos_guest = 0;
  bool reversed = false;
  std::size_t length = 0;
};

/// Maximal overlaps between the periodic line labeled `host` and translates of
/// the periodic line labeled `guest` inside a tree, over all relative
/// placements and both orientations. When `same_relator`, placements carrying
/// the line onto itself are excluded: those are rotation or reversal
/// symmetries of the relator circle, not pieces (proper powers z^n and
/// reversible words are handled correctly). Overlap lengths are capped at
/// |host|+|guest|; by Fine-Wilf a capped overlap means the lines coincide,
/// which for distinct relators is reported as an (effectively infinite) piece.
/// Both words must be cyclically reduced and nonempty.
LineOverlap max_line_overlap(const Word& host, const Word& guest, bool same_relator);

/// All overlaps of length >= min_len, deduplicated by (host position, length),
/// longest first. Used for piece witness tables.
std::vector<LineOverlap> line_overlaps(const Word& host, const Word& guest, bool same_relator,
                                       std::size_t min_len);

/// Longest factor of host^inf (either orientation) centered anywhere that also
/// occurs elsewhere; this is the classical max piece of a one-relator word.
std::size_t classical_max_piece(const Word& w);

/// Render with a lowercase alphabet: 1 -> "a", -1 -> "A", ... beyond 26
/// generators falls back to "x12"/"X12".
std::string word_to_string(const Word& w);
std::optional<Word> word_from_string(const std::string& s);

}  // namespace cubsc
