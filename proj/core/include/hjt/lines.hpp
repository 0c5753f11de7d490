#pragma once

// Combinatorial lines over Λ^N and exhaustive Hales–Jewett numbers.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hjt/word.hpp"

namespace hjt {

/// Symbols of a classic variable word: letters 0..k-1 or kVar.
using ClassicWord = std::vector<int>;
inline constexpr int kVar = -1;

/// (k+1)^N - k^N.
std::uint64_t line_count(int k, int n);

/// Lexicographic in the symbols with v ordered after every letter.
void for_each_line(int k, int n, const std::function<bool(const ClassicWord&)>& visit);
std::vector<ClassicWord> combinatorial_lines(int k, int n);

/// Points of Λ^N are numbered as base-k integers, position 0 most significant.
std::uint64_t point_count(int k, int n);
std::uint64_t point_index(int k, std::span<const int> letters);
std::vector<int> point_letters(int k, int n, std::uint64_t index);
/// Indices of w(0), ..., w(k-1).
std::vector<std::uint64_t> line_points(int k, const ClassicWord& w);

/// Letters as base-36 digits, the variable as `v`.
std::string encode_classic(const ClassicWord& w);
ClassicWord parse_classic(int k, std::string_view text);

struct PointColoring {
  int k = 2;
  int n = 1;
  int r = 2;
  std::vector<int> colors;  // by point index

  friend bool operator==(const PointColoring&, const PointColoring&) = default;
};

/// Throws InputError unless every point has a color in [0, r).
void check_total(const PointColoring& c);

struct LineWitness {
  ClassicWord line;
  int color = 0;
};

struct LineSearch {
  std::optional<LineWitness> witness;
  std::uint64_t lines_checked = 0;
};

LineSearch find_mono_line(const PointColoring& coloring);
/// Brute force over every line and letter, independent of find_mono_line.
bool has_mono_line_bruteforce(const PointColoring& coloring);

struct HjLevel {
  int n = 0;
  std::uint64_t colorings = 0;  // after fixing the color of the first point
  std::uint64_t examined = 0;
  bool forced = false;
};

struct HjResult {
  bool resolved = false;
  int value = 0;  // HJ(k, r) when resolved, else the largest n checked
  std::optional<PointColoring> avoiding;  // at value - 1 when resolved
  std::vector<HjLevel> levels;
  std::string note;
};

/// Least n <= n_max at which every r-coloring of Λ^n has a monochromatic
/// line. Levels with more than `max_colorings` colorings stop the search.
HjResult hj_number(int k, int r, int n_max, int workers = 1,
                   std::uint64_t max_colorings = std::uint64_t{1} << 34);

// ---------------------------------------------------------------------------
// Transporting lines into word spans

/// A sequence of letter families, one per block, each indexed by the cells
/// of the level k in CellId order.
using FamilySequence = std::vector<std::vector<Letter>>;

/// Checks the domination chain and cardinality conditions on `blocks`
/// relative to level k; throws StructuralError naming the first failure.
void check_q_blocks(const CellSpace& space, Alphabet alphabet, std::span<const Word> blocks, int k);

/// Q(seq): the union of the blocks, block i substituted with seq[i] carried
/// along s -> the ancestor of s at level k.
Word q_encode(const CellSpace& space, Alphabet alphabet, std::span<const Word> blocks, int k,
              const FamilySequence& seq);

/// A line over the alphabet of families: nullopt marks the variable.
using FamilyLine = std::vector<std::optional<std::vector<Letter>>>;

/// The variable word h with [h] equal to the image of the line under Q.
Word q_line_word(const CellSpace& space, Alphabet alphabet, std::span<const Word> blocks, int k,
                 const FamilyLine& line);

}  // namespace hjt
