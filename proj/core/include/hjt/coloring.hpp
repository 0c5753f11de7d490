#pragma once

// Builtin colorings and coloring tables.
//
//   constant c            every object gets color c
//   size_mod m            |U| mod m (sets, subsets)
//   min_level_mod m       level of the minimum mod m (sets); level mod m (cells)
//   level_parity          min_level_mod 2
//   letter_count_mod m    number of cells carrying letter 0, mod m (words, points)
//   table <path>          one `<key> <color>` entry per line
//
// Table keys: cells `L:i1,...,id`; cell sets joined by `;`; words in the
// canonical word encoding; points as letter strings; subsets of {1..n} as
// comma separated elements. The color is the last token of a line.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hjt/large.hpp"
#include "hjt/lines.hpp"
#include "hjt/union.hpp"

namespace hjt {

struct ColoringSpec {
  std::string name;
  std::vector<std::string> params;

  /// From the tokens following `--coloring`.
  static ColoringSpec parse(const std::vector<std::string>& tokens);
  std::string echo() const;
  /// Bytes of the table file, empty for builtins.
  std::string fingerprint() const;
};

/// Key text to color, from a table file.
std::map<std::string, int> load_color_table(const std::string& path);

CellColoring make_cell_coloring(const CellSpace& space, const ColoringSpec& spec);
SetColoring make_set_coloring(const CellSpace& space, const ColoringSpec& spec);
WordColoring make_word_coloring(const CellSpace& space, const ColoringSpec& spec);
SubsetColoring make_subset_coloring(int n, const ColoringSpec& spec);
/// With r = 1 + the largest color used.
PointColoring make_point_coloring(int k, int n, const ColoringSpec& spec);

std::string encode_subset(std::uint32_t mask);
std::uint32_t parse_subset(int n, const std::string& text);

}  // namespace hjt
