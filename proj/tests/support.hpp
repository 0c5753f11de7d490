#pragma once

#include <string>
#include <vector>

#include "hjt/tree.hpp"
#include "hjt/word.hpp"

namespace hjt::test {

inline VectorTree binary(int height, int dim = 1) {
  std::vector<Tree> trees(static_cast<std::size_t>(dim),
                          Tree(std::vector<Index>(static_cast<std::size_t>(height - 1), 2)));
  return VectorTree(std::move(trees));
}

inline VectorSubset all_levels(const VectorTree& vt, int levels = -1) {
  if (levels < 0) levels = vt.height();
  std::vector<VectorLevelSubset> out;
  for (int n = 0; n < levels; ++n) out.push_back(full_level(vt, n));
  return VectorSubset(std::move(out));
}

inline int count_letter(const Word& w, Letter a) {
  int c = 0;
  for (auto s : w.symbols()) c += s.is_letter() && s.letter_value() == a;
  return c;
}

inline std::string data_file(const std::string& name) { return std::string(HJT_DATA_DIR) + "/" + name; }

}  // namespace hjt::test
