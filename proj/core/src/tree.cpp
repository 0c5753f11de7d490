#include "hjt/tree.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hjt/error.hpp"

namespace hjt {

namespace {

constexpr std::uint64_t kLevelLimit = std::uint64_t{1} << 40;

bool sorted_unique(const std::vector<Index>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>{}) == v.end();
}

}  // namespace

// ---------------------------------------------------------------------------
// Tree

Tree::Tree(std::vector<Index> branching) : branching_(std::move(branching)) {
  sizes_.reserve(branching_.size() + 1);
  sizes_.push_back(1);
  for (Index b : branching_) {
    if (b == 0) throw StructuralError("branching must be at least 1 below the top level");
    if (sizes_.back() > kLevelLimit / b) throw RangeError("tree level too large");
    sizes_.push_back(sizes_.back() * b);
  }
}

std::uint64_t Tree::level_size(int n) const {
  if (n < 0 || n >= height()) throw RangeError("level " + std::to_string(n) + " outside tree");
  return sizes_[static_cast<std::size_t>(n)];
}

std::uint64_t Tree::fan_out(int from, int to) const {
  if (from > to) throw PreconditionError("fan_out: from > to");
  return level_size(to) / level_size(from);
}

bool Tree::valid(NodeRef node) const noexcept {
  return node.level >= 0 && node.level < height() &&
         node.index < sizes_[static_cast<std::size_t>(node.level)];
}

void Tree::check(NodeRef node) const {
  if (!valid(node)) {
    throw RangeError("node (" + std::to_string(node.level) + ", " + std::to_string(node.index) +
                     ") outside tree");
  }
}

NodeRef Tree::parent(NodeRef node) const {
  check(node);
  if (node.level == 0) throw PreconditionError("the root has no parent");
  return {node.level - 1, node.index / branching_[static_cast<std::size_t>(node.level - 1)]};
}

NodeRef Tree::ancestor(NodeRef node, int level) const {
  check(node);
  if (level < 0 || level > node.level) throw PreconditionError("ancestor level above node");
  return {level, static_cast<Index>(node.index / fan_out(level, node.level))};
}

std::vector<NodeRef> Tree::level_nodes(int n) const {
  const auto count = level_size(n);
  std::vector<NodeRef> out;
  out.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) out.push_back({n, static_cast<Index>(j)});
  return out;
}

bool Tree::leq(NodeRef a, NodeRef b) const {
  check(a);
  check(b);
  if (a.level > b.level) return false;
  return ancestor(b, a.level) == a;
}

// ---------------------------------------------------------------------------
// Level subsets, domination, density

LevelSubset::LevelSubset(int lvl, std::vector<Index> m) : level(lvl), members(std::move(m)) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) throw PreconditionError("level subset must be nonempty");
}

LevelSubset full_level(const Tree& tree, int n) {
  std::vector<Index> all(tree.level_size(n));
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<Index>(j);
  return LevelSubset(n, std::move(all));
}

bool dominates(const Tree& tree, const LevelSubset& upper, const LevelSubset& lower) {
  if (upper.level < lower.level) throw PreconditionError("dominates: upper level below lower level");
  const auto fan = tree.fan_out(lower.level, upper.level);
  std::vector<Index> covered;
  covered.reserve(upper.members.size());
  for (Index s : upper.members) {
    if (!tree.valid({upper.level, s})) throw RangeError("dominates: node outside tree");
    covered.push_back(static_cast<Index>(s / fan));
  }
  std::sort(covered.begin(), covered.end());
  for (Index t : lower.members) {
    if (!tree.valid({lower.level, t})) throw RangeError("dominates: node outside tree");
    if (!std::binary_search(covered.begin(), covered.end(), t)) return false;
  }
  return true;
}

bool is_t_dense_upto(const Tree& tree, std::span<const NodeRef> d, NodeRef t, int k) {
  if (d.empty()) throw PreconditionError("density of an empty set");
  if (k < 1) throw PreconditionError("density depth must be positive");
  std::map<int, std::vector<Index>> by_level;
  for (NodeRef node : d) {
    if (!tree.valid(node)) throw RangeError("density: node outside tree");
    if (tree.leq(t, node)) by_level[node.level].push_back(node.index);
  }
  if (static_cast<int>(by_level.size()) < k) return false;
  auto it = by_level.begin();
  for (int j = 0; j < k; ++j, ++it) {
    const int target = t.level + j;
    if (target >= tree.height() || it->first < target) return false;
    const auto fan = tree.fan_out(t.level, target);
    std::vector<Index> below_t(fan);
    for (std::uint64_t x = 0; x < fan; ++x) below_t[x] = static_cast<Index>(t.index * fan + x);
    if (!dominates(tree, LevelSubset(it->first, it->second), LevelSubset(target, below_t))) {
      return false;
    }
  }
  return true;
}

bool is_dense_upto(const Tree& tree, std::span<const NodeRef> d, int k) {
  return is_t_dense_upto(tree, d, tree.root(), k);
}

// ---------------------------------------------------------------------------
// Vector trees and level products

VectorTree::VectorTree(std::vector<Tree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw StructuralError("a vector tree needs at least one coordinate");
  for (const auto& t : trees_) {
    if (t.height() != trees_.front().height()) {
      throw StructuralError("vector tree coordinates have different heights");
    }
  }
}

bool cell_leq(const VectorTree& vt, const Cell& s, const Cell& t) {
  if (static_cast<int>(s.indices.size()) != vt.dim() ||
      static_cast<int>(t.indices.size()) != vt.dim()) {
    throw StructuralError("cell dimension does not match vector tree");
  }
  for (int i = 0; i < vt.dim(); ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (!vt.tree(i).leq({s.level, s.indices[si]}, {t.level, t.indices[si]})) return false;
  }
  return true;
}

std::vector<Cell> level_product_level(const VectorTree& vt, int n) {
  std::vector<std::uint64_t> sizes;
  std::uint64_t total = 1;
  for (const auto& t : vt.trees()) {
    sizes.push_back(t.level_size(n));
    total *= sizes.back();
  }
  std::vector<Cell> out;
  out.reserve(total);
  Cell c{n, std::vector<Index>(sizes.size(), 0)};
  for (std::uint64_t r = 0; r < total; ++r) {
    out.push_back(c);
    for (std::size_t i = sizes.size(); i-- > 0;) {
      if (++c.indices[i] < sizes[i]) break;
      c.indices[i] = 0;
    }
  }
  return out;
}

std::uint64_t VectorLevelSubset::product_size() const {
  std::uint64_t n = coords.empty() ? 0 : 1;
  for (const auto& c : coords) n *= c.size();
  return n;
}

VectorLevelSubset full_level(const VectorTree& vt, int n) {
  VectorLevelSubset out{n, {}};
  for (const auto& t : vt.trees()) out.coords.push_back(full_level(t, n).members);
  return out;
}

bool dominates(const VectorTree& vt, const VectorLevelSubset& upper,
               const VectorLevelSubset& lower) {
  if (static_cast<int>(upper.coords.size()) != vt.dim() ||
      static_cast<int>(lower.coords.size()) != vt.dim()) {
    throw StructuralError("vector level subset dimension does not match vector tree");
  }
  for (int i = 0; i < vt.dim(); ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (!dominates(vt.tree(i), LevelSubset(upper.level, upper.coords[si]),
                   LevelSubset(lower.level, lower.coords[si]))) {
      return false;
    }
  }
  return true;
}

void validate(const VectorTree& vt, const VectorLevelSubset& d) {
  if (static_cast<int>(d.coords.size()) != vt.dim()) {
    throw StructuralError("vector level subset dimension does not match vector tree");
  }
  if (d.level < 0 || d.level >= vt.height()) throw RangeError("vector level subset level outside tree");
  for (int i = 0; i < vt.dim(); ++i) {
    const auto& c = d.coords[static_cast<std::size_t>(i)];
    if (c.empty()) throw StructuralError("vector level subset has an empty coordinate");
    if (!sorted_unique(c)) throw StructuralError("vector level subset coordinates must be sorted");
    if (c.back() >= vt.tree(i).level_size(d.level)) throw RangeError("vector level subset node outside tree");
  }
}

VectorSubset::VectorSubset(std::vector<VectorLevelSubset> levels) : levels_(std::move(levels)) {
  std::sort(levels_.begin(), levels_.end(),
            [](const auto& a, const auto& b) { return a.level < b.level; });
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (levels_[i].level == levels_[i - 1].level) throw StructuralError("vector subset repeats a level");
  }
}

std::vector<int> VectorSubset::level_set() const {
  std::vector<int> out;
  for (const auto& l : levels_) out.push_back(l.level);
  return out;
}

std::vector<NodeRef> VectorSubset::coordinate(int i) const {
  std::vector<NodeRef> out;
  for (const auto& l : levels_) {
    for (Index x : l.coords.at(static_cast<std::size_t>(i))) out.push_back({l.level, x});
  }
  return out;
}

std::vector<Cell> VectorSubset::product() const {
  std::vector<Cell> out;
  for (const auto& l : levels_) {
    const std::size_t d = l.coords.size();
    std::vector<std::size_t> pos(d, 0);
    const auto total = l.product_size();
    for (std::uint64_t r = 0; r < total; ++r) {
      Cell c{l.level, std::vector<Index>(d)};
      for (std::size_t i = 0; i < d; ++i) c.indices[i] = l.coords[i][pos[i]];
      out.push_back(std::move(c));
      for (std::size_t i = d; i-- > 0;) {
        if (++pos[i] < l.coords[i].size()) break;
        pos[i] = 0;
      }
    }
  }
  return out;
}

bool VectorSubset::contains(const Cell& c) const {
  for (const auto& l : levels_) {
    if (l.level != c.level) continue;
    if (l.coords.size() != c.indices.size()) return false;
    for (std::size_t i = 0; i < c.indices.size(); ++i) {
      if (!std::binary_search(l.coords[i].begin(), l.coords[i].end(), c.indices[i])) return false;
    }
    return true;
  }
  return false;
}

void validate(const VectorTree& vt, const VectorSubset& d) {
  for (const auto& l : d.levels()) validate(vt, l);
}

bool is_dense_upto(const VectorTree& vt, const VectorSubset& d, int k) {
  if (d.empty()) throw PreconditionError("density of an empty vector subset");
  for (int i = 0; i < vt.dim(); ++i) {
    const auto nodes = d.coordinate(i);
    if (!is_dense_upto(vt.tree(i), nodes, k)) return false;
  }
  return true;
}

bool is_t_dense_upto(const VectorTree& vt, const VectorSubset& d, const Cell& t, int k) {
  if (d.empty()) throw PreconditionError("density of an empty vector subset");
  if (static_cast<int>(t.indices.size()) != vt.dim()) throw StructuralError("anchor cell dimension mismatch");
  for (int i = 0; i < vt.dim(); ++i) {
    const auto nodes = d.coordinate(i);
    if (!is_t_dense_upto(vt.tree(i), nodes, {t.level, t.indices[static_cast<std::size_t>(i)]}, k)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// CellSpace

CellSpace::CellSpace(VectorTree vt) : vt_(std::move(vt)) {
  const int h = vt_.height();
  level_begin_.push_back(0);
  for (int n = 0; n < h; ++n) {
    std::uint64_t count = 1;
    for (const auto& t : vt_.trees()) {
      count *= t.level_size(n);
      if (count > kMaxCells) throw RangeError("level product too large for a cell space");
    }
    if (level_begin_.back() + count > kMaxCells) throw RangeError("level product too large for a cell space");
    level_begin_.push_back(static_cast<CellId>(level_begin_.back() + count));
  }
  level_of_.resize(size());
  ancestors_.resize(size() * static_cast<std::size_t>(h));
  for (int n = 0; n < h; ++n) {
    for (CellId c = level_begin_[static_cast<std::size_t>(n)];
         c < level_begin_[static_cast<std::size_t>(n) + 1]; ++c) {
      level_of_[c] = n;
      const Cell full = cell(c);
      for (int m = 0; m <= n; ++m) {
        Cell up{m, full.indices};
        for (int i = 0; i < vt_.dim(); ++i) {
          const auto si = static_cast<std::size_t>(i);
          up.indices[si] = static_cast<Index>(full.indices[si] / vt_.tree(i).fan_out(m, n));
        }
        ancestors_[c * static_cast<std::size_t>(h) + static_cast<std::size_t>(m)] = id(up);
      }
    }
  }
}

CellId CellSpace::level_begin(int n) const {
  if (n < 0 || n > height()) throw RangeError("level " + std::to_string(n) + " outside cell space");
  return level_begin_[static_cast<std::size_t>(n)];
}

std::size_t CellSpace::level_count(int n) const {
  if (n < 0 || n >= height()) throw RangeError("level " + std::to_string(n) + " outside cell space");
  return level_begin_[static_cast<std::size_t>(n) + 1] - level_begin_[static_cast<std::size_t>(n)];
}

std::size_t CellSpace::range_size(int m, int n) const {
  if (m > n) throw PreconditionError("range with m > n");
  return level_begin(n) - level_begin(m);
}

Cell CellSpace::cell(CellId c) const {
  if (c >= size()) throw RangeError("cell id outside cell space");
  const int n = [&] {
    auto it = std::upper_bound(level_begin_.begin(), level_begin_.end(), c);
    return static_cast<int>(it - level_begin_.begin()) - 1;
  }();
  Cell out{n, std::vector<Index>(static_cast<std::size_t>(dim()))};
  std::uint64_t rank = c - level_begin_[static_cast<std::size_t>(n)];
  for (int i = dim(); i-- > 0;) {
    const auto size_i = vt_.tree(i).level_size(n);
    out.indices[static_cast<std::size_t>(i)] = static_cast<Index>(rank % size_i);
    rank /= size_i;
  }
  return out;
}

CellId CellSpace::id(const Cell& c) const {
  if (static_cast<int>(c.indices.size()) != dim()) throw StructuralError("cell dimension does not match cell space");
  if (c.level < 0 || c.level >= height()) throw RangeError("cell level outside cell space");
  std::uint64_t rank = 0;
  for (int i = 0; i < dim(); ++i) {
    const auto size_i = vt_.tree(i).level_size(c.level);
    const auto x = c.indices[static_cast<std::size_t>(i)];
    if (x >= size_i) throw RangeError("cell index outside tree level");
    rank = rank * size_i + x;
  }
  return static_cast<CellId>(level_begin_[static_cast<std::size_t>(c.level)] + rank);
}

CellId CellSpace::ancestor(CellId c, int m) const {
  if (c >= size()) throw RangeError("cell id outside cell space");
  if (m < 0 || m > level_of_[c]) throw PreconditionError("ancestor level above cell");
  return ancestors_[c * static_cast<std::size_t>(height()) + static_cast<std::size_t>(m)];
}

bool CellSpace::leq(CellId a, CellId b) const {
  if (a >= size() || b >= size()) throw RangeError("cell id outside cell space");
  const int la = level_of_[a];
  return la <= level_of_[b] && ancestors_[b * static_cast<std::size_t>(height()) + static_cast<std::size_t>(la)] == a;
}

Index CellSpace::coordinate(CellId c, int i) const {
  if (c >= size()) throw RangeError("cell id outside cell space");
  const int n = level_of_[c];
  std::uint64_t rank = c - level_begin_[static_cast<std::size_t>(n)];
  for (int j = dim() - 1; j > i; --j) rank /= vt_.tree(j).level_size(n);
  return static_cast<Index>(rank % vt_.tree(i).level_size(n));
}

// ---------------------------------------------------------------------------
// Text format

VectorTree parse_vector_tree(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int dim = -1;
  std::vector<Tree> trees;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream words(line);
    std::string key;
    words >> key;
    if (dim < 0) {
      if (key != "d") throw ParseError("expected `d <dimension>`", line_no, static_cast<int>(first) + 1);
      long long value = 0;
      if (!(words >> value) || value < 1) throw ParseError("dimension must be a positive integer", line_no);
      std::string extra;
      if (words >> extra) throw ParseError("trailing token `" + extra + "`", line_no);
      dim = static_cast<int>(value);
      continue;
    }
    if (key != "tree") throw ParseError("expected `tree <b_0> ...`, got `" + key + "`", line_no, static_cast<int>(first) + 1);
    std::vector<Index> branching;
    std::string token;
    while (words >> token) {
      std::size_t used = 0;
      long long b = 0;
      try {
        b = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || b < 1 || b > std::numeric_limits<Index>::max()) {
        throw ParseError("branching `" + token + "` must be a positive integer", line_no,
                         static_cast<int>(line.find(token)) + 1);
      }
      branching.push_back(static_cast<Index>(b));
    }
    trees.emplace_back(std::move(branching));
  }
  if (dim < 0) throw ParseError("missing `d <dimension>` line", line_no);
  if (static_cast<int>(trees.size()) != dim) {
    throw ParseError("expected " + std::to_string(dim) + " tree lines, found " + std::to_string(trees.size()), line_no);
  }
  for (const auto& t : trees) {
    if (t.height() != trees.front().height()) throw ParseError("tree lines have different heights", line_no);
  }
  return VectorTree(std::move(trees));
}

std::string format_vector_tree(const VectorTree& vt) {
  std::string out = "d " + std::to_string(vt.dim()) + "\n";
  for (const auto& t : vt.trees()) {
    out += "tree";
    for (Index b : t.branching()) out += " " + std::to_string(b);
    out += "\n";
  }
  return out;
}

VectorTree load_vector_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tree spec `" + path + "`");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_vector_tree(buf.str());
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string to_string(const Cell& c) {
  std::string out = std::to_string(c.level) + ":";
  for (std::size_t i = 0; i < c.indices.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c.indices[i]);
  }
  return out;
}

}  // namespace hjt
