#pragma once

// Finite truncations of balanced, finitely branching trees, vector trees and
// their level products.
//
// Nodes are numbered level by level: the children of node (n, j) are
// (n + 1, j * b_n), ..., (n + 1, j * b_n + b_n - 1), so the parent of a node is
// a single division and every level is a dense index range.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hjt {

using Index = std::uint32_t;
using CellId = std::uint32_t;

struct NodeRef {
  int level = 0;
  Index index = 0;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

class Tree {
 public:
  /// A tree of height `branching.size() + 1` in which every node at level i
  /// has `branching[i]` children.
  explicit Tree(std::vector<Index> branching = {});

  int height() const noexcept { return static_cast<int>(sizes_.size()); }
  std::span<const Index> branching() const noexcept { return branching_; }

  std::uint64_t level_size(int n) const;
  /// Number of nodes at level `to` below a single node at level `from`.
  std::uint64_t fan_out(int from, int to) const;

  bool valid(NodeRef node) const noexcept;
  NodeRef root() const noexcept { return {0, 0}; }
  NodeRef parent(NodeRef node) const;
  NodeRef ancestor(NodeRef node, int level) const;

  std::vector<NodeRef> level_nodes(int n) const;
  bool leq(NodeRef a, NodeRef b) const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  void check(NodeRef node) const;

  std::vector<Index> branching_;
  std::vector<std::uint64_t> sizes_;
};

/// A nonempty set of nodes of one level.
struct LevelSubset {
  int level = 0;
  std::vector<Index> members;  // sorted, distinct

  LevelSubset() = default;
  LevelSubset(int level, std::vector<Index> members);

  friend bool operator==(const LevelSubset&, const LevelSubset&) = default;
};

LevelSubset full_level(const Tree& tree, int n);

/// True iff every node of `lower` has an extension in `upper`.
bool dominates(const Tree& tree, const LevelSubset& upper, const LevelSubset& lower);

/// Bounded density: the j-th occupied level of `d` dominates T(j) for j < k.
bool is_dense_upto(const Tree& tree, std::span<const NodeRef> d, int k);

/// Density of `d` inside the subtree of successors of `t`, levels counted from
/// the level of `t`.
bool is_t_dense_upto(const Tree& tree, std::span<const NodeRef> d, NodeRef t, int k);

class VectorTree {
 public:
  VectorTree() = default;
  explicit VectorTree(std::vector<Tree> trees);

  int dim() const noexcept { return static_cast<int>(trees_.size()); }
  int height() const noexcept { return trees_.empty() ? 0 : trees_.front().height(); }
  const Tree& tree(int i) const { return trees_.at(static_cast<std::size_t>(i)); }
  std::span<const Tree> trees() const noexcept { return trees_; }

  friend bool operator==(const VectorTree&, const VectorTree&) = default;

 private:
  std::vector<Tree> trees_;
};

struct Cell {
  int level = 0;
  std::vector<Index> indices;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

bool cell_leq(const VectorTree& vt, const Cell& s, const Cell& t);

/// Cells of the n-th level of the level product, lexicographic in the index
/// tuple.
std::vector<Cell> level_product_level(const VectorTree& vt, int n);

/// A vector level subset: one nonempty node set per coordinate, all on the
/// same level.
struct VectorLevelSubset {
  int level = 0;
  std::vector<std::vector<Index>> coords;

  std::uint64_t product_size() const;
  friend bool operator==(const VectorLevelSubset&, const VectorLevelSubset&) = default;
};

VectorLevelSubset full_level(const VectorTree& vt, int n);

bool dominates(const VectorTree& vt, const VectorLevelSubset& upper,
               const VectorLevelSubset& lower);

/// A vector subset, stored by occupied level. Every coordinate occupies the
/// same levels.
class VectorSubset {
 public:
  VectorSubset() = default;
  explicit VectorSubset(std::vector<VectorLevelSubset> levels);

  std::span<const VectorLevelSubset> levels() const noexcept { return levels_; }
  bool empty() const noexcept { return levels_.empty(); }
  std::vector<int> level_set() const;
  /// Nodes of coordinate i, in (level, index) order.
  std::vector<NodeRef> coordinate(int i) const;
  /// Cells of the level product, in canonical order.
  std::vector<Cell> product() const;
  bool contains(const Cell& c) const;

  friend bool operator==(const VectorSubset&, const VectorSubset&) = default;

 private:
  std::vector<VectorLevelSubset> levels_;
};

void validate(const VectorTree& vt, const VectorLevelSubset& d);
void validate(const VectorTree& vt, const VectorSubset& d);

bool is_dense_upto(const VectorTree& vt, const VectorSubset& d, int k);
bool is_t_dense_upto(const VectorTree& vt, const VectorSubset& d, const Cell& t, int k);

/// Dense numbering of every cell of the level product, level-major and
/// lexicographic inside a level, so that cell order is CellId order.
class CellSpace {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 22;

  explicit CellSpace(VectorTree vt);

  const VectorTree& vtree() const noexcept { return vt_; }
  int dim() const noexcept { return vt_.dim(); }
  int height() const noexcept { return vt_.height(); }
  std::size_t size() const noexcept { return level_begin_.back(); }

  CellId level_begin(int n) const;
  std::size_t level_count(int n) const;
  /// Cells of the levels [m, n).
  std::size_t range_size(int m, int n) const;

  int level(CellId c) const { return level_of_.at(c); }
  Cell cell(CellId c) const;
  CellId id(const Cell& c) const;
  CellId ancestor(CellId c, int level) const;
  bool leq(CellId a, CellId b) const;
  /// Index of coordinate i of cell c inside its tree level.
  Index coordinate(CellId c, int i) const;

  friend bool operator==(const CellSpace& a, const CellSpace& b) { return a.vt_ == b.vt_; }

 private:
  VectorTree vt_;
  std::vector<CellId> level_begin_;
  std::vector<int> level_of_;
  std::vector<CellId> ancestors_;  // size() * height()
};

/// Tree spec text: `d <dimension>` followed by one `tree <b_0> ... <b_{H-2}>`
/// line per coordinate. Lines starting with `#` are comments.
VectorTree parse_vector_tree(std::string_view text);
std::string format_vector_tree(const VectorTree& vt);
VectorTree load_vector_tree(const std::string& path);

std::string to_string(const Cell& c);

}  // namespace hjt
