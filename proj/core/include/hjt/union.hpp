#pragma once

// Families of pairwise disjoint min-rooted cell sets, their union spans, and
// the searches built on them: Halpern–Läuchli patterns, the disjoint-union
// pipeline, Folkman configurations and the strong-subtree counterexample.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hjt/tree.hpp"

namespace hjt {

/// Sorted, distinct cells.
using MinSet = std::vector<CellId>;

std::optional<CellId> set_minimum(const CellSpace& space, std::span<const CellId> cells);

/// Cells as `L:i1,...,id` joined by `;`.
std::string encode_min_set(const CellSpace& space, const MinSet& u);
MinSet parse_min_set(const CellSpace& space, std::string_view text);

/// Must be pure and safe to call from several threads.
using SetColoring = std::function<int(const MinSet&)>;
using CellColoring = std::function<int(CellId)>;

class UFamily {
 public:
  using Entry = std::pair<CellId, MinSet>;

  UFamily() = default;
  /// The domain must be ⊗base; every U_t has minimum t and the sets are
  /// pairwise disjoint.
  UFamily(const CellSpace& space, VectorSubset base, std::vector<Entry> sets);

  /// U_t = {t} on ⊗base.
  static UFamily singletons(const CellSpace& space, VectorSubset base);

  const VectorSubset& base() const noexcept { return base_; }
  std::span<const Entry> entries() const noexcept { return sets_; }
  std::vector<CellId> indices() const;
  std::size_t size() const noexcept { return sets_.size(); }
  bool contains(CellId t) const;
  const MinSet& at(CellId t) const;

  friend bool operator==(const UFamily&, const UFamily&) = default;

 private:
  VectorSubset base_;
  std::vector<Entry> sets_;  // by index
};

/// Cells of ⊗d as ids, in CellId order.
std::vector<CellId> product_ids(const CellSpace& space, const VectorSubset& d);

/// The union of the selected sets when it has a minimum.
std::optional<MinSet> union_span(const CellSpace& space, const UFamily& u, std::span<const CellId> gamma);

/// [U] in lexicographic order of the sorted cell lists.
std::vector<MinSet> span_u(const CellSpace& space, const UFamily& u);
/// Oracle: every nonempty selection, kept when the union has a minimum.
std::vector<MinSet> span_u_bruteforce(const CellSpace& space, const UFamily& u);

/// Indices of U strictly above t, in CellId order.
std::vector<CellId> indices_above(const CellSpace& space, const UFamily& u, CellId t);
/// U_t plus U_s for every s above t with f[s] = 1, f aligned with
/// indices_above.
MinSet reduction_q(const CellSpace& space, const UFamily& u, CellId t, std::span<const std::uint8_t> f);

/// Restriction to the levels below `depth`.
UFamily truncate(const CellSpace& space, const UFamily& u, int depth);

struct MinViolation {
  MinSet first;
  MinSet second;
};

/// First pair of span elements with equal minima and different colors.
std::optional<MinViolation> min_determined_check(const CellSpace& space, const SetColoring& coloring,
                                                 const UFamily& u, int depth);

struct RepairStep {
  bool found = false;
  UFamily family;
  std::string note;
  std::uint64_t candidates = 0;
};

/// Regroup the family above t so that its t-rooted span elements share one
/// color, by a tree-HJ search over the two-letter words above t.
RepairStep lemma92_step(const CellSpace& space, const SetColoring& coloring, const UFamily& u, CellId t,
                        std::size_t q, int workers = 1);

enum class HlBranch { Dense, TDense };

struct HlWitness {
  HlBranch branch = HlBranch::Dense;
  VectorSubset d;
  std::optional<CellId> anchor;
};

struct HlResult {
  std::optional<HlWitness> witness;
  std::uint64_t patterns = 0;
};

/// Branch (i): m levels of d, the j-th dominating T(j), all color 1.
/// Branch (ii): a cell t and m levels above it, the j-th dominating the
/// successors of t on level(t) + j, all color 0.
HlResult hl_search(const CellSpace& space, const CellColoring& coloring, const VectorSubset& d, int m);
std::optional<std::string> hl_defect(const CellSpace& space, const CellColoring& coloring, const VectorSubset& d,
                                     int m, const HlWitness& w);

struct DuResult {
  std::optional<HlWitness> pattern;
  UFamily family;  // the lifted family on success
  std::size_t repairs = 0;
  std::vector<std::string> notes;
  std::uint64_t span_checked = 0;
};

DuResult disjoint_union_search(const CellSpace& space, const SetColoring& coloring, const UFamily& u, int depth,
                               int m, std::size_t q, int workers = 1);
/// Checks that `lifted` comes from `original`, matches the pattern and has a
/// span in one color class.
std::optional<std::string> du_defect(const CellSpace& space, const SetColoring& coloring, const UFamily& original,
                                     int m, const HlWitness& pattern, const UFamily& lifted);

// ---------------------------------------------------------------------------
// Folkman

using SubsetColoring = std::function<int(std::uint32_t mask)>;

struct FolkmanSearch {
  std::optional<std::vector<std::uint32_t>> sets;
  std::uint64_t nodes = 0;
};

/// Lexicographically least D_1 < ... < D_k, pairwise disjoint, with every
/// nonempty union in one color. Subsets of {1..n} are bitmasks.
FolkmanSearch folkman_search(int n, int k, const SubsetColoring& coloring);
std::optional<std::string> folkman_defect(int n, int k, const SubsetColoring& coloring,
                                          std::span<const std::uint32_t> sets);
/// Oracle: every assignment of the n elements to D_1..D_k or to none.
bool folkman_bruteforce(int n, int k, const SubsetColoring& coloring);

struct FolkmanLevel {
  int n = 0;
  bool forced = false;
  std::uint64_t nodes = 0;
};

struct FolkmanNumber {
  bool resolved = false;
  int value = 0;
  /// Colors of masks 1..2^(value-1)-1 when resolved.
  std::vector<int> avoiding;
  std::vector<FolkmanLevel> levels;
};

FolkmanNumber folkman_number(int k, int colors, int n_max, int workers = 1);

// ---------------------------------------------------------------------------
// Strong subtree counterexample (single tree)

/// |U1 ∩ T(level(min U2))| mod 2.
int counterexample_color(const CellSpace& space, const MinSet& u1, const MinSet& u2);

struct StrongSubtree {
  std::vector<int> levels;
  std::vector<std::vector<Index>> nodes;  // per level, sorted
};

void for_each_strong_subtree(const Tree& tree, int height, int depth,
                             const std::function<bool(const StrongSubtree&)>& visit);

struct CounterexampleReport {
  bool holds = true;
  std::uint64_t subtrees = 0;
  std::uint64_t families = 0;
  bool capped = false;
  std::optional<StrongSubtree> failing_subtree;
  std::optional<std::vector<MinSet>> failing_family;
};

CounterexampleReport verify_counterexample(const Tree& tree, int subtree_height, int depth,
                                           std::uint64_t family_cap = std::uint64_t{1} << 22, int workers = 1);

}  // namespace hjt
