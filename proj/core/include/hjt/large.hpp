#pragma once

// Largeness of word sets at bounded depth, derived sets, and direct search
// for monochromatic further subspaces.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hjt/error.hpp"
#include "hjt/word.hpp"

namespace hjt {

/// Must be pure and safe to call from several threads.
using WordColoring = std::function<int(const Word&)>;

/// A set of constant words starting at `anchor`, plus the empty word when
/// the predicate accepts it.
struct TargetSet {
  int anchor = 0;
  std::function<bool(const Word&)> contains;

  static TargetSet all(int anchor);
  static TargetSet none(int anchor);
  static TargetSet from_words(int anchor, std::vector<Word> words);
  static TargetSet color_class(int anchor, WordColoring coloring, int color);
};

enum class LargeOutcome { LargeUpTo, Counterexample };

struct LargenessReport {
  LargeOutcome outcome = LargeOutcome::LargeUpTo;
  std::size_t q = 0;
  std::optional<FiniteSubspace> counterexample;
  std::uint64_t candidates = 0;
  std::uint64_t words_tested = 0;
};

/// Every length-q further subspace of X has a span meeting E.
LargenessReport is_large_upto(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const FiniteSubspace& x,
                              std::size_t q);

/// E_f; E itself when f is empty.
TargetSet derived_set(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const Word& f);
/// E_x, the intersection of E_f over f in [x].
TargetSet derived_set_seq(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const FiniteSubspace& x);

/// Thrown when the search step is asked to start from a set that is not
/// large.
class NotLargeError : public PreconditionError {
 public:
  NotLargeError(const std::string& what, FiniteSubspace counterexample)
      : PreconditionError(what), counterexample_(std::move(counterexample)) {}
  const FiniteSubspace& counterexample() const noexcept { return counterexample_; }

 private:
  FiniteSubspace counterexample_;
};

struct PushStep {
  bool found = false;
  std::optional<Word> g;
  std::size_t prefix = 0;  // g lives on the range of X↾prefix
  std::optional<LargenessReport> report;
  std::uint64_t candidates = 0;
};

/// First g, with [g] ⊆ [X↾j], ws(g) dominating T(k) and |⊗ws(g)| = |⊗T(k)|,
/// whose derived set is large up to q - j in the tail X/X↾j.
PushStep push_large_step(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const FiniteSubspace& x,
                         int k, std::size_t q);

/// Y with E_i large up to q in Y for some part i, found by walking the
/// counterexamples; nullopt when the walk runs out of parts.
struct RamseyPart {
  std::size_t part = 0;
  FiniteSubspace y;
};
std::optional<RamseyPart> mild_ramsey(const CellSpace& space, Alphabet alphabet, const std::vector<TargetSet>& parts,
                                      const FiniteSubspace& x, std::size_t q);

struct TreeHjResult {
  std::optional<FiniteSubspace> witness;
  int color = 0;
  std::uint64_t candidates = 0;
  std::uint64_t examined = 0;
};

/// First length-q further subspace of X with a monochromatic span.
TreeHjResult tree_hj_search(const CellSpace& space, Alphabet alphabet, const WordColoring& coloring,
                            const FiniteSubspace& x, std::size_t q, int workers = 1);

/// Independent check of a tree-HJ witness; null when valid.
std::optional<std::string> tree_hj_defect(const CellSpace& space, Alphabet alphabet, const WordColoring& coloring,
                                          const FiniteSubspace& x, const FiniteSubspace& witness, int color);

}  // namespace hjt
