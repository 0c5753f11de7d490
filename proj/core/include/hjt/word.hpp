#pragma once

// Words on the level product of a vector tree.
//
// A word is a map from the cells of the levels [bottom, top) into an alphabet
// of letters, optionally extended by variables v_s indexed by cells s. Its
// symbols are stored in CellId order. The same type carries constant words,
// variable words and the symbolic concatenations of whole subspaces; the
// validity predicates below say which is which.

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hjt/tree.hpp"

namespace hjt {

using Letter = std::uint16_t;

struct Alphabet {
  int size = 2;

  explicit Alphabet(int k = 2);
  friend bool operator==(Alphabet, Alphabet) = default;
};

class Symbol {
 public:
  constexpr Symbol() = default;
  static constexpr Symbol letter(Letter a) { return Symbol(static_cast<std::int32_t>(a)); }
  static constexpr Symbol variable(CellId s) { return Symbol(-static_cast<std::int32_t>(s) - 1); }

  constexpr bool is_letter() const noexcept { return raw_ >= 0; }
  constexpr bool is_variable() const noexcept { return raw_ < 0; }
  constexpr Letter letter_value() const noexcept { return static_cast<Letter>(raw_); }
  constexpr CellId variable_cell() const noexcept { return static_cast<CellId>(-(raw_ + 1)); }

  friend constexpr bool operator==(Symbol, Symbol) = default;
  // Letters sort before variables; letters by value, variables by cell.
  friend constexpr std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.is_letter() != b.is_letter()) return a.is_letter() ? std::strong_ordering::less
                                                              : std::strong_ordering::greater;
    if (a.is_letter()) return a.raw_ <=> b.raw_;
    return a.variable_cell() <=> b.variable_cell();
  }

 private:
  constexpr explicit Symbol(std::int32_t raw) : raw_(raw) {}
  std::int32_t raw_ = 0;
};

class Word {
 public:
  /// The empty function.
  Word() = default;
  Word(int bottom, int top, std::vector<Symbol> symbols);

  static Word constant(int bottom, int top, std::vector<Letter> letters);

  int bottom() const noexcept { return bottom_; }
  int top() const noexcept { return top_; }
  bool empty() const noexcept { return bottom_ == top_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }
  Symbol operator[](std::size_t offset) const { return symbols_[offset]; }
  /// Symbol at an absolute cell id.
  Symbol at(const CellSpace& space, CellId c) const;

  bool is_constant() const noexcept;
  /// Distinct variable cells, sorted.
  std::vector<CellId> variables() const;

  friend bool operator==(const Word& a, const Word& b);
  /// Canonical order: empty words first, then by (bottom, top, symbols).
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  int bottom_ = 0;
  int top_ = 0;
  std::vector<Symbol> symbols_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

/// `[m,n)` followed by one symbol per cell: letters `a<i>`, variables
/// `v(<level>:<i1>,...,<id>)`.
std::string encode_word(const CellSpace& space, const Word& w);
Word parse_word(const CellSpace& space, std::string_view text);

/// Null when `w` is a valid variable word, otherwise the first violated
/// condition. Throws StructuralError when the word does not fit the space.
std::optional<std::string> variable_word_defect(const CellSpace& space, Alphabet alphabet,
                                                 const Word& w);
bool validate_variable_word(const CellSpace& space, Alphabet alphabet, const Word& w);

/// The vector level subset ws(w) of a valid variable word.
VectorLevelSubset support(const CellSpace& space, const Word& w);

/// Replace v_s by family[i] where s is the i-th entry of w.variables().
Word substitute(const Word& w, std::span<const Letter> family);

/// |alphabet|^(number of distinct variables).
std::uint64_t span_size(Alphabet alphabet, const Word& w);

/// Visit every substitution instance of `w` (any symbolic word), stopping
/// when `visit` returns false. Families are counted as an odometer whose most
/// significant digit is the smallest variable cell.
void for_each_in_span(Alphabet alphabet, const Word& w,
                      const std::function<bool(const Word&)>& visit);
std::vector<Word> span(Alphabet alphabet, const Word& w);

bool compatible(const Word& a, const Word& b);
/// The union a ∪ b of abutting words; either may be empty.
Word concat(const Word& a, const Word& b);
std::vector<Word> concat_spans(const std::vector<Word>& a, const std::vector<Word>& b);

/// Constant `w` lies in the span of symbolic `host`.
bool span_contains(Alphabet alphabet, const Word& host, const Word& w);
/// Span of symbolic `inner` is contained in the span of symbolic `host`.
bool span_subset(Alphabet alphabet, const Word& inner, const Word& host);

/// The unique variable word whose span is exactly `words`, if there is one.
/// Needs at least two letters.
std::optional<Word> word_from_span(const CellSpace& space, Alphabet alphabet,
                                   const std::vector<Word>& words);

// ---------------------------------------------------------------------------
// Finite (k, ell)-subspaces

struct FiniteSubspace {
  std::vector<Word> blocks;
  int k = 0;
  int ell = 0;

  std::size_t length() const noexcept { return blocks.size(); }
  int top() const noexcept { return blocks.empty() ? ell : blocks.back().top(); }
  /// Union of all blocks, as one symbolic word on [ell, top).
  Word joined() const;
  FiniteSubspace prefix(std::size_t j) const;

  friend bool operator==(const FiniteSubspace&, const FiniteSubspace&) = default;
};

std::optional<std::string> subspace_defect(const CellSpace& space, Alphabet alphabet,
                                           const FiniteSubspace& x);

/// [f_0]^[f_1]^... by iterated concatenation; {∅} for the empty sequence.
std::vector<Word> span_sequence(Alphabet alphabet, const FiniteSubspace& x);

/// Block i is the level ell + i with every cell carrying its own variable.
FiniteSubspace standard_subspace(const CellSpace& space, int k, int ell, int length);

/// [y] ⊆ [x] where [x] is the union of the spans of the prefixes of x.
bool is_further_subspace(Alphabet alphabet, const FiniteSubspace& y, const FiniteSubspace& x);

/// X/x: the blocks of X after the unique prefix that contains x.
FiniteSubspace quotient(Alphabet alphabet, const FiniteSubspace& big, const FiniteSubspace& x);

// ---------------------------------------------------------------------------
// Enumeration

struct VariableWordQuery {
  int bottom = 0;
  int top = 1;
  /// The support must dominate this vector level.
  VectorLevelSubset target;
  std::size_t size_cap = std::numeric_limits<std::size_t>::max();
  /// When set, |⊗support| must equal this value.
  std::optional<std::size_t> exact_size;
  /// When set, cells where the host carries a letter keep that letter.
  std::optional<Word> host;
};

/// Every valid variable word on [bottom, top) matching the query, each once.
/// Order: support level, then per-coordinate support masks, then the set of
/// extra occurrence levels, then symbols cell by cell (letters before the
/// variable).
void for_each_variable_word(const CellSpace& space, Alphabet alphabet, const VariableWordQuery& query,
                            const std::function<bool(const Word&)>& visit);
std::vector<Word> enumerate_variable_words(
    const CellSpace& space, Alphabet alphabet, const VariableWordQuery& query,
    std::size_t limit = std::numeric_limits<std::size_t>::max());

/// Length-q further subspaces y of `x` whose block boundaries are block
/// boundaries of `x`. Each y is a finite (x.k, x.ell)-subspace with
/// [y] ⊆ [x↾j] for some j. The prefix x↾q comes first; the rest follow
/// boundary choices in lexicographic order.
void for_each_further_subspace(const CellSpace& space, Alphabet alphabet, const FiniteSubspace& x,
                               std::size_t q, const std::function<bool(const FiniteSubspace&)>& visit);

// ---------------------------------------------------------------------------
// Span text

std::string format_span(const CellSpace& space, std::span<const Word> words);
std::vector<Word> parse_span(const CellSpace& space, std::string_view text);

}  // namespace hjt
