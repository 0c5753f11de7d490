#include "hjt/large.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "hjt/parallel.hpp"

namespace hjt {

TargetSet TargetSet::all(int anchor) {
  return {anchor, [anchor](const Word& w) { return w.empty() || w.bottom() == anchor; }};
}

TargetSet TargetSet::none(int anchor) {
  return {anchor, [](const Word&) { return false; }};
}

TargetSet TargetSet::from_words(int anchor, std::vector<Word> words) {
  for (const auto& w : words) {
    if (!w.empty() && w.bottom() != anchor) throw PreconditionError("target word does not start at the anchor");
  }
  auto set = std::make_shared<const std::set<Word>>(words.begin(), words.end());
  return {anchor, [set](const Word& w) { return set->count(w) > 0; }};
}

TargetSet TargetSet::color_class(int anchor, WordColoring coloring, int color) {
  return {anchor, [anchor, coloring = std::move(coloring), color](const Word& w) {
            if (!w.empty() && w.bottom() != anchor) return false;
            return coloring(w) == color;
          }};
}

namespace {

bool span_meets(Alphabet alphabet, const TargetSet& e, const FiniteSubspace& y, std::uint64_t& tested) {
  bool hit = false;
  for_each_in_span(alphabet, y.joined(), [&](const Word& f) {
    ++tested;
    hit = e.contains(f);
    return !hit;
  });
  return hit;
}

}  // namespace

LargenessReport is_large_upto(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const FiniteSubspace& x,
                              std::size_t q) {
  if (e.anchor != x.ell) throw PreconditionError("target set and subspace have different anchors");
  LargenessReport out;
  out.q = q;
  for_each_further_subspace(space, alphabet, x, q, [&](const FiniteSubspace& y) {
    ++out.candidates;
    if (span_meets(alphabet, e, y, out.words_tested)) return true;
    out.outcome = LargeOutcome::Counterexample;
    out.counterexample = y;
    return false;
  });
  return out;
}

TargetSet derived_set(const CellSpace&, Alphabet alphabet, const TargetSet& e, const Word& f) {
  if (f.empty()) return e;
  if (f.bottom() != e.anchor) throw PreconditionError("derived set of a word not starting at the anchor");
  auto words = std::make_shared<const std::vector<Word>>(span(alphabet, f));
  const int top = f.top();
  return {top, [words, e, top](const Word& g) {
            if (!g.empty() && g.bottom() != top) return false;
            return std::all_of(words->begin(), words->end(), [&](const Word& f1) { return e.contains(concat(f1, g)); });
          }};
}

TargetSet derived_set_seq(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const FiniteSubspace& x) {
  if (x.ell != e.anchor) throw PreconditionError("derived set of a sequence not anchored at the target");
  return derived_set(space, alphabet, e, x.joined());
}

PushStep push_large_step(const CellSpace& space, Alphabet alphabet, const TargetSet& e, const FiniteSubspace& x,
                         int k, std::size_t q) {
  if (q > x.length()) throw PreconditionError("working depth exceeds the subspace length");
  if (k < 0 || k >= space.height()) throw RangeError("target level outside the truncation");
  const auto check = is_large_upto(space, alphabet, e, x, q);
  if (check.outcome == LargeOutcome::Counterexample) {
    throw NotLargeError("target set is not large up to the working depth", *check.counterexample);
  }
  PushStep out;
  const auto target = full_level(space.vtree(), k);
  for (std::size_t j = 1; j <= q && !out.found; ++j) {
    const auto head = x.prefix(j);
    const FiniteSubspace tail{std::vector<Word>(x.blocks.begin() + static_cast<std::ptrdiff_t>(j), x.blocks.end()),
                              x.k + static_cast<int>(j), head.top()};
    VariableWordQuery query;
    query.bottom = x.ell;
    query.top = head.top();
    query.target = target;
    query.exact_size = static_cast<std::size_t>(target.product_size());
    query.host = head.joined();
    for_each_variable_word(space, alphabet, query, [&](const Word& g) {
      if (!span_subset(alphabet, g, *query.host)) return true;
      ++out.candidates;
      auto report = is_large_upto(space, alphabet, derived_set(space, alphabet, e, g), tail, q - j);
      if (report.outcome != LargeOutcome::LargeUpTo) return true;
      out.found = true;
      out.g = g;
      out.prefix = j;
      out.report = std::move(report);
      return false;
    });
  }
  return out;
}

std::optional<RamseyPart> mild_ramsey(const CellSpace& space, Alphabet alphabet, const std::vector<TargetSet>& parts,
                                      const FiniteSubspace& x, std::size_t q) {
  FiniteSubspace y = x;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto report = is_large_upto(space, alphabet, parts[i], y, q);
    if (report.outcome == LargeOutcome::LargeUpTo) return RamseyPart{i, y};
    y = *report.counterexample;
  }
  return std::nullopt;
}

namespace {

std::optional<int> mono_color(Alphabet alphabet, const WordColoring& coloring, const FiniteSubspace& y) {
  std::optional<int> color;
  bool mono = true;
  for_each_in_span(alphabet, y.joined(), [&](const Word& f) {
    const int c = coloring(f);
    if (!color) color = c;
    mono = *color == c;
    return mono;
  });
  return mono ? color : std::nullopt;
}

}  // namespace

TreeHjResult tree_hj_search(const CellSpace& space, Alphabet alphabet, const WordColoring& coloring,
                            const FiniteSubspace& x, std::size_t q, int workers) {
  if (auto defect = subspace_defect(space, alphabet, x)) throw StructuralError("host subspace: " + *defect);
  std::vector<FiniteSubspace> candidates;
  for_each_further_subspace(space, alphabet, x, q, [&](const FiniteSubspace& y) {
    candidates.push_back(y);
    return true;
  });
  TreeHjResult out;
  out.candidates = candidates.size();
  const auto best = parallel_find_first(candidates.size(), workers, [&](std::size_t i) {
    return mono_color(alphabet, coloring, candidates[i]).has_value();
  });
  out.examined = best < candidates.size() ? best + 1 : candidates.size();
  if (best < candidates.size()) {
    out.witness = candidates[best];
    out.color = *mono_color(alphabet, coloring, candidates[best]);
  }
  return out;
}

std::optional<std::string> tree_hj_defect(const CellSpace& space, Alphabet alphabet, const WordColoring& coloring,
                                          const FiniteSubspace& x, const FiniteSubspace& witness, int color) {
  if (witness.k != x.k || witness.ell != x.ell) return "witness anchor differs from the host";
  if (auto defect = subspace_defect(space, alphabet, witness)) return "witness: " + *defect;
  if (!is_further_subspace(alphabet, witness, x)) return "witness is not a further subspace of the host";
  for (const auto& f : span_sequence(alphabet, witness)) {
    if (coloring(f) != color) return "span word " + encode_word(space, f) + " has another color";
  }
  return std::nullopt;
}

}  // namespace hjt
