#include <doctest.h>

#include <set>

#include "hjt/error.hpp"
#include "hjt/large.hpp"
#include "support.hpp"

using namespace hjt;

namespace {

int parity(const Word& w) { return test::count_letter(w, 0) % 2; }

}  // namespace

TEST_CASE("oracle: tree-HJ witnesses exist exactly when a color class is not large") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  std::vector<WordColoring> colorings{parity, [](const Word& w) { return test::count_letter(w, 1) % 2; },
                                      [](const Word& w) { return w.symbols().empty() ? 0 : w.symbols()[0].letter_value(); },
                                      [](const Word&) { return 0; }};
  for (const auto& c : colorings) {
    for (std::size_t q = 1; q <= 2; ++q) {
      const auto direct = tree_hj_search(s, a, c, x, q);
      const bool large0 = is_large_upto(s, a, TargetSet::color_class(0, c, 0), x, q).outcome == LargeOutcome::LargeUpTo;
      const bool large1 = is_large_upto(s, a, TargetSet::color_class(0, c, 1), x, q).outcome == LargeOutcome::LargeUpTo;
      CHECK(direct.witness.has_value() == (!large0 || !large1));
      if (direct.witness) CHECK_FALSE(tree_hj_defect(s, a, c, x, *direct.witness, direct.color).has_value());
    }
  }
}

TEST_CASE("oracle: single-word targets by brute force on height 2") {
  const CellSpace s(test::binary(2));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 2);
  const auto words = span_sequence(a, x.prefix(1));
  for (const auto& w : words) {
    bool brute = true;
    for_each_further_subspace(s, a, x, 1, [&](const FiniteSubspace& y) {
      const auto sp = span(a, y.joined());
      brute = brute && std::find(sp.begin(), sp.end(), w) != sp.end();
      return true;
    });
    const auto r = is_large_upto(s, a, TargetSet::from_words(0, {w}), x, 1);
    CHECK((r.outcome == LargeOutcome::LargeUpTo) == brute);
    CHECK_FALSE(brute);
  }
}

TEST_CASE("is_large_upto examples") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  for (std::size_t q = 0; q <= 3; ++q) {
    CHECK(is_large_upto(s, a, TargetSet::all(0), x, q).outcome == LargeOutcome::LargeUpTo);
  }
  const auto none = is_large_upto(s, a, TargetSet::none(0), x, 2);
  CHECK(none.outcome == LargeOutcome::Counterexample);
  REQUIRE(none.counterexample);
  CHECK(*none.counterexample == x.prefix(2));
  CHECK(none.candidates == 1);
  CHECK_THROWS_AS(is_large_upto(s, a, TargetSet::all(1), x, 1), PreconditionError);
}

TEST_CASE("derived sets") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  const auto e = TargetSet::color_class(0, parity, 0);
  const auto same = derived_set(s, a, e, Word(0, 0, {}));
  for (const auto& g : span_sequence(a, x.prefix(2))) CHECK(same.contains(g) == e.contains(g));

  const auto f = Word::constant(0, 1, {1});
  const auto ef = derived_set(s, a, e, f);
  CHECK(ef.anchor == 1);
  const FiniteSubspace rest{{x.blocks[1]}, 1, 1};
  for (const auto& g : span_sequence(a, rest)) CHECK(ef.contains(g) == e.contains(concat(f, g)));

  const FiniteSubspace pair{{x.blocks[0], x.blocks[1]}, 0, 0};
  const auto words = span_sequence(a, pair);
  const auto en = TargetSet::from_words(0, words);
  const auto derived = derived_set(s, a, en, x.blocks[0]);
  const auto tail = span(a, x.blocks[1]);
  for (const auto& h : tail) CHECK(derived.contains(h));
  for (const auto& h : span_sequence(a, FiniteSubspace{{x.blocks[1], x.blocks[2]}, 1, 1})) CHECK_FALSE(derived.contains(h));

  const auto one = derived_set_seq(s, a, e, FiniteSubspace{{f}, 0, 0});
  for (const auto& g : span_sequence(a, rest)) CHECK(one.contains(g) == ef.contains(g));
  const auto whole = derived_set_seq(s, a, TargetSet::all(0), x.prefix(2));
  for (const auto& g : span(a, x.blocks[2])) CHECK(whole.contains(g));
  CHECK_THROWS_AS(derived_set(s, a, e, Word::constant(1, 2, {0, 0})), PreconditionError);
}

TEST_CASE("derived sets are antitone in the sequence") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  // Odd number of zeros on level 2, or equal letters on level 1.
  const auto e = TargetSet::color_class(0, [](const Word& w) {
    int c = 0;
    for (std::size_t i = 3; i < w.size(); ++i) c += w[i] == Symbol::letter(0);
    return w[1] == w[2] ? 1 : c % 2;
  }, 1);
  const auto big = x.prefix(2);
  std::size_t hits = 0;
  std::size_t gained = 0;
  const auto probes = span(a, x.blocks[2]);
  std::size_t pairs = 0;
  const auto ex = derived_set_seq(s, a, e, big);
  for (const auto& g : enumerate_variable_words(s, a, {0, 2, full_level(s.vtree(), 0)})) {
    if (!span_subset(a, g, big.joined())) continue;
    const auto ey = derived_set_seq(s, a, e, FiniteSubspace{{g}, 0, 0});
    for (const auto& h : probes) {
      if (ex.contains(h)) CHECK(ey.contains(h));
      hits += ex.contains(h);
      gained += ey.contains(h) && !ex.contains(h);
    }
    ++pairs;
  }
  CHECK(pairs > 1);
  CHECK(hits > 0);
  CHECK(gained > 0);
}

TEST_CASE("push_large_step") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  const auto all = push_large_step(s, a, TargetSet::all(0), x, 0, 2);
  REQUIRE(all.found);
  CHECK(all.candidates == 1);
  CHECK(all.prefix == 1);
  CHECK(span_subset(a, *all.g, x.prefix(1).joined()));
  CHECK_THROWS_AS(push_large_step(s, a, TargetSet::none(0), x, 0, 1), NotLargeError);
  try {
    push_large_step(s, a, TargetSet::none(0), x, 0, 1);
  } catch (const NotLargeError& err) {
    CHECK(err.counterexample() == x.prefix(1));
  }
  // E = [Z] for a further subspace Z of X.
  FiniteSubspace z{{x.blocks[0], parse_word(s, "[1,3) v(1:0) v(1:1) v(1:0) a0 a1 v(1:1)")}, 0, 0};
  REQUIRE_FALSE(subspace_defect(s, a, z).has_value());
  const auto ez = TargetSet::from_words(0, span_sequence(a, z));
  const auto step = push_large_step(s, a, ez, z, 0, 2);
  REQUIRE(step.found);
  CHECK(span_subset(a, *step.g, z.blocks[0]));
  CHECK(step.report->outcome == LargeOutcome::LargeUpTo);
}

TEST_CASE("mild Ramsey splits") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  for (std::size_t q = 1; q <= 2; ++q) {
    std::vector<TargetSet> parts{TargetSet::color_class(0, parity, 0), TargetSet::color_class(0, parity, 1)};
    const auto r = mild_ramsey(s, a, parts, x, q);
    REQUIRE(r.has_value());
    CHECK(is_large_upto(s, a, parts[r->part], r->y, q).outcome == LargeOutcome::LargeUpTo);
    CHECK(is_further_subspace(a, r->y, x));
  }
  CHECK_FALSE(mild_ramsey(s, a, {TargetSet::none(0)}, x, 1).has_value());
}

TEST_CASE("tree_hj_search") {
  const CellSpace s(test::binary(3));
  const Alphabet a(2);
  const auto x = standard_subspace(s, 0, 0, 3);
  const auto constant = tree_hj_search(s, a, [](const Word&) { return 3; }, x, 2);
  REQUIRE(constant.witness);
  CHECK(*constant.witness == x.prefix(2));
  CHECK(constant.color == 3);
  CHECK(constant.examined == 1);
  const auto p1 = tree_hj_search(s, a, parity, x, 1);
  REQUIRE(p1.witness);
  CHECK_FALSE(tree_hj_defect(s, a, parity, x, *p1.witness, p1.color).has_value());
  CHECK(tree_hj_defect(s, a, parity, x, *p1.witness, 1 - p1.color).has_value());
  CHECK_FALSE(tree_hj_search(s, a, parity, x, 2).witness.has_value());
  // Injective on a two-word span, with only the block itself available.
  const CellSpace s1(test::binary(1));
  const auto x1 = standard_subspace(s1, 0, 0, 1);
  const auto inj = tree_hj_search(s1, a, [](const Word& w) { return int(w.symbols()[0].letter_value()); }, x1, 1);
  CHECK_FALSE(inj.witness.has_value());
  const auto four = tree_hj_search(s, a, parity, x, 1, 4);
  CHECK(four.witness == p1.witness);
  CHECK(four.examined == p1.examined);
  FiniteSubspace broken = x;
  broken.blocks[1] = Word::constant(1, 2, {0, 0});
  CHECK_THROWS_AS(tree_hj_search(s, a, parity, broken, 1), StructuralError);
}
