#include <doctest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "hjt/error.hpp"
#include "hjt/union.hpp"
#include "support.hpp"

using namespace hjt;

namespace {

int size_parity(const MinSet& u) { return static_cast<int>(u.size() % 2); }

}  // namespace

TEST_CASE("oracle: span_u agrees with every selection") {
  const CellSpace s(test::binary(3));
  const auto single = UFamily::singletons(s, test::all_levels(s.vtree()));
  CHECK(span_u(s, single) == span_u_bruteforce(s, single));
  CHECK(span_u(s, single).size() > single.size());
  const CellSpace s2(test::binary(2, 2));
  const auto product = UFamily::singletons(s2, test::all_levels(s2.vtree()));
  CHECK(span_u(s2, product) == span_u_bruteforce(s2, product));
  // Grouped sets: U_root = {root, (2:0)}, U_(1:1) = {(1:1), (2:3)}, and the
  // level-2 cells (2:1), (2:2) on their own.
  const VectorSubset base({full_level(s.vtree(), 0), VectorLevelSubset{1, {{1}}}, VectorLevelSubset{2, {{1, 2}}}});
  auto id = [&](int l, Index i) { return s.id({l, {i}}); };
  const UFamily grouped(s, base,
                        {{id(0, 0), {id(0, 0), id(2, 0)}},
                         {id(1, 1), {id(1, 1), id(2, 3)}},
                         {id(2, 1), {id(2, 1)}},
                         {id(2, 2), {id(2, 2)}}});
  CHECK(span_u(s, grouped) == span_u_bruteforce(s, grouped));
}

TEST_CASE("oracle: reduction_q is a bijection onto the rooted span") {
  const CellSpace s(test::binary(3));
  const auto u = UFamily::singletons(s, test::all_levels(s.vtree()));
  const auto all = span_u(s, u);
  for (CellId t = 0; t < s.size(); ++t) {
    const auto above = indices_above(s, u, t);
    std::set<MinSet> image;
    std::vector<std::uint8_t> f(above.size(), 0);
    for (std::uint32_t mask = 0; mask < (1U << above.size()); ++mask) {
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = mask >> i & 1U;
      const auto v = reduction_q(s, u, t, f);
      CHECK(set_minimum(s, v) == t);
      image.insert(v);
    }
    CHECK(image.size() == (std::size_t{1} << above.size()));
    std::set<MinSet> rooted;
    for (const auto& v : all) {
      if (set_minimum(s, v) == t) rooted.insert(v);
    }
    CHECK(image == rooted);
  }
}

TEST_CASE("oracle: folkman_search agrees with brute force") {
  for (int n = 1; n <= 5; ++n) {
    for (int k = 1; k <= std::min(n, 3); ++k) {
      for (int m = 2; m <= 3; ++m) {
        const SubsetColoring c = [m](std::uint32_t mask) { return std::popcount(mask) % m; };
        const auto found = folkman_search(n, k, c);
        CHECK(found.sets.has_value() == folkman_bruteforce(n, k, c));
        if (found.sets) CHECK_FALSE(folkman_defect(n, k, c, *found.sets).has_value());
      }
      const SubsetColoring low = [](std::uint32_t mask) { return static_cast<int>(mask & 1U); };
      CHECK(folkman_search(n, k, low).sets.has_value() == folkman_bruteforce(n, k, low));
    }
  }
}

TEST_CASE("oracle: small Folkman levels agree with exhaustive colorings") {
  const auto res = folkman_number(2, 2, 5);
  REQUIRE(res.resolved);
  CHECK(res.value == 5);
  for (int n = 1; n <= 3; ++n) {
    const std::uint32_t subsets = (1U << n) - 1;
    bool forced = true;
    for (std::uint32_t col = 0; col < (1U << subsets) && forced; ++col) {
      forced = folkman_bruteforce(n, 2, [col](std::uint32_t mask) { return static_cast<int>(col >> (mask - 1) & 1U); });
    }
    CHECK(res.levels[static_cast<std::size_t>(n - 1)].forced == forced);
  }
  REQUIRE(res.avoiding.size() == 15);
  CHECK_FALSE(folkman_bruteforce(4, 2, [&](std::uint32_t mask) { return res.avoiding[mask - 1]; }));
}

TEST_CASE("min sets and families") {
  const CellSpace s(test::binary(3));
  auto id = [&](int l, Index i) { return s.id({l, {i}}); };
  CHECK(set_minimum(s, MinSet{id(1, 0), id(2, 1)}) == id(1, 0));
  CHECK_FALSE(set_minimum(s, MinSet{id(1, 0), id(1, 1)}).has_value());
  CHECK_FALSE(set_minimum(s, MinSet{}).has_value());
  CHECK(encode_min_set(s, {id(1, 0), id(2, 1)}) == "1:0;2:1");
  CHECK(parse_min_set(s, "2:1;1:0") == MinSet{id(1, 0), id(2, 1)});
  CHECK_THROWS_AS(parse_min_set(s, "3:0"), Error);
  const VectorSubset base({full_level(s.vtree(), 1)});
  CHECK_THROWS_AS(UFamily(s, base, {{id(1, 0), {id(1, 0), id(2, 2)}}, {id(1, 1), {id(1, 1)}}}), StructuralError);
  CHECK_THROWS_AS(UFamily(s, base, {{id(1, 0), {id(1, 0), id(2, 2)}}, {id(1, 1), {id(1, 1), id(2, 2)}}}),
                  StructuralError);
  CHECK_THROWS_AS(UFamily(s, base, {{id(1, 0), {id(1, 0)}}}), StructuralError);
  const UFamily ok(s, base, {{id(1, 1), {id(1, 1), id(2, 3)}}, {id(1, 0), {id(1, 0), id(2, 0)}}});
  CHECK(ok.indices() == std::vector<CellId>{id(1, 0), id(1, 1)});
  CHECK(ok.at(id(1, 1)) == MinSet{id(1, 1), id(2, 3)});
}

TEST_CASE("union spans") {
  const CellSpace s(test::binary(3));
  auto id = [&](int l, Index i) { return s.id({l, {i}}); };
  const auto u = UFamily::singletons(s, test::all_levels(s.vtree()));
  CHECK(union_span(s, u, std::vector<CellId>{id(1, 1)}) == MinSet{id(1, 1)});
  CHECK(union_span(s, u, std::vector<CellId>{id(0, 0), id(2, 3)}) == MinSet{id(0, 0), id(2, 3)});
  CHECK_FALSE(union_span(s, u, std::vector<CellId>{id(1, 0), id(1, 1)}).has_value());
  const auto one = UFamily::singletons(s, VectorSubset({VectorLevelSubset{2, {{2}}}}));
  CHECK(span_u(s, one).size() == 1);
  const auto antichain = UFamily::singletons(s, VectorSubset({full_level(s.vtree(), 1)}));
  CHECK(span_u(s, antichain).size() == 2);
  const auto chain = UFamily::singletons(s, VectorSubset({full_level(s.vtree(), 0), VectorLevelSubset{1, {{0}}}}));
  CHECK(span_u(s, chain).size() == 3);
}

TEST_CASE("reduction_q ends and truncation") {
  const CellSpace s(test::binary(3));
  const auto u = UFamily::singletons(s, test::all_levels(s.vtree()));
  const CellId t = s.id({1, {0}});
  const auto above = indices_above(s, u, t);
  CHECK(above.size() == 2);
  CHECK(reduction_q(s, u, t, std::vector<std::uint8_t>(2, 0)) == MinSet{t});
  CHECK(reduction_q(s, u, t, std::vector<std::uint8_t>(2, 1)).size() == 3);
  CHECK_THROWS_AS(reduction_q(s, u, t, std::vector<std::uint8_t>(3, 0)), Error);
  const auto cut = truncate(s, u, 2);
  CHECK(cut.size() == 3);
  CHECK(cut.base().level_set() == std::vector<int>{0, 1});
}

TEST_CASE("min_determined_check") {
  const CellSpace s(test::binary(3));
  const auto u = UFamily::singletons(s, test::all_levels(s.vtree()));
  const SetColoring level = [&](const MinSet& v) { return s.level(*set_minimum(s, v)) % 2; };
  CHECK_FALSE(min_determined_check(s, level, u, 3).has_value());
  CHECK_FALSE(min_determined_check(s, [](const MinSet&) { return 1; }, u, 3).has_value());
  const auto bad = min_determined_check(s, size_parity, u, 3);
  REQUIRE(bad.has_value());
  CHECK(set_minimum(s, bad->first) == set_minimum(s, bad->second));
  CHECK(size_parity(bad->first) != size_parity(bad->second));
}

TEST_CASE("lemma92_step") {
  const CellSpace s(test::binary(3));
  const auto u = UFamily::singletons(s, test::all_levels(s.vtree()));
  const CellId root = 0;
  const auto constant = lemma92_step(s, [](const MinSet&) { return 0; }, u, root, 1);
  REQUIRE(constant.found);
  const SetColoring level = [&](const MinSet& v) { return s.level(*set_minimum(s, v)) % 2; };
  CHECK(lemma92_step(s, level, u, root, 1).found);
  const auto parity = lemma92_step(s, size_parity, u, root, 1);
  if (parity.found) {
    // Every span element rooted at t now has one color.
    std::set<int> colors;
    for (const auto& v : span_u(s, parity.family)) {
      if (set_minimum(s, v) == root) colors.insert(size_parity(v));
    }
    CHECK(colors.size() == 1);
  } else {
    CHECK_FALSE(parity.note.empty());
  }
  const auto shallow = lemma92_step(s, size_parity, u, s.id({2, {0}}), 1);
  CHECK_FALSE(shallow.found);
  CHECK_FALSE(shallow.note.empty());
  CHECK_THROWS_AS(lemma92_step(s, size_parity, truncate(s, u, 1), s.id({1, {0}}), 1), PreconditionError);
}

TEST_CASE("hl_search") {
  const CellSpace s(test::binary(4));
  const auto d = test::all_levels(s.vtree());
  const CellColoring one = [](CellId) { return 1; };
  const auto i = hl_search(s, one, d, 2);
  REQUIRE(i.witness);
  CHECK(i.witness->branch == HlBranch::Dense);
  CHECK(i.witness->d == test::all_levels(s.vtree(), 2));
  CHECK_FALSE(hl_defect(s, one, d, 2, *i.witness).has_value());
  const CellColoring zero = [](CellId) { return 0; };
  const auto ii = hl_search(s, zero, d, 2);
  REQUIRE(ii.witness);
  CHECK(ii.witness->branch == HlBranch::TDense);
  CHECK(ii.witness->anchor == CellId{0});
  CHECK_FALSE(hl_defect(s, zero, d, 2, *ii.witness).has_value());
  CHECK(hl_defect(s, one, d, 2, *ii.witness).has_value());
  const CellSpace s5(test::binary(5));
  const CellColoring parity = [&](CellId c) { return s5.level(c) % 2; };
  const auto p = hl_search(s5, parity, test::all_levels(s5.vtree()), 2);
  REQUIRE(p.witness);
  const auto levels = p.witness->d.level_set();
  REQUIRE(levels.size() == 2);
  CHECK(levels[0] % 2 == levels[1] % 2);
  CHECK_FALSE(hl_defect(s5, parity, test::all_levels(s5.vtree()), 2, *p.witness).has_value());
  const CellSpace s2(test::binary(3, 2));
  const CellColoring first = [&](CellId c) { return static_cast<int>(s2.coordinate(c, 0) % 2); };
  const auto q = hl_search(s2, first, test::all_levels(s2.vtree()), 2);
  REQUIRE(q.witness);
  CHECK_FALSE(hl_defect(s2, first, test::all_levels(s2.vtree()), 2, *q.witness).has_value());
}

TEST_CASE("disjoint_union_search") {
  const CellSpace s(test::binary(4));
  const auto u = UFamily::singletons(s, test::all_levels(s.vtree()));
  const SetColoring one = [](const MinSet&) { return 1; };
  const auto c1 = disjoint_union_search(s, one, u, 4, 2, 1);
  REQUIRE(c1.pattern);
  CHECK(c1.pattern->branch == HlBranch::Dense);
  CHECK(c1.repairs == 0);
  CHECK_FALSE(du_defect(s, one, u, 2, *c1.pattern, c1.family).has_value());
  const SetColoring level = [&](const MinSet& v) { return s.level(*set_minimum(s, v)) % 2; };
  const auto lv = disjoint_union_search(s, level, u, 4, 2, 1);
  const auto hl = hl_search(s, [&](CellId c) { return s.level(c) % 2; }, test::all_levels(s.vtree()), 2);
  REQUIRE(lv.pattern);
  REQUIRE(hl.witness);
  CHECK(lv.pattern->d == hl.witness->d);
  CHECK(lv.pattern->branch == hl.witness->branch);
  CHECK_FALSE(du_defect(s, level, u, 2, *lv.pattern, lv.family).has_value());
  const CellSpace s3(test::binary(3));
  const auto u3 = UFamily::singletons(s3, test::all_levels(s3.vtree()));
  const auto parity = disjoint_union_search(s3, size_parity, u3, 3, 2, 1);
  if (parity.pattern) {
    CHECK_FALSE(du_defect(s3, size_parity, u3, 2, *parity.pattern, parity.family).has_value());
  } else {
    CHECK_FALSE(parity.notes.empty());
  }
  const auto four = disjoint_union_search(s3, size_parity, u3, 3, 2, 1, 4);
  CHECK(four.notes == parity.notes);
  CHECK(four.repairs == parity.repairs);
}

TEST_CASE("folkman examples") {
  for (int c = 1; c <= 3; ++c) {
    const auto f = folkman_number(1, c, 3);
    REQUIRE(f.resolved);
    CHECK(f.value == 1);
  }
  const auto single = folkman_search(3, 1, [](std::uint32_t m) { return std::popcount(m) % 2; });
  REQUIRE(single.sets);
  CHECK(single.sets->size() == 1);
  const auto parity = folkman_search(3, 2, [](std::uint32_t m) { return std::popcount(m) % 2; });
  CHECK_FALSE(parity.sets.has_value());
  const auto constant = folkman_search(3, 3, [](std::uint32_t) { return 0; });
  REQUIRE(constant.sets);
  CHECK(*constant.sets == std::vector<std::uint32_t>{1, 2, 4});
  CHECK(folkman_defect(3, 2, [](std::uint32_t) { return 0; }, std::vector<std::uint32_t>{3, 1}).has_value());
  CHECK(folkman_number(2, 2, 5, 1).avoiding == folkman_number(2, 2, 5, 4).avoiding);
  CHECK_THROWS_AS(folkman_number(2, 2, 7), Error);
}

TEST_CASE("counterexample coloring") {
  const CellSpace s(test::binary(4));
  auto id = [&](int l, Index i) { return s.id({l, {i}}); };
  CHECK(counterexample_color(s, {id(0, 0)}, {id(1, 0)}) == 0);
  CHECK(counterexample_color(s, {id(0, 0), id(1, 1)}, {id(1, 0)}) == 1);
  CHECK(counterexample_color(s, {id(0, 0), id(2, 0), id(2, 3)}, {id(2, 1)}) == 0);
  CHECK_THROWS_AS(counterexample_color(CellSpace(test::binary(3, 2)), {0}, {1}), PreconditionError);
}

TEST_CASE("strong subtrees") {
  const Tree b({2, 2, 2});
  std::size_t n = 0;
  for_each_strong_subtree(b, 2, 4, [&](const StrongSubtree& st) {
    CHECK(st.levels.size() == 2);
    CHECK(st.nodes[0].size() == 1);
    CHECK(st.nodes[1].size() == 2);
    ++n;
    return true;
  });
  CHECK(n > 0);
}

TEST_CASE("verify_counterexample") {
  const auto b = verify_counterexample(Tree({2, 2, 2}), 2, 4);
  CHECK(b.holds);
  CHECK_FALSE(b.capped);
  CHECK(b.subtrees > 0);
  CHECK(verify_counterexample(Tree({2, 2, 2}), 1, 4).holds);
  const auto path = verify_counterexample(Tree({1, 1, 1}), 2, 4);
  CHECK_FALSE(path.holds);
  REQUIRE(path.failing_family);
  const auto capped = verify_counterexample(Tree({2, 2, 2}), 2, 4, 3);
  CHECK(capped.capped);
  CHECK_THROWS_AS(verify_counterexample(Tree({2, 2, 2}), 2, 4, 0), InputError);
}
