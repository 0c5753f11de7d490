// Acceptance checks: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hjt/certificate.hpp"
#include "hjt/large.hpp"
#include "hjt/lines.hpp"
#include "hjt/shell.hpp"
#include "hjt/union.hpp"
#include "hjt/word.hpp"

using namespace hjt;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

VectorTree binary(int height, int dim = 1) {
  return VectorTree(std::vector<Tree>(static_cast<std::size_t>(dim),
                                      Tree(std::vector<Index>(static_cast<std::size_t>(height - 1), 2))));
}

VectorSubset all_levels(const VectorTree& vt) {
  std::vector<VectorLevelSubset> out;
  for (int n = 0; n < vt.height(); ++n) out.push_back(full_level(vt, n));
  return VectorSubset(std::move(out));
}

std::uint64_t ipow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Brute-force double loop: every line, every pair of letters.
bool mono_line_double_loop(int k, int n, const std::vector<int>& colors) {
  std::vector<int> sym(static_cast<std::size_t>(n), 0);
  while (true) {
    if (std::count(sym.begin(), sym.end(), k) > 0) {
      bool mono = true;
      int first = -1;
      for (int a = 0; a < k && mono; ++a) {
        std::uint64_t idx = 0;
        for (int s : sym) idx = idx * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(s == k ? a : s);
        if (first < 0) first = colors[idx];
        mono = colors[idx] == first;
      }
      if (mono) return true;
    }
    std::size_t i = sym.size();
    while (i-- > 0) {
      if (++sym[i] <= k) break;
      sym[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return false;
  }
}

Check criterion1() {
  Check c;
  const auto res = hj_number(2, 2, 4);
  c.require(res.resolved && res.value == 2, "hj_number(2,2) != 2");
  std::size_t avoid1 = 0;
  for (int col = 0; col < 4; ++col) avoid1 += !mono_line_double_loop(2, 1, {col & 1, col >> 1 & 1});
  std::size_t avoid2 = 0;
  for (int col = 0; col < 16; ++col) {
    avoid2 += !mono_line_double_loop(2, 2, {col & 1, col >> 1 & 1, col >> 2 & 1, col >> 3 & 1});
  }
  c.require(avoid1 == 2, "oracle: expected 2 avoiding colorings of {0,1}^1");
  c.require(avoid2 == 0, "oracle: an avoiding coloring of {0,1}^2 exists");
  c.require(res.avoiding && !mono_line_double_loop(2, 1, res.avoiding->colors), "avoiding coloring has a line");
  c.require(res.levels.size() == 2 && !res.levels[0].forced && res.levels[1].forced, "level pattern");
  return c;
}

Check criterion2() {
  Check c;
  for (int k = 1; k <= 3; ++k) {
    for (int n = 1; n <= 4; ++n) {
      const auto lines = combinatorial_lines(k, n);
      const auto expect = ipow(static_cast<std::uint64_t>(k + 1), static_cast<std::uint64_t>(n)) -
                          ipow(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
      std::set<std::string> raw;
      const auto total = ipow(static_cast<std::uint64_t>(k + 1), static_cast<std::uint64_t>(n));
      for (std::uint64_t i = 0; i < total; ++i) {
        std::string s;
        for (std::uint64_t x = i, j = 0; j < static_cast<std::uint64_t>(n); ++j, x /= static_cast<std::uint64_t>(k + 1)) {
          const auto d = static_cast<int>(x % static_cast<std::uint64_t>(k + 1));
          s.insert(s.begin(), d == k ? 'v' : static_cast<char>('0' + d));
        }
        if (s.find('v') != std::string::npos) raw.insert(s);
      }
      std::set<std::string> got;
      for (const auto& l : lines) got.insert(encode_classic(l));
      c.require(lines.size() == expect && line_count(k, n) == expect, "count mismatch");
      c.require(got == raw, "line set differs from raw strings");
    }
  }
  return c;
}

Check criterion3() {
  Check c;
  std::size_t words = 0;
  std::size_t sequences = 0;
  const std::vector<std::pair<VectorTree, int>> hosts{{binary(3), 0}, {binary(2, 2), 0}, {binary(3, 2), 1}};
  for (int k = 1; k <= 3 && words < 200; ++k) {
    const Alphabet a(k);
    for (const auto& [vt, from] : hosts) {
      if (words >= 200) break;
      const CellSpace s(vt);
      for (int bottom = from; bottom < s.height() && words < 200; ++bottom) {
        VariableWordQuery q{bottom, s.height(), full_level(vt, bottom)};
        for (const auto& w : enumerate_variable_words(s, a, q, 25)) {
          if (words >= 200) break;
          c.require(validate_variable_word(s, a, w), "enumerated word is invalid");
          const auto sp = span(a, w);
          const std::set<Word> distinct(sp.begin(), sp.end());
          const auto expect = ipow(static_cast<std::uint64_t>(k), support(s, w).product_size());
          c.require(distinct.size() == expect, "span size " + std::to_string(distinct.size()) + " for " + encode_word(s, w));
          ++words;
        }
      }
    }
  }
  c.require(words == 200, "fewer than 200 words enumerated");
  for (int k = 1; k <= 3; ++k) {
    const Alphabet a(k);
    const CellSpace s(binary(3));
    for_each_further_subspace(s, a, standard_subspace(s, 0, 0, 3), 2, [&](const FiniteSubspace& y) {
      std::uint64_t product = 1;
      for (const auto& b : y.blocks) product *= span_size(a, b);
      const auto seq = span_sequence(a, y);
      c.require(seq.size() == product && std::set<Word>(seq.begin(), seq.end()).size() == product,
                "span_sequence size differs from the product of block spans");
      ++sequences;
      return sequences % 400 != 0;
    });
  }
  c.require(sequences > 0, "no sequences checked");
  return c;
}

Check criterion4() {
  Check c;
  const SubsetColoring parity = [](std::uint32_t m) { return __builtin_popcount(m) % 2; };
  c.require(!folkman_search(3, 2, parity).sets.has_value(), "parity on 3 elements has a configuration");
  c.require(!folkman_bruteforce(3, 2, parity), "oracle disagrees on parity");
  const auto res = folkman_number(2, 2, 5);
  c.require(res.resolved && res.value == 5, "folkman_number(2,2,5) != 5");
  c.require(res.levels.size() == 5 && res.levels[4].forced, "size 5 not forced");
  c.require(res.avoiding.size() == 15, "avoiding coloring size");
  if (res.avoiding.size() == 15) {
    c.require(!folkman_bruteforce(4, 2, [&](std::uint32_t m) { return res.avoiding[m - 1]; }),
              "avoiding coloring admits a configuration");
  }
  const auto cert = run(parse_config({"folkman", "--k", "2", "--colors", "2", "--nmax", "5"})).cert;
  c.require(cert.outcome == Outcome::Witness && cert.validated, "certificate not validated");
  return c;
}

// Criterion 5 helpers over explicit word sets.
bool large(const CellSpace& s, Alphabet a, const TargetSet& e, const FiniteSubspace& x, std::size_t q) {
  return is_large_upto(s, a, e, x, q).outcome == LargeOutcome::LargeUpTo;
}

void largeness_laws(Check& c, const CellSpace& s, Alphabet a, const FiniteSubspace& x, std::size_t q,
                    const TargetSet& e1, const TargetSet& e2, const TargetSet& e, std::uint64_t& checked) {
  if (!large(s, a, e, x, q)) return;
  ++checked;
  for (std::size_t len = q; len <= x.length(); ++len) {
    for_each_further_subspace(s, a, x, len, [&](const FiniteSubspace& y) {
      c.require(large(s, a, e, y, q), "hereditariness fails");
      return c.ok;
    });
  }
  const auto part = mild_ramsey(s, a, {e1, e2}, x, q);
  c.require(part.has_value(), "no part is large in a further subspace");
  if (part) {
    c.require(is_further_subspace(a, part->y, x), "Ramsey subspace is not further");
    c.require(large(s, a, part->part == 0 ? e1 : e2, part->y, q), "Ramsey part is not large");
  }
}

Check criterion5() {
  Check c;
  const Alphabet a(2);
  std::uint64_t checked = 0;
  {
    // Height 2: every assignment of its ten constant words to {out, E1, E2}.
    const CellSpace s(binary(2));
    const auto x = standard_subspace(s, 0, 0, 2);
    std::vector<Word> universe = span_sequence(a, x.prefix(1));
    for (const auto& w : span_sequence(a, x)) universe.push_back(w);
    std::vector<int> assign(universe.size(), 0);
    while (c.ok) {
      std::vector<Word> w1;
      std::vector<Word> w2;
      for (std::size_t i = 0; i < universe.size(); ++i) {
        if (assign[i] == 1) w1.push_back(universe[i]);
        if (assign[i] == 2) w2.push_back(universe[i]);
      }
      std::vector<Word> both = w1;
      both.insert(both.end(), w2.begin(), w2.end());
      largeness_laws(c, s, a, x, 1, TargetSet::from_words(0, w1), TargetSet::from_words(0, w2),
                     TargetSet::from_words(0, both), checked);
      std::size_t i = assign.size();
      while (i-- > 0) {
        if (++assign[i] < 3) break;
        assign[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  {
    // Height 3: color classes of several word colorings.
    const CellSpace s(binary(3));
    const auto x = standard_subspace(s, 0, 0, 3);
    std::vector<WordColoring> colorings;
    for (int m = 2; m <= 3; ++m) {
      colorings.push_back([m](const Word& w) {
        int z = 0;
        for (auto sym : w.symbols()) z += sym == Symbol::letter(0);
        return z % m;
      });
    }
    colorings.push_back([](const Word& w) { return static_cast<int>(w.size() % 2); });
    colorings.push_back([](const Word& w) { return static_cast<int>(fnv1a64(std::to_string(w.size()) + (w.empty() ? "" : std::to_string(w[w.size() - 1].letter_value()))) % 2); });
    for (const auto& col : colorings) {
      for (int split = 0; split < 3; ++split) {
        auto inside = [col, split](const Word& w) { return col(w) <= split; };
        const TargetSet e1{0, [inside](const Word& w) { return (w.empty() || w.bottom() == 0) && inside(w); }};
        const TargetSet e2{0, [inside](const Word& w) { return (w.empty() || w.bottom() == 0) && !inside(w); }};
        for (std::size_t q = 1; q <= 2; ++q) largeness_laws(c, s, a, x, q, e1, e2, TargetSet::all(0), checked);
      }
    }
  }
  c.require(checked > 1000, "too few large instances");
  if (c.ok) c.detail = std::to_string(checked) + " large target sets";
  return c;
}

Check criterion6() {
  Check c;
  const Alphabet a(2);
  const CellSpace s(binary(3));
  const auto x = standard_subspace(s, 0, 0, 3);
  std::vector<TargetSet> targets;
  for (int m = 2; m <= 3; ++m) {
    for (int r = 0; r < m; ++r) {
      targets.push_back(TargetSet::color_class(0, [m](const Word& w) {
        int z = 0;
        for (auto sym : w.symbols()) z += sym == Symbol::letter(0);
        return w.size() > 2 && w[1] == w[2] ? 0 : z % m;
      }, r));
    }
  }
  std::uint64_t comparisons = 0;
  std::uint64_t hits = 0;
  for (int top = 1; top <= 2; ++top) {
    const auto big = x.prefix(static_cast<std::size_t>(top));
    std::vector<Word> probes;
    for_each_in_span(a, FiniteSubspace{{x.blocks.begin() + top, x.blocks.end()}, top, top}.joined(), [&](const Word& g) {
      probes.push_back(g);
      return true;
    });
    std::vector<FiniteSubspace> smaller;
    for (const auto& g : enumerate_variable_words(s, a, {0, top, full_level(s.vtree(), 0)})) {
      if (span_subset(a, g, big.joined())) smaller.push_back(FiniteSubspace{{g}, 0, 0});
    }
    for_each_further_subspace(s, a, big, static_cast<std::size_t>(top), [&](const FiniteSubspace& y) {
      if (y.top() == big.top()) smaller.push_back(y);
      return true;
    });
    for (const auto& e : targets) {
      const auto ex = derived_set_seq(s, a, e, big);
      for (const auto& y : smaller) {
        const auto ey = derived_set_seq(s, a, e, y);
        for (const auto& g : probes) {
          if (ex.contains(g)) {
            c.require(ey.contains(g), "E_x not contained in E_x'");
            ++hits;
          }
          ++comparisons;
        }
      }
    }
  }
  c.require(hits > 0, "every E_x is empty");
  if (c.ok) c.detail = std::to_string(comparisons) + " comparisons, " + std::to_string(hits) + " members of E_x";
  return c;
}

Check criterion7() {
  Check c;
  struct Host {
    VectorTree vt;
    int k;
    int ell;
    int length;
  };
  const std::vector<Host> hosts{{binary(2), 0, 0, 2}, {binary(3), 0, 0, 3}, {binary(3), 0, 1, 2},
                                {binary(3), 1, 1, 2}, {binary(2, 2), 0, 0, 2}, {VectorTree({Tree({3})}), 0, 0, 2}};
  std::vector<std::function<int(const Word&)>> base;
  for (int m = 2; m <= 3; ++m) {
    base.push_back([m](const Word& w) {
      int z = 0;
      for (auto sym : w.symbols()) z += sym == Symbol::letter(0);
      return z % m;
    });
  }
  base.push_back([](const Word&) { return 0; });
  base.push_back([](const Word& w) { return w.empty() ? 0 : static_cast<int>(w[0].letter_value()); });
  base.push_back([](const Word& w) { return w.empty() ? 0 : static_cast<int>(w[w.size() - 1].letter_value() % 2); });
  for (std::uint64_t salt = 0; salt < 25; ++salt) {
    base.push_back([salt](const Word& w) {
      std::string key = std::to_string(salt) + ":" + std::to_string(w.bottom()) + ":";
      for (auto sym : w.symbols()) key += static_cast<char>('a' + sym.letter_value());
      return static_cast<int>(fnv1a64(key) % (2 + salt % 2));
    });
  }
  std::size_t instances = 0;
  std::size_t witnesses = 0;
  for (const auto& h : hosts) {
    const CellSpace s(h.vt);
    for (int k = 1; k <= 3; ++k) {
      const Alphabet a(k);
      const auto x = standard_subspace(s, h.k, h.ell, h.length);
      for (const auto& col : base) {
        for (std::size_t q = 1; q <= x.length() && instances < 1000; ++q) {
          const auto res = tree_hj_search(s, a, col, x, q);
          ++instances;
          if (!res.witness) continue;
          ++witnesses;
          const auto defect = tree_hj_defect(s, a, col, x, *res.witness, res.color);
          c.require(!defect, defect.value_or(""));
          // Direct span check, independent of the search.
          const auto words = span_sequence(a, *res.witness);
          c.require(std::all_of(words.begin(), words.end(), [&](const Word& w) { return col(w) == res.color; }),
                    "witness span is not monochromatic");
          c.require(is_further_subspace(a, *res.witness, x), "witness is not a further subspace");
        }
      }
    }
  }
  c.require(instances == 1000, "only " + std::to_string(instances) + " instances");
  if (c.ok) c.detail = std::to_string(instances) + " instances, " + std::to_string(witnesses) + " witnesses";
  return c;
}

Check criterion8() {
  Check c;
  const CellSpace s(binary(3));
  const auto u = UFamily::singletons(s, all_levels(s.vtree()));
  const auto spanned = span_u_bruteforce(s, u);
  for (CellId t = 0; t < s.size(); ++t) {
    const auto above = indices_above(s, u, t);
    std::set<MinSet> image;
    std::size_t count = 0;
    std::vector<std::uint8_t> f(above.size(), 0);
    for (std::uint32_t mask = 0; mask < (1U << above.size()); ++mask) {
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = mask >> i & 1U;
      image.insert(reduction_q(s, u, t, f));
      ++count;
    }
    c.require(image.size() == count, "reduction_q is not injective");
    std::set<MinSet> rooted;
    for (const auto& v : spanned) {
      if (set_minimum(s, v) == t) rooted.insert(v);
    }
    c.require(image == rooted, "reduction_q image differs from the rooted span");
  }
  return c;
}

Check criterion9() {
  Check c;
  for (const auto& vt : {binary(4), binary(3, 2)}) {
    const CellSpace s(vt);
    const auto d = all_levels(vt);
    for (int m = 1; m <= 3; ++m) {
      const CellColoring one = [](CellId) { return 1; };
      const auto i = hl_search(s, one, d, m);
      c.require(i.witness && i.witness->branch == HlBranch::Dense, "constant 1: no branch (i)");
      if (i.witness) {
        c.require(is_dense_upto(vt, i.witness->d, m), "branch (i) not dense");
        c.require(static_cast<int>(i.witness->d.levels().size()) == m, "branch (i) depth");
      }
      const CellColoring zero = [](CellId) { return 0; };
      const auto ii = hl_search(s, zero, d, m);
      c.require(ii.witness && ii.witness->branch == HlBranch::TDense && ii.witness->anchor, "constant 0: no branch (ii)");
      if (ii.witness && ii.witness->anchor) {
        c.require(is_t_dense_upto(vt, ii.witness->d, s.cell(*ii.witness->anchor), m), "branch (ii) not t-dense");
      }
    }
  }
  const CellSpace s5(binary(5));
  const CellColoring parity = [&](CellId x) { return s5.level(x) % 2; };
  const auto p = hl_search(s5, parity, all_levels(s5.vtree()), 2);
  c.require(p.witness.has_value(), "level parity: no witness");
  if (p.witness) {
    const auto& w = *p.witness;
    const bool dense = w.branch == HlBranch::Dense ? is_dense_upto(s5.vtree(), w.d, 2)
                                                   : is_t_dense_upto(s5.vtree(), w.d, s5.cell(*w.anchor), 2);
    c.require(dense, "level parity witness fails density");
    const int want = w.branch == HlBranch::Dense ? 1 : 0;
    for (const auto& cell : w.d.product()) c.require(parity(s5.id(cell)) == want, "level parity witness color");
  }
  return c;
}

Check criterion10() {
  Check c;
  const auto r = verify_counterexample(Tree({2, 2, 2}), 2, 4);
  c.require(r.holds && !r.capped, "verify_counterexample is not true");
  if (c.ok) c.detail = std::to_string(r.subtrees) + " subtrees, " + std::to_string(r.families) + " families";
  return c;
}

Check criterion11() {
  Check c;
  const std::string data = HJT_DATA_DIR;
  const std::vector<std::string> lines{
      "hj --k 2 --r 3 --nmax 3",
      "lines --k 3 --n 2 --coloring letter_count_mod 2",
      "folkman --k 2 --n 4 --coloring size_mod 3",
      "folkman --k 2 --colors 2 --nmax 5",
      "tree-hj --tree " + data + "/binary3.vt --alphabet 2 --coloring letter_count_mod 2 --k 0 --ell 0 --q 1",
      "hl --tree " + data + "/binary5.vt --coloring level_parity --m 2",
      "disjoint-union --tree " + data + "/binary3.vt --coloring size_mod 2 --depth 3 --m 2 --q 1",
      "disjoint-union --tree " + data + "/binary4.vt --coloring level_parity --depth 4 --m 2 --q 1",
      "counterexample --tree " + data + "/binary4.vt --subtree-height 2",
  };
  for (const auto& line : lines) {
    std::vector<std::string> args;
    std::istringstream in(line);
    for (std::string t; in >> t;) args.push_back(t);
    auto one = parse_config(args);
    auto four = one;
    one.workers = 1;
    four.workers = 4;
    const auto a = serialize_certificate(run(one).cert);
    const auto b = serialize_certificate(run(four).cert);
    c.require(a == b, "worker count changes: " + line);
    const auto parsed = parse_certificate(a);
    c.require(serialize_certificate(parsed) == a, "round trip changes bytes: " + line);
    c.require(validate_certificate(a, 4).ok, "validate rejects: " + line);
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"HJ(2,2) = 2 by exhaustive colorings", criterion1},
      {"line counts (k+1)^N - k^N", criterion2},
      {"span sizes of 200 enumerated words", criterion3},
      {"Folkman parity and F(2,2)", criterion4},
      {"hereditariness and partition property", criterion5},
      {"derived sets are antitone", criterion6},
      {"tree-HJ witnesses re-validate", criterion7},
      {"reduction_q is a bijection onto rooted spans", criterion8},
      {"HL witnesses pass density checks", criterion9},
      {"strong-subtree counterexample holds", criterion10},
      {"certificates are worker independent and round trip", criterion11},
  };
  const double limits[] = {1, 60, 60, 60, 60, 60, 60, 60, 10, 60, 60};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const std::chrono::duration<double> t = std::chrono::steady_clock::now() - start;
    if (c.ok && t.count() > limits[i]) {
      c.ok = false;
      c.detail = "over the time limit";
    }
    failed += !c.ok;
    std::printf("%s criterion %2zu: %s (%.3f s)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, t.count(),
                c.detail.empty() ? "" : " - ", c.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
