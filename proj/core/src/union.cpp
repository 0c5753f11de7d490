#include "hjt/union.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hjt/error.hpp"
#include "hjt/large.hpp"
#include "hjt/parallel.hpp"
#include "hjt/word.hpp"

namespace hjt {

namespace {

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  if (text.empty()) throw InputError("empty " + std::string(what));
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw InputError("bad " + std::string(what) + " `" + std::string(text) + "`");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > (std::uint64_t{1} << 40)) throw InputError(std::string(what) + " too large");
  }
  return v;
}

MinSet merged(const MinSet& a, const MinSet& b) {
  MinSet out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::size_t sub_mask_limit(std::size_t n) {
  if (n > 24) throw RangeError("too many indices above a minimum to enumerate the span");
  return std::size_t{1} << n;
}

}  // namespace

std::optional<CellId> set_minimum(const CellSpace& space, std::span<const CellId> cells) {
  if (cells.empty()) return std::nullopt;
  const CellId c = *std::min_element(cells.begin(), cells.end());
  for (CellId x : cells) {
    if (!space.leq(c, x)) return std::nullopt;
  }
  return c;
}

std::string encode_min_set(const CellSpace& space, const MinSet& u) {
  std::string out;
  for (CellId c : u) {
    if (!out.empty()) out += ';';
    out += to_string(space.cell(c));
  }
  return out;
}

MinSet parse_min_set(const CellSpace& space, std::string_view text) {
  MinSet out;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto token = text.substr(0, semi);
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) throw InputError("cell `" + std::string(token) + "` lacks a level");
    Cell c{static_cast<int>(parse_uint(token.substr(0, colon), "cell level")), {}};
    auto rest = token.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      c.indices.push_back(static_cast<Index>(parse_uint(rest.substr(0, comma), "cell index")));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    try {
      out.push_back(space.id(c));
    } catch (const Error& e) {
      throw InputError("cell `" + std::string(token) + "`: " + e.what());
    }
    if (semi == std::string_view::npos) break;
    text = text.substr(semi + 1);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw InputError("cell set repeats a cell");
  if (out.empty()) throw InputError("empty cell set");
  return out;
}

// ---------------------------------------------------------------------------
// UFamily

std::vector<CellId> product_ids(const CellSpace& space, const VectorSubset& d) {
  std::vector<CellId> out;
  for (const auto& c : d.product()) out.push_back(space.id(c));
  return out;
}

UFamily::UFamily(const CellSpace& space, VectorSubset base, std::vector<Entry> sets)
    : base_(std::move(base)), sets_(std::move(sets)) {
  validate(space.vtree(), base_);
  std::sort(sets_.begin(), sets_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  const auto domain = product_ids(space, base_);
  if (domain.size() != sets_.size() ||
      !std::equal(domain.begin(), domain.end(), sets_.begin(), [](CellId t, const Entry& e) { return t == e.first; })) {
    throw StructuralError("family indices differ from the level product of its base");
  }
  std::vector<CellId> all;
  for (const auto& [t, u] : sets_) {
    if (u.empty() || !std::is_sorted(u.begin(), u.end()) || std::adjacent_find(u.begin(), u.end()) != u.end()) {
      throw StructuralError("family set must be nonempty, sorted and distinct");
    }
    if (u.back() >= space.size()) throw RangeError("family set cell outside the cell space");
    if (set_minimum(space, u) != t) throw StructuralError("set indexed by " + to_string(space.cell(t)) + " has another minimum");
    all.insert(all.end(), u.begin(), u.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw StructuralError("family sets are not disjoint");
}

UFamily UFamily::singletons(const CellSpace& space, VectorSubset base) {
  std::vector<Entry> sets;
  for (CellId t : product_ids(space, base)) sets.emplace_back(t, MinSet{t});
  return UFamily(space, std::move(base), std::move(sets));
}

std::vector<CellId> UFamily::indices() const {
  std::vector<CellId> out;
  out.reserve(sets_.size());
  for (const auto& e : sets_) out.push_back(e.first);
  return out;
}

bool UFamily::contains(CellId t) const {
  return std::binary_search(sets_.begin(), sets_.end(), Entry{t, {}},
                            [](const Entry& a, const Entry& b) { return a.first < b.first; });
}

const MinSet& UFamily::at(CellId t) const {
  auto it = std::lower_bound(sets_.begin(), sets_.end(), t, [](const Entry& e, CellId x) { return e.first < x; });
  if (it == sets_.end() || it->first != t) throw PreconditionError("cell is not an index of the family");
  return it->second;
}

std::optional<MinSet> union_span(const CellSpace& space, const UFamily& u, std::span<const CellId> gamma) {
  if (gamma.empty()) return std::nullopt;
  MinSet out;
  for (CellId t : gamma) out = merged(out, u.at(t));
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw PreconditionError("selection repeats an index");
  if (!set_minimum(space, out)) return std::nullopt;
  return out;
}

std::vector<CellId> indices_above(const CellSpace& space, const UFamily& u, CellId t) {
  std::vector<CellId> out;
  for (const auto& [s, set] : u.entries()) {
    if (s != t && space.leq(t, s)) out.push_back(s);
  }
  return out;
}

namespace {

/// Elements of [U] with minimum t, ordered by selection mask.
void for_each_rooted(const CellSpace& space, const UFamily& u, CellId t,
                     const std::function<void(const MinSet&)>& visit) {
  const auto above = indices_above(space, u, t);
  const auto limit = sub_mask_limit(above.size());
  for (std::size_t mask = 0; mask < limit; ++mask) {
    MinSet v = u.at(t);
    for (std::size_t i = 0; i < above.size(); ++i) {
      if (mask >> i & 1U) v = merged(v, u.at(above[i]));
    }
    visit(v);
  }
}

}  // namespace

std::vector<MinSet> span_u(const CellSpace& space, const UFamily& u) {
  std::vector<MinSet> out;
  for (const auto& e : u.entries()) for_each_rooted(space, u, e.first, [&](const MinSet& v) { out.push_back(v); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MinSet> span_u_bruteforce(const CellSpace& space, const UFamily& u) {
  const auto idx = u.indices();
  if (idx.size() > 20) throw RangeError("brute-force span needs at most 20 indices");
  std::vector<MinSet> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << idx.size()); ++mask) {
    MinSet v;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (mask >> i & 1U) v.insert(v.end(), u.at(idx[i]).begin(), u.at(idx[i]).end());
    }
    std::sort(v.begin(), v.end());
    const CellId c = v.front();
    if (std::all_of(v.begin(), v.end(), [&](CellId x) { return space.leq(c, x); })) out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MinSet reduction_q(const CellSpace& space, const UFamily& u, CellId t, std::span<const std::uint8_t> f) {
  if (!u.contains(t)) throw PreconditionError("reduction anchor is not an index of the family");
  const auto above = indices_above(space, u, t);
  if (f.size() != above.size()) throw PreconditionError("indicator word does not match the cells above the anchor");
  MinSet out = u.at(t);
  for (std::size_t i = 0; i < above.size(); ++i) {
    if (f[i] > 1) throw PreconditionError("indicator word must be two-letter");
    if (f[i] == 1) out = merged(out, u.at(above[i]));
  }
  return out;
}

UFamily truncate(const CellSpace& space, const UFamily& u, int depth) {
  std::vector<VectorLevelSubset> levels;
  for (const auto& l : u.base().levels()) {
    if (l.level < depth) levels.push_back(l);
  }
  std::vector<UFamily::Entry> sets;
  for (const auto& [t, set] : u.entries()) {
    if (space.level(t) >= depth) continue;
    MinSet kept;
    for (CellId c : set) {
      if (space.level(c) < depth) kept.push_back(c);
    }
    sets.emplace_back(t, std::move(kept));
  }
  return UFamily(space, VectorSubset(std::move(levels)), std::move(sets));
}

std::optional<MinViolation> min_determined_check(const CellSpace& space, const SetColoring& coloring,
                                                 const UFamily& u, int depth) {
  const auto tu = truncate(space, u, depth);
  for (const auto& e : tu.entries()) {
    std::vector<MinSet> rooted;
    for_each_rooted(space, tu, e.first, [&](const MinSet& v) { rooted.push_back(v); });
    std::sort(rooted.begin(), rooted.end());
    const int c0 = coloring(rooted.front());
    for (const auto& v : rooted) {
      if (coloring(v) != c0) return MinViolation{rooted.front(), v};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Repair above one minimum

namespace {

bool is_product(const std::vector<CellId>& cells, const CellSpace& space, VectorLevelSubset& out) {
  const int d = space.dim();
  out.level = space.level(cells.front());
  out.coords.assign(static_cast<std::size_t>(d), {});
  for (CellId c : cells) {
    for (int i = 0; i < d; ++i) out.coords[static_cast<std::size_t>(i)].push_back(space.coordinate(c, i));
  }
  for (auto& x : out.coords) {
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
  }
  return out.product_size() == cells.size();
}

}  // namespace

RepairStep lemma92_step(const CellSpace& space, const SetColoring& coloring, const UFamily& u, CellId t,
                        std::size_t q, int workers) {
  if (!u.contains(t)) throw PreconditionError("repair anchor is not an index of the family");
  const auto& vt = space.vtree();
  const int d = space.dim();
  const int ell = space.level(t);
  const Cell tc = space.cell(t);

  // Sub-levels 1..h-1 above t where every successor of t is an index.
  int h = 1;
  for (int p = 1; ell + p < space.height(); ++p) {
    bool full = true;
    for (CellId c = space.level_begin(ell + p); c < space.level_begin(ell + p + 1) && full; ++c) {
      if (space.leq(t, c) && !u.contains(c)) full = false;
    }
    if (!full) break;
    h = p + 1;
  }
  RepairStep out;
  if (h < 2) {
    out.note = "no full region above " + to_string(tc);
    return out;
  }
  if (q > static_cast<std::size_t>(h - 1)) {
    out.note = "region above " + to_string(tc) + " is shallower than the repair length";
    return out;
  }

  std::vector<Tree> trees;
  for (int i = 0; i < d; ++i) {
    const auto b = vt.tree(i).branching();
    trees.emplace_back(std::vector<Index>(b.begin() + ell, b.begin() + ell + h - 1));
  }
  const CellSpace sub(VectorTree(std::move(trees)));
  std::vector<CellId> host(sub.size());
  for (CellId c = 0; c < sub.size(); ++c) {
    const Cell sc = sub.cell(c);
    Cell hc{ell + sc.level, std::vector<Index>(static_cast<std::size_t>(d))};
    for (int i = 0; i < d; ++i) {
      const auto si = static_cast<std::size_t>(i);
      hc.indices[si] = static_cast<Index>(tc.indices[si] * vt.tree(i).fan_out(ell, ell + sc.level) + sc.indices[si]);
    }
    host[c] = space.id(hc);
  }

  const Alphabet two(2);
  const CellId base = sub.level_begin(1);
  auto q_of = [&](const Word& f) {
    MinSet v = u.at(t);
    for (std::size_t off = 0; off < f.size(); ++off) {
      if (f[off].letter_value() == 1) v = merged(v, u.at(host[base + off]));
    }
    return v;
  };
  const WordColoring pulled = [&](const Word& f) { return coloring(q_of(f)); };
  const auto x = standard_subspace(sub, 1, 1, h - 1);
  const auto found = tree_hj_search(sub, two, pulled, x, q, workers);
  out.candidates = found.examined;
  if (!found.witness) {
    out.note = "no monochromatic further subspace above " + to_string(tc);
    return out;
  }

  const Word w = found.witness->joined();
  MinSet root = u.at(t);
  std::map<CellId, MinSet> grouped;
  for (std::size_t off = 0; off < w.size(); ++off) {
    const Symbol s = w[off];
    const CellId cell = host[base + off];
    if (s.is_letter()) {
      if (s.letter_value() == 1) root = merged(root, u.at(cell));
      continue;
    }
    auto& g = grouped[host[s.variable_cell()]];
    g = merged(g, u.at(cell));
  }

  std::map<int, std::vector<CellId>> kept_by_level;
  std::map<int, std::vector<CellId>> new_by_level;
  std::map<CellId, MinSet> sets;
  for (const auto& [s, set] : u.entries()) {
    if (s == t) {
      sets[s] = root;
      kept_by_level[space.level(s)].push_back(s);
    } else if (!space.leq(t, s)) {
      sets[s] = set;
      kept_by_level[space.level(s)].push_back(s);
    }
  }
  for (auto& [s, set] : grouped) {
    sets[s] = std::move(set);
    new_by_level[space.level(s)].push_back(s);
  }
  std::vector<VectorLevelSubset> levels;
  std::vector<UFamily::Entry> entries;
  std::set<int> all_levels;
  for (const auto& [lv, v] : kept_by_level) all_levels.insert(lv);
  for (const auto& [lv, v] : new_by_level) all_levels.insert(lv);
  for (int lv : all_levels) {
    std::vector<CellId> cells = kept_by_level[lv];
    const auto& fresh = new_by_level[lv];
    cells.insert(cells.end(), fresh.begin(), fresh.end());
    std::sort(cells.begin(), cells.end());
    VectorLevelSubset l;
    if (!is_product(cells, space, l)) {
      cells = fresh;
      if (cells.empty() || !is_product(cells, space, l)) continue;
      out.note = "level " + std::to_string(lv) + " cut back to the regrouped cells";
    }
    levels.push_back(l);
    for (CellId c : cells) entries.emplace_back(c, sets[c]);
  }
  out.family = UFamily(space, VectorSubset(std::move(levels)), std::move(entries));
  out.found = true;
  return out;
}

// ---------------------------------------------------------------------------
// Halpern–Läuchli patterns

namespace {

struct PatternChooser {
  const CellSpace& space;
  const CellColoring& coloring;
  std::uint64_t& patterns;

  /// Per-coordinate subsets of `allowed` at `level`, each dominating
  /// `lower`, with every product cell of color `color`. The last
  /// coordinate is taken maximal; the others run through bitmasks.
  std::optional<VectorLevelSubset> choose(int level, const std::vector<std::vector<Index>>& allowed,
                                          const std::vector<LevelSubset>& lower, int color) {
    const auto& vt = space.vtree();
    const int d = space.dim();
    std::vector<std::vector<std::vector<Index>>> options(static_cast<std::size_t>(d - 1));
    for (int i = 0; i + 1 < d; ++i) {
      const auto& a = allowed[static_cast<std::size_t>(i)];
      if (a.size() > 20) throw RangeError("level too wide for pattern search");
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << a.size()); ++mask) {
        std::vector<Index> m;
        for (std::size_t x = 0; x < a.size(); ++x) {
          if (mask >> x & 1U) m.push_back(a[x]);
        }
        if (dominates(vt.tree(i), LevelSubset(level, m), lower[static_cast<std::size_t>(i)])) {
          options[static_cast<std::size_t>(i)].push_back(std::move(m));
        }
      }
      if (options[static_cast<std::size_t>(i)].empty()) return std::nullopt;
    }
    std::vector<std::size_t> pos(static_cast<std::size_t>(d - 1), 0);
    while (true) {
      ++patterns;
      VectorLevelSubset s{level, {}};
      for (int i = 0; i + 1 < d; ++i) s.coords.push_back(options[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]]);
      std::vector<Index> last;
      for (Index x : allowed.back()) {
        VectorLevelSubset probe = s;
        probe.coords.push_back({x});
        bool ok = true;
        for (const auto& c : VectorSubset({probe}).product()) {
          if (coloring(space.id(c)) != color) {
            ok = false;
            break;
          }
        }
        if (ok) last.push_back(x);
      }
      if (!last.empty() && dominates(vt.tree(d - 1), LevelSubset(level, last), lower.back())) {
        s.coords.push_back(std::move(last));
        return s;
      }
      std::size_t i = pos.size();
      while (i-- > 0) {
        if (++pos[i] < options[i].size()) break;
        pos[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) return std::nullopt;
    }
  }
};

std::vector<Index> successors_at(const Tree& tree, NodeRef t, int level) {
  const auto fan = tree.fan_out(t.level, level);
  std::vector<Index> out(fan);
  for (std::uint64_t x = 0; x < fan; ++x) out[x] = static_cast<Index>(t.index * fan + x);
  return out;
}

}  // namespace

HlResult hl_search(const CellSpace& space, const CellColoring& coloring, const VectorSubset& d, int m) {
  if (m < 1) throw InputError("level count m must be positive");
  validate(space.vtree(), d);
  const auto& vt = space.vtree();
  const int dim = space.dim();
  HlResult out;
  PatternChooser chooser{space, coloring, out.patterns};

  // Branch (i).
  {
    std::vector<VectorLevelSubset> chosen;
    auto it = d.levels().begin();
    for (int j = 0; j < m; ++j) {
      std::vector<LevelSubset> lower;
      for (int i = 0; i < dim; ++i) lower.push_back(full_level(vt.tree(i), j));
      std::optional<VectorLevelSubset> hit;
      for (; it != d.levels().end() && !hit; ++it) {
        if (it->level < j) continue;
        hit = chooser.choose(it->level, it->coords, lower, 1);
      }
      if (!hit) break;
      chosen.push_back(std::move(*hit));
    }
    if (static_cast<int>(chosen.size()) == m) {
      out.witness = HlWitness{HlBranch::Dense, VectorSubset(std::move(chosen)), std::nullopt};
      return out;
    }
  }

  // Branch (ii).
  for (CellId t = 0; t < space.size(); ++t) {
    const Cell tc = space.cell(t);
    std::vector<VectorLevelSubset> chosen;
    auto it = d.levels().begin();
    for (int j = 0; j < m; ++j) {
      const int target = tc.level + j;
      if (target >= space.height()) break;
      std::vector<LevelSubset> lower;
      for (int i = 0; i < dim; ++i) {
        const auto si = static_cast<std::size_t>(i);
        lower.emplace_back(target, successors_at(vt.tree(i), {tc.level, tc.indices[si]}, target));
      }
      std::optional<VectorLevelSubset> hit;
      for (; it != d.levels().end() && !hit; ++it) {
        if (it->level < target) continue;
        std::vector<std::vector<Index>> allowed(static_cast<std::size_t>(dim));
        bool empty = false;
        for (int i = 0; i < dim && !empty; ++i) {
          const auto si = static_cast<std::size_t>(i);
          const auto fan = vt.tree(i).fan_out(tc.level, it->level);
          for (Index x : it->coords[si]) {
            if (x / fan == tc.indices[si]) allowed[si].push_back(x);
          }
          empty = allowed[si].empty();
        }
        if (!empty) hit = chooser.choose(it->level, allowed, lower, 0);
      }
      if (!hit) break;
      chosen.push_back(std::move(*hit));
    }
    if (static_cast<int>(chosen.size()) == m) {
      out.witness = HlWitness{HlBranch::TDense, VectorSubset(std::move(chosen)), t};
      return out;
    }
  }
  return out;
}

std::optional<std::string> hl_defect(const CellSpace& space, const CellColoring& coloring, const VectorSubset& d,
                                     int m, const HlWitness& w) {
  const auto& vt = space.vtree();
  try {
    validate(vt, w.d);
  } catch (const Error& e) {
    return std::string("pattern: ") + e.what();
  }
  if (static_cast<int>(w.d.levels().size()) != m) return "pattern does not have m levels";
  for (const auto& c : w.d.product()) {
    if (!d.contains(c)) return "pattern cell " + to_string(c) + " lies outside the host subset";
  }
  const int color = w.branch == HlBranch::Dense ? 1 : 0;
  if (w.branch == HlBranch::Dense) {
    if (w.anchor) return "dense pattern carries an anchor";
    if (!is_dense_upto(vt, w.d, m)) return "pattern is not dense up to m";
  } else {
    if (!w.anchor) return "relative pattern lacks its anchor";
    const Cell t = space.cell(*w.anchor);
    for (const auto& c : w.d.product()) {
      if (!space.leq(*w.anchor, space.id(c))) return "pattern cell " + to_string(c) + " is not above the anchor";
    }
    if (!is_t_dense_upto(vt, w.d, t, m)) return "pattern is not dense above the anchor up to m";
  }
  for (const auto& c : w.d.product()) {
    if (coloring(space.id(c)) != color) return "pattern cell " + to_string(c) + " has another color";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Disjoint-union pipeline

std::optional<std::string> du_defect(const CellSpace& space, const SetColoring& coloring, const UFamily& original,
                                     int m, const HlWitness& pattern, const UFamily& lifted) {
  if (!(lifted.base() == pattern.d)) return "lifted family is not indexed by the pattern";
  const auto& vt = space.vtree();
  if (static_cast<int>(pattern.d.levels().size()) != m) return "pattern does not have m levels";
  if (pattern.branch == HlBranch::Dense) {
    if (!is_dense_upto(vt, pattern.d, m)) return "pattern is not dense up to m";
  } else {
    if (!pattern.anchor) return "relative pattern lacks its anchor";
    if (!is_t_dense_upto(vt, pattern.d, space.cell(*pattern.anchor), m)) return "pattern is not dense above the anchor";
    for (const auto& e : lifted.entries()) {
      if (!space.leq(*pattern.anchor, e.first)) return "lifted index outside the anchor's successors";
    }
  }
  std::map<CellId, CellId> owner;
  for (const auto& [s, set] : original.entries()) {
    for (CellId c : set) owner[c] = s;
  }
  for (const auto& [t, set] : lifted.entries()) {
    std::set<CellId> parts;
    for (CellId c : set) {
      auto it = owner.find(c);
      if (it == owner.end()) return "lifted set " + encode_min_set(space, set) + " uses a cell outside the family";
      parts.insert(it->second);
    }
    std::size_t total = 0;
    for (CellId s : parts) total += original.at(s).size();
    if (total != set.size()) return "lifted set " + encode_min_set(space, set) + " is not a union of family sets";
  }
  const int color = pattern.branch == HlBranch::Dense ? 1 : 0;
  for (const auto& v : span_u(space, lifted)) {
    if (coloring(v) != color) return "span element " + encode_min_set(space, v) + " has another color";
  }
  return std::nullopt;
}

DuResult disjoint_union_search(const CellSpace& space, const SetColoring& coloring, const UFamily& u, int depth,
                               int m, std::size_t q, int workers) {
  if (depth < 1 || depth > space.height()) throw InputError("depth must be in [1, H]");
  if (m < 1) throw InputError("level count m must be positive");
  if (q < 1) throw InputError("repair length q must be positive");
  DuResult out;
  const UFamily original = truncate(space, u, depth);
  UFamily cur = original;
  const std::size_t budget = cur.size() * q;
  std::set<CellId> repaired;
  while (auto v = min_determined_check(space, coloring, cur, depth)) {
    const CellId t = *set_minimum(space, v->first);
    if (out.repairs >= budget) {
      out.notes.push_back("repair budget of " + std::to_string(budget) + " steps exhausted");
      return out;
    }
    if (!repaired.insert(t).second) {
      out.notes.push_back("repair at " + to_string(space.cell(t)) + " did not settle its minimum");
      return out;
    }
    auto step = lemma92_step(space, coloring, cur, t, q, workers);
    ++out.repairs;
    if (!step.found) {
      out.notes.push_back(step.note);
      return out;
    }
    if (!step.note.empty()) out.notes.push_back(step.note);
    cur = std::move(step.family);
  }

  const CellColoring induced = [&](CellId s) { return cur.contains(s) ? coloring(cur.at(s)) : -1; };
  auto hl = hl_search(space, induced, cur.base(), m);
  if (!hl.witness) {
    out.notes.push_back("no pattern in the induced cell coloring");
    return out;
  }
  std::vector<UFamily::Entry> entries;
  for (CellId s : product_ids(space, hl.witness->d)) entries.emplace_back(s, cur.at(s));
  UFamily lifted(space, hl.witness->d, std::move(entries));
  if (auto defect = du_defect(space, coloring, original, m, *hl.witness, lifted)) {
    out.notes.push_back("lifted family failed validation: " + *defect);
    return out;
  }
  out.span_checked = span_u(space, lifted).size();
  out.pattern = std::move(hl.witness);
  out.family = std::move(lifted);
  return out;
}

// ---------------------------------------------------------------------------
// Folkman

namespace {

struct FolkmanDfs {
  std::uint32_t full;
  int k;
  const SubsetColoring& coloring;
  std::uint64_t nodes = 0;
  std::vector<std::uint32_t> chosen{};
  std::vector<std::uint32_t> unions{};
  int color = 0;

  bool run(std::uint32_t start, std::uint32_t used) {
    if (static_cast<int>(chosen.size()) == k) return true;
    for (std::uint32_t m = start; m <= full; ++m) {
      if (m & used) continue;
      ++nodes;
      const int c = coloring(m);
      if (!chosen.empty() && c != color) continue;
      const std::size_t before = unions.size();
      bool ok = true;
      for (std::size_t i = 0; i < before && ok; ++i) {
        const auto w = unions[i] | m;
        ok = coloring(w) == c;
        unions.push_back(w);
      }
      if (ok) {
        if (chosen.empty()) color = c;
        unions.push_back(m);
        chosen.push_back(m);
        if (run(m + 1, used | m)) return true;
        chosen.pop_back();
      }
      unions.resize(before);
    }
    return false;
  }
};

}  // namespace

FolkmanSearch folkman_search(int n, int k, const SubsetColoring& coloring) {
  if (k < 1 || n < k) throw InputError("folkman search needs ground size >= k >= 1");
  if (n > 24) throw InputError("ground size above 24 is not supported");
  FolkmanDfs dfs{(std::uint32_t{1} << n) - 1, k, coloring};
  FolkmanSearch out;
  if (dfs.run(1, 0)) out.sets = dfs.chosen;
  out.nodes = dfs.nodes;
  return out;
}

std::optional<std::string> folkman_defect(int n, int k, const SubsetColoring& coloring,
                                          std::span<const std::uint32_t> sets) {
  if (static_cast<int>(sets.size()) != k) return "witness does not have k sets";
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::uint32_t used = 0;
  for (auto s : sets) {
    if (s == 0 || (s & ~full) != 0) return "witness set is empty or outside the ground set";
    if (s & used) return "witness sets are not pairwise disjoint";
    used |= s;
  }
  const int c = coloring(sets.front());
  for (std::uint32_t sel = 1; sel < (std::uint32_t{1} << k); ++sel) {
    std::uint32_t w = 0;
    for (int i = 0; i < k; ++i) {
      if (sel >> i & 1U) w |= sets[static_cast<std::size_t>(i)];
    }
    if (coloring(w) != c) return "a union has another color";
  }
  return std::nullopt;
}

bool folkman_bruteforce(int n, int k, const SubsetColoring& coloring) {
  if (k < 1 || n < 0 || n > 16) throw InputError("brute-force Folkman check needs n <= 16");
  std::vector<int> bin(static_cast<std::size_t>(n), 0);
  std::vector<std::uint32_t> sets(static_cast<std::size_t>(k));
  while (true) {
    std::fill(sets.begin(), sets.end(), 0);
    for (int e = 0; e < n; ++e) {
      if (bin[static_cast<std::size_t>(e)] > 0) sets[static_cast<std::size_t>(bin[static_cast<std::size_t>(e)] - 1)] |= std::uint32_t{1} << e;
    }
    if (std::all_of(sets.begin(), sets.end(), [](std::uint32_t s) { return s != 0; }) &&
        !folkman_defect(n, k, coloring, sets)) {
      return true;
    }
    int e = n;
    while (e-- > 0) {
      if (++bin[static_cast<std::size_t>(e)] <= k) break;
      bin[static_cast<std::size_t>(e)] = 0;
    }
    if (e < 0) return false;
  }
}

namespace {

/// Unordered partitions of m into k nonempty parts, as the list of all
/// nonempty unions of parts other than m itself.
void partitions(std::uint32_t rest, int parts_left, std::vector<std::uint32_t>& parts,
                std::vector<std::vector<std::uint32_t>>& out) {
  if (parts_left == 0) {
    if (rest != 0) return;
    std::vector<std::uint32_t> unions;
    const auto k = parts.size();
    for (std::uint32_t sel = 1; sel + 1 < (std::uint32_t{1} << k); ++sel) {
      std::uint32_t w = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (sel >> i & 1U) w |= parts[i];
      }
      unions.push_back(w);
    }
    out.push_back(std::move(unions));
    return;
  }
  if (rest == 0) return;
  const std::uint32_t low = rest & (~rest + 1);
  const std::uint32_t others = rest ^ low;
  // The part holding the lowest remaining element.
  for (std::uint32_t sub = others;; sub = (sub - 1) & others) {
    const std::uint32_t part = sub | low;
    if (parts_left > 1 || part == rest) {
      parts.push_back(part);
      partitions(rest ^ part, parts_left - 1, parts, out);
      parts.pop_back();
    }
    if (sub == 0) break;
  }
}

struct FolkmanColoring {
  int colors;
  std::uint32_t full;
  const std::vector<std::vector<std::vector<std::uint32_t>>>& configs;  // by top mask
  std::vector<int> color;  // by mask, index 0 unused
  std::uint64_t nodes = 0;

  bool closes_config(std::uint32_t m) const {
    for (const auto& unions : configs[m]) {
      if (std::all_of(unions.begin(), unions.end(), [&](std::uint32_t w) { return color[w] == color[m]; })) {
        return true;
      }
    }
    return false;
  }

  int max_used(std::uint32_t upto) const {
    int mx = -1;
    for (std::uint32_t w = 1; w < upto; ++w) mx = std::max(mx, color[w]);
    return mx;
  }

  bool extend(std::uint32_t m, int mx) {
    if (m > full) return true;
    for (int c = 0; c <= std::min(mx + 1, colors - 1); ++c) {
      ++nodes;
      color[m] = c;
      if (!closes_config(m) && extend(m + 1, std::max(mx, c))) return true;
    }
    color[m] = -1;
    return false;
  }
};

}  // namespace

FolkmanNumber folkman_number(int k, int colors, int n_max, int workers) {
  if (k < 1) throw InputError("k must be positive");
  if (colors < 1) throw InputError("color count must be positive");
  if (n_max < 1 || n_max > 6) throw InputError("nmax must be in [1, 6]");
  FolkmanNumber out;
  std::vector<int> previous;
  for (int n = 1; n <= n_max; ++n) {
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    std::vector<std::vector<std::vector<std::uint32_t>>> configs(full + 1);
    for (std::uint32_t m = 1; m <= full; ++m) {
      std::vector<std::uint32_t> parts;
      partitions(m, k, parts, configs[m]);
    }
    // Shard on the colors of the first few masks, in increasing order.
    const std::uint32_t prefix = std::min<std::uint32_t>(full, 6);
    std::vector<std::vector<int>> seeds;
    {
      FolkmanColoring probe{colors, full, configs, std::vector<int>(full + 1, -1)};
      std::function<void(std::uint32_t, int)> grow = [&](std::uint32_t m, int mx) {
        if (m > prefix) {
          seeds.push_back(probe.color);
          return;
        }
        for (int c = 0; c <= std::min(mx + 1, colors - 1); ++c) {
          probe.color[m] = c;
          if (!probe.closes_config(m)) grow(m + 1, std::max(mx, c));
        }
        probe.color[m] = -1;
      };
      grow(1, -1);
    }
    std::vector<std::uint64_t> nodes(seeds.size(), 0);
    std::vector<std::vector<int>> found(seeds.size());
    const auto best = parallel_find_first(seeds.size(), workers, [&](std::size_t i) {
      FolkmanColoring search{colors, full, configs, seeds[i]};
      const bool ok = search.extend(prefix + 1, search.max_used(prefix + 1));
      nodes[i] = search.nodes;
      if (ok) found[i] = search.color;
      return ok;
    });
    FolkmanLevel level{n, best == seeds.size(), 0};
    for (std::size_t i = 0; i < seeds.size() && i <= best; ++i) level.nodes += nodes[i];
    out.levels.push_back(level);
    if (level.forced) {
      out.resolved = true;
      out.value = n;
      out.avoiding = previous;
      return out;
    }
    previous.assign(found[best].begin() + 1, found[best].end());
  }
  out.value = n_max;
  return out;
}

// ---------------------------------------------------------------------------
// Counterexample

int counterexample_color(const CellSpace& space, const MinSet& u1, const MinSet& u2) {
  if (space.dim() != 1) throw PreconditionError("the pair coloring is defined for a single tree");
  const auto m1 = set_minimum(space, u1);
  const auto m2 = set_minimum(space, u2);
  if (!m1 || !m2) throw PreconditionError("pair sets must have minima");
  std::vector<CellId> common;
  std::set_intersection(u1.begin(), u1.end(), u2.begin(), u2.end(), std::back_inserter(common));
  if (!common.empty()) throw PreconditionError("pair sets must be disjoint");
  if (!space.leq(*m1, *m2)) throw PreconditionError("pair requires min U1 <= min U2");
  const int lv = space.level(*m2);
  const auto count = std::count_if(u1.begin(), u1.end(), [&](CellId c) { return space.level(c) == lv; });
  return static_cast<int>(count % 2);
}

void for_each_strong_subtree(const Tree& tree, int height, int depth,
                             const std::function<bool(const StrongSubtree&)>& visit) {
  if (height < 1) throw InputError("subtree height must be positive");
  if (depth < 1 || depth > tree.height()) throw InputError("depth must be in [1, H]");
  bool stop = false;
  StrongSubtree cur;
  std::function<void()> grow = [&] {
    if (stop) return;
    if (static_cast<int>(cur.levels.size()) == height) {
      if (!visit(cur)) stop = true;
      return;
    }
    const int from = cur.levels.back();
    const int remaining = height - static_cast<int>(cur.levels.size()) - 1;
    for (int next = from + 1; next + remaining < depth && !stop; ++next) {
      const auto b = tree.branching()[static_cast<std::size_t>(from)];
      const auto fan = tree.fan_out(from + 1, next);
      // One descendant per child of every current node.
      const auto& parents = cur.nodes.back();
      const std::size_t slots = parents.size() * b;
      std::vector<std::uint64_t> pick(slots, 0);
      while (!stop) {
        std::vector<Index> level;
        for (std::size_t p = 0; p < parents.size(); ++p) {
          for (Index c = 0; c < b; ++c) {
            const auto child = static_cast<std::uint64_t>(parents[p]) * b + c;
            level.push_back(static_cast<Index>(child * fan + pick[p * b + c]));
          }
        }
        cur.levels.push_back(next);
        cur.nodes.push_back(std::move(level));
        grow();
        cur.levels.pop_back();
        cur.nodes.pop_back();
        std::size_t i = slots;
        while (i-- > 0) {
          if (++pick[i] < fan) break;
          pick[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
    }
  };
  for (int root_level = 0; root_level + height - 1 < depth && !stop; ++root_level) {
    for (Index r = 0; r < tree.level_size(root_level) && !stop; ++r) {
      cur.levels = {root_level};
      cur.nodes = {{r}};
      grow();
    }
  }
}

namespace {

struct SubtreeCheck {
  bool holds = true;
  std::uint64_t families = 0;
  bool capped = false;
  std::vector<MinSet> failing;
};

SubtreeCheck check_subtree(const CellSpace& space, const StrongSubtree& s, int depth, std::uint64_t cap) {
  std::vector<CellId> snodes;
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    for (Index x : s.nodes[i]) snodes.push_back(space.id({s.levels[i], {x}}));
  }
  const auto ns = snodes.size();
  const CellId root = snodes.front();
  // Free cells below the depth, above the root, outside the subtree, with
  // the subtree nodes each may join.
  std::vector<CellId> free_cells;
  std::vector<std::vector<std::size_t>> owners;
  for (CellId c = root; c < space.level_begin(depth); ++c) {
    if (!space.leq(root, c) || std::binary_search(snodes.begin(), snodes.end(), c)) continue;
    std::vector<std::size_t> o;
    for (std::size_t j = 0; j < ns; ++j) {
      if (space.leq(snodes[j], c)) o.push_back(j);
    }
    free_cells.push_back(c);
    owners.push_back(std::move(o));
  }
  // above[j]: subtree nodes strictly above node j.
  std::vector<std::vector<std::size_t>> above(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    for (std::size_t i = 0; i < ns; ++i) {
      if (i != j && space.leq(snodes[j], snodes[i])) above[j].push_back(i);
    }
  }
  const int h = space.height();
  std::vector<std::size_t> choice(free_cells.size(), 0);
  std::vector<std::vector<int>> count(ns, std::vector<int>(static_cast<std::size_t>(h), 0));
  SubtreeCheck out;
  while (true) {
    if (out.families == cap) {
      out.capped = true;
      return out;
    }
    ++out.families;
    for (std::size_t j = 0; j < ns; ++j) {
      std::fill(count[j].begin(), count[j].end(), 0);
      count[j][static_cast<std::size_t>(space.level(snodes[j]))] = 1;
    }
    for (std::size_t f = 0; f < free_cells.size(); ++f) {
      if (choice[f] > 0) ++count[owners[f][choice[f] - 1]][static_cast<std::size_t>(space.level(free_cells[f]))];
    }
    // Span elements: a root j and a subset of the nodes above it.
    struct Element {
      std::uint64_t nodes;
      std::size_t min;
    };
    std::vector<Element> elements;
    for (std::size_t j = 0; j < ns; ++j) {
      const auto& a = above[j];
      for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << a.size()); ++sel) {
        std::uint64_t nodeset = std::uint64_t{1} << j;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (sel >> i & 1U) nodeset |= std::uint64_t{1} << a[i];
        }
        elements.push_back({nodeset, j});
      }
    }
    bool seen[2] = {false, false};
    bool any_pair = false;
    for (const auto& e1 : elements) {
      for (const auto& e2 : elements) {
        if ((e1.nodes & e2.nodes) != 0 || !space.leq(snodes[e1.min], snodes[e2.min])) continue;
        any_pair = true;
        const auto lv = static_cast<std::size_t>(space.level(snodes[e2.min]));
        int c = 0;
        for (std::size_t j = 0; j < ns; ++j) {
          if (e1.nodes >> j & 1U) c += count[j][lv];
        }
        seen[c % 2] = true;
      }
    }
    if (any_pair && !(seen[0] && seen[1])) {
      out.holds = false;
      std::vector<MinSet> family(ns);
      for (std::size_t j = 0; j < ns; ++j) family[j].push_back(snodes[j]);
      for (std::size_t f = 0; f < free_cells.size(); ++f) {
        if (choice[f] > 0) family[owners[f][choice[f] - 1]].push_back(free_cells[f]);
      }
      for (auto& u : family) std::sort(u.begin(), u.end());
      out.failing = std::move(family);
      return out;
    }
    std::size_t i = choice.size();
    while (i-- > 0) {
      if (++choice[i] <= owners[i].size()) break;
      choice[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return out;
  }
}

}  // namespace

CounterexampleReport verify_counterexample(const Tree& tree, int subtree_height, int depth, std::uint64_t family_cap,
                                           int workers) {
  if (family_cap < 1) throw InputError("family cap must be positive");
  const CellSpace space(VectorTree({tree}));
  std::vector<StrongSubtree> subtrees;
  for_each_strong_subtree(tree, subtree_height, depth, [&](const StrongSubtree& s) {
    subtrees.push_back(s);
    return true;
  });
  for (const auto& s : subtrees) {
    std::size_t total = 0;
    for (const auto& l : s.nodes) total += l.size();
    if (total > 63) throw RangeError("strong subtree too large to check");
  }
  std::vector<SubtreeCheck> checks(subtrees.size());
  const auto best = parallel_find_first(subtrees.size(), workers, [&](std::size_t i) {
    checks[i] = check_subtree(space, subtrees[i], depth, family_cap);
    return !checks[i].holds;
  });
  CounterexampleReport out;
  out.subtrees = subtrees.size();
  for (std::size_t i = 0; i < subtrees.size() && i <= best; ++i) {
    out.families += checks[i].families;
    out.capped = out.capped || checks[i].capped;
  }
  if (best < subtrees.size()) {
    out.holds = false;
    out.failing_subtree = subtrees[best];
    out.failing_family = checks[best].failing;
  }
  return out;
}

}  // namespace hjt
