#include "hjt/lines.hpp"

#include <algorithm>

#include "hjt/error.hpp"
#include "hjt/parallel.hpp"

namespace hjt {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) throw RangeError("count overflows");
    out *= base;
  }
  return out;
}

void check_shape(int k, int n) {
  if (k < 1 || k > 36) throw InputError("alphabet size must be in [1, 36]");
  if (n < 0) throw InputError("word length must be nonnegative");
}

bool line_is_mono(const std::vector<int>& colors, std::span<const std::uint64_t> points) {
  const int c = colors[points.front()];
  for (auto p : points) {
    if (colors[p] != c) return false;
  }
  return true;
}

}  // namespace

std::uint64_t line_count(int k, int n) {
  check_shape(k, n);
  return checked_pow(static_cast<std::uint64_t>(k) + 1, static_cast<std::uint64_t>(n)) -
         checked_pow(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
}

void for_each_line(int k, int n, const std::function<bool(const ClassicWord&)>& visit) {
  check_shape(k, n);
  if (n == 0) return;
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  ClassicWord w(static_cast<std::size_t>(n));
  while (true) {
    bool has_var = false;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      w[i] = digits[i] == k ? kVar : digits[i];
      has_var = has_var || digits[i] == k;
    }
    if (has_var && !visit(w)) return;
    std::size_t i = digits.size();
    while (i-- > 0) {
      if (++digits[i] <= k) break;
      digits[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

std::vector<ClassicWord> combinatorial_lines(int k, int n) {
  std::vector<ClassicWord> out;
  for_each_line(k, n, [&](const ClassicWord& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

std::uint64_t point_count(int k, int n) {
  check_shape(k, n);
  return checked_pow(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
}

std::uint64_t point_index(int k, std::span<const int> letters) {
  std::uint64_t idx = 0;
  for (int a : letters) {
    if (a < 0 || a >= k) throw RangeError("letter outside the alphabet");
    idx = idx * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(a);
  }
  return idx;
}

std::vector<int> point_letters(int k, int n, std::uint64_t index) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<int>(index % static_cast<std::uint64_t>(k));
    index /= static_cast<std::uint64_t>(k);
  }
  if (index != 0) throw RangeError("point index outside Λ^N");
  return out;
}

std::vector<std::uint64_t> line_points(int k, const ClassicWord& w) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  std::vector<int> letters(w.size());
  for (int a = 0; a < k; ++a) {
    for (std::size_t i = 0; i < w.size(); ++i) letters[i] = w[i] == kVar ? a : w[i];
    out.push_back(point_index(k, letters));
  }
  return out;
}

std::string encode_classic(const ClassicWord& w) {
  static constexpr std::string_view digits = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string out;
  for (int s : w) {
    if (s == kVar) {
      out += 'v';
    } else {
      if (s < 0 || s >= 36) throw RangeError("letter outside the encodable range");
      out += digits[static_cast<std::size_t>(s)];
    }
  }
  return out;
}

ClassicWord parse_classic(int k, std::string_view text) {
  ClassicWord out;
  for (char ch : text) {
    int a = -2;
    if (ch == 'v') {
      a = kVar;
    } else if (ch >= '0' && ch <= '9') {
      a = ch - '0';
    } else if (ch >= 'A' && ch <= 'Z') {
      a = ch - 'A' + 10;
    }
    if (a == -2 || a >= k) throw InputError("bad symbol `" + std::string(1, ch) + "` in `" + std::string(text) + "`");
    out.push_back(a);
  }
  return out;
}

void check_total(const PointColoring& c) {
  if (c.r < 1) throw InputError("color count must be positive");
  const auto expected = point_count(c.k, c.n);
  if (c.colors.size() != expected) {
    throw InputError("coloring covers " + std::to_string(c.colors.size()) + " of " + std::to_string(expected) +
                     " points");
  }
  for (std::size_t i = 0; i < c.colors.size(); ++i) {
    if (c.colors[i] < 0 || c.colors[i] >= c.r) {
      throw InputError("point " + std::to_string(i) + " has color " + std::to_string(c.colors[i]) + " outside [0, " +
                       std::to_string(c.r) + ")");
    }
  }
}

LineSearch find_mono_line(const PointColoring& coloring) {
  check_total(coloring);
  LineSearch out;
  for_each_line(coloring.k, coloring.n, [&](const ClassicWord& w) {
    ++out.lines_checked;
    const auto points = line_points(coloring.k, w);
    if (!line_is_mono(coloring.colors, points)) return true;
    out.witness = LineWitness{w, coloring.colors[points.front()]};
    return false;
  });
  return out;
}

bool has_mono_line_bruteforce(const PointColoring& coloring) {
  check_total(coloring);
  const int k = coloring.k;
  const int n = coloring.n;
  if (n == 0) return false;
  // Every symbol string over {0..k-1, v}, then every letter for v.
  const auto strings = checked_pow(static_cast<std::uint64_t>(k) + 1, static_cast<std::uint64_t>(n));
  std::vector<int> point(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < strings; ++code) {
    bool has_var = false;
    for (std::uint64_t x = code, i = 0; i < static_cast<std::uint64_t>(n); ++i, x /= static_cast<std::uint64_t>(k + 1)) {
      has_var = has_var || x % static_cast<std::uint64_t>(k + 1) == static_cast<std::uint64_t>(k);
    }
    if (!has_var) continue;
    int first = -1;
    bool mono = true;
    for (int a = 0; a < k && mono; ++a) {
      std::uint64_t x = code;
      for (int i = n - 1; i >= 0; --i, x /= static_cast<std::uint64_t>(k + 1)) {
        const int s = static_cast<int>(x % static_cast<std::uint64_t>(k + 1));
        point[static_cast<std::size_t>(i)] = s == k ? a : s;
      }
      const int c = coloring.colors[point_index(k, point)];
      if (first < 0) first = c;
      mono = c == first;
    }
    if (mono) return true;
  }
  return false;
}

HjResult hj_number(int k, int r, int n_max, int workers, std::uint64_t max_colorings) {
  if (k < 1 || r < 1) throw InputError("k and r must be positive");
  if (n_max < 1) throw InputError("nmax must be positive");
  HjResult out;
  PointColoring previous{k, 0, r, {0}};
  for (int n = 1; n <= n_max; ++n) {
    const auto points = point_count(k, n);
    std::uint64_t total = 0;
    try {
      total = checked_pow(static_cast<std::uint64_t>(r), points - 1);
    } catch (const RangeError&) {
      total = std::numeric_limits<std::uint64_t>::max();
    }
    if (total > max_colorings) {
      out.value = n - 1;
      out.note = "coloring space at n=" + std::to_string(n) + " exceeds the search limit";
      return out;
    }
    std::vector<std::vector<std::uint64_t>> lines;
    for_each_line(k, n, [&](const ClassicWord& w) {
      lines.push_back(line_points(k, w));
      return true;
    });
    auto decode = [&](std::uint64_t idx) {
      std::vector<int> colors(points, 0);
      for (std::uint64_t p = points; p-- > 1;) {
        colors[p] = static_cast<int>(idx % static_cast<std::uint64_t>(r));
        idx /= static_cast<std::uint64_t>(r);
      }
      return colors;
    };
    const auto first = parallel_find_first(
        total, workers,
        [&](std::size_t idx) {
          const auto colors = decode(idx);
          return std::none_of(lines.begin(), lines.end(), [&](const auto& l) { return line_is_mono(colors, l); });
        },
        1024);
    HjLevel level{n, total, first < total ? first + 1 : total, first == total};
    out.levels.push_back(level);
    if (level.forced) {
      out.resolved = true;
      out.value = n;
      out.avoiding = previous;
      return out;
    }
    previous = PointColoring{k, n, r, decode(first)};
  }
  out.value = n_max;
  out.note = "every checked length admits an avoiding coloring";
  return out;
}

// ---------------------------------------------------------------------------

void check_q_blocks(const CellSpace& space, Alphabet alphabet, std::span<const Word> blocks, int k) {
  if (blocks.empty()) throw StructuralError("no blocks");
  if (k < 0 || k >= space.height()) throw StructuralError("reference level outside the truncation");
  const auto target = full_level(space.vtree(), k);
  const auto need = target.product_size();
  std::optional<VectorLevelSubset> prev;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& g = blocks[i];
    if (auto defect = variable_word_defect(space, alphabet, g)) {
      throw StructuralError("block " + std::to_string(i) + ": " + *defect);
    }
    if (i > 0 && blocks[i - 1].top() != g.bottom()) throw StructuralError("blocks are not compatible");
    const auto ws = support(space, g);
    if (ws.product_size() != need) {
      throw StructuralError("support of block " + std::to_string(i) + " does not match |T(k)|");
    }
    const auto& lower = prev ? *prev : target;
    if (ws.level < lower.level || !dominates(space.vtree(), ws, lower)) {
      throw StructuralError("support of block " + std::to_string(i) + " breaks the domination chain");
    }
    prev = ws;
  }
}

namespace {

std::vector<Letter> carried_family(const CellSpace& space, const Word& g, int k, const std::vector<Letter>& family) {
  if (family.size() != space.level_count(k)) throw PreconditionError("family does not cover the level k");
  std::vector<Letter> out;
  for (CellId s : g.variables()) out.push_back(family[space.ancestor(s, k) - space.level_begin(k)]);
  return out;
}

}  // namespace

Word q_encode(const CellSpace& space, Alphabet alphabet, std::span<const Word> blocks, int k,
              const FamilySequence& seq) {
  check_q_blocks(space, alphabet, blocks, k);
  if (seq.size() != blocks.size()) throw PreconditionError("one family per block is required");
  Word out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (Letter a : seq[i]) {
      if (a >= alphabet.size) throw PreconditionError("letter outside the alphabet");
    }
    out = concat(out, substitute(blocks[i], carried_family(space, blocks[i], k, seq[i])));
  }
  return out;
}

Word q_line_word(const CellSpace& space, Alphabet alphabet, std::span<const Word> blocks, int k,
                 const FamilyLine& line) {
  check_q_blocks(space, alphabet, blocks, k);
  if (line.size() != blocks.size()) throw PreconditionError("line length differs from the block count");
  const auto pivot = std::find(line.begin(), line.end(), std::nullopt);
  if (pivot == line.end()) throw PreconditionError("line without a variable");
  const auto& head = blocks[static_cast<std::size_t>(pivot - line.begin())];
  std::vector<CellId> rep(space.level_count(k));
  for (CellId s : head.variables()) rep[space.ancestor(s, k) - space.level_begin(k)] = s;
  Word out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (line[i]) {
      out = concat(out, substitute(blocks[i], carried_family(space, blocks[i], k, *line[i])));
      continue;
    }
    std::vector<Symbol> symbols(blocks[i].symbols().begin(), blocks[i].symbols().end());
    for (auto& sym : symbols) {
      if (sym.is_variable()) {
        sym = Symbol::variable(rep[space.ancestor(sym.variable_cell(), k) - space.level_begin(k)]);
      }
    }
    out = concat(out, Word(blocks[i].bottom(), blocks[i].top(), std::move(symbols)));
  }
  return out;
}

}  // namespace hjt
