#include "hjt/word.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "hjt/error.hpp"

namespace hjt {

namespace {

std::size_t index_of(const std::vector<CellId>& sorted, CellId c) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), c);
  if (it == sorted.end() || *it != c) return sorted.size();
  return static_cast<std::size_t>(it - sorted.begin());
}

void check_fits(const CellSpace& space, const Word& w) {
  if (w.bottom() < 0 || w.top() > space.height() || w.bottom() > w.top()) {
    throw StructuralError("word range [" + std::to_string(w.bottom()) + "," + std::to_string(w.top()) +
                          ") outside the truncation");
  }
  if (w.size() != space.range_size(w.bottom(), w.top())) {
    throw StructuralError("word has " + std::to_string(w.size()) + " symbols, range needs " +
                          std::to_string(space.range_size(w.bottom(), w.top())));
  }
  for (Symbol s : w.symbols()) {
    if (s.is_variable() && s.variable_cell() >= space.size()) throw StructuralError("variable cell outside cell space");
  }
}

std::string encode_symbol(const CellSpace& space, Symbol s) {
  if (s.is_letter()) return "a" + std::to_string(s.letter_value());
  return "v(" + to_string(space.cell(s.variable_cell())) + ")";
}

long long parse_int(std::string_view text, std::string_view what) {
  if (text.empty()) throw InputError("empty " + std::string(what));
  long long value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw InputError("bad " + std::string(what) + " `" + std::string(text) + "`");
    value = value * 10 + (c - '0');
    if (value > (1LL << 40)) throw InputError(std::string(what) + " too large");
  }
  return value;
}

Cell parse_cell(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw InputError("cell `" + std::string(text) + "` lacks a level");
  Cell c{static_cast<int>(parse_int(text.substr(0, colon), "cell level")), {}};
  auto rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    c.indices.push_back(static_cast<Index>(parse_int(rest.substr(0, comma), "cell index")));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return c;
}

}  // namespace

Alphabet::Alphabet(int k) : size(k) {
  if (k < 1 || k > 1 << 15) throw InputError("alphabet size must be in [1, 32768]");
}

// ---------------------------------------------------------------------------
// Word

Word::Word(int bottom, int top, std::vector<Symbol> symbols)
    : bottom_(bottom), top_(top), symbols_(std::move(symbols)) {
  if (bottom_ > top_) throw PreconditionError("word range with bottom > top");
  if (bottom_ == top_ && !symbols_.empty()) throw PreconditionError("empty range with symbols");
}

Word Word::constant(int bottom, int top, std::vector<Letter> letters) {
  std::vector<Symbol> symbols;
  symbols.reserve(letters.size());
  for (Letter a : letters) symbols.push_back(Symbol::letter(a));
  return Word(bottom, top, std::move(symbols));
}

Symbol Word::at(const CellSpace& space, CellId c) const {
  const CellId base = space.level_begin(bottom_);
  if (c < base || c - base >= symbols_.size()) throw RangeError("cell outside word range");
  return symbols_[c - base];
}

bool Word::is_constant() const noexcept {
  return std::all_of(symbols_.begin(), symbols_.end(), [](Symbol s) { return s.is_letter(); });
}

std::vector<CellId> Word::variables() const {
  std::vector<CellId> out;
  for (Symbol s : symbols_) {
    if (s.is_variable()) out.push_back(s.variable_cell());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool operator==(const Word& a, const Word& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return a.bottom_ == b.bottom_ && a.top_ == b.top_ && a.symbols_ == b.symbols_;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (a.empty() || b.empty()) return !a.empty() <=> !b.empty();
  if (auto c = a.bottom_ <=> b.bottom_; c != 0) return c;
  if (auto c = a.top_ <=> b.top_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.symbols_.begin(), a.symbols_.end(), b.symbols_.begin(),
                                                b.symbols_.end());
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  if (w.empty()) return 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(w.bottom()));
  mix(static_cast<std::uint64_t>(w.top()));
  for (Symbol s : w.symbols()) mix(s.is_letter() ? s.letter_value() : (std::uint64_t{1} << 40) + s.variable_cell());
  return static_cast<std::size_t>(h);
}

std::string encode_word(const CellSpace& space, const Word& w) {
  std::string out = "[" + std::to_string(w.bottom()) + "," + std::to_string(w.top()) + ")";
  for (Symbol s : w.symbols()) out += " " + encode_symbol(space, s);
  return out;
}

Word parse_word(const CellSpace& space, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string range;
  if (!(in >> range) || range.size() < 5 || range.front() != '[' || range.back() != ')') {
    throw InputError("word must start with `[m,n)`");
  }
  const auto comma = range.find(',');
  if (comma == std::string::npos) throw InputError("word range lacks a comma");
  const int m = static_cast<int>(parse_int(std::string_view(range).substr(1, comma - 1), "range bottom"));
  const int n = static_cast<int>(parse_int(std::string_view(range).substr(comma + 1, range.size() - comma - 2), "range top"));
  if (m > n || n > space.height()) throw InputError("word range `" + range + "` outside the truncation");
  std::vector<Symbol> symbols;
  std::string token;
  while (in >> token) {
    if (token.size() >= 2 && token[0] == 'a') {
      symbols.push_back(Symbol::letter(static_cast<Letter>(parse_int(std::string_view(token).substr(1), "letter"))));
    } else if (token.size() >= 4 && token.rfind("v(", 0) == 0 && token.back() == ')') {
      const Cell c = parse_cell(std::string_view(token).substr(2, token.size() - 3));
      symbols.push_back(Symbol::variable(space.id(c)));
    } else {
      throw InputError("bad word symbol `" + token + "`");
    }
  }
  if (symbols.size() != space.range_size(m, n)) {
    throw InputError("word `" + range + "` has " + std::to_string(symbols.size()) + " symbols, expected " +
                     std::to_string(space.range_size(m, n)));
  }
  if (m == n) return Word(m, n, {});
  return Word(m, n, std::move(symbols));
}

// ---------------------------------------------------------------------------
// Variable words

std::optional<std::string> variable_word_defect(const CellSpace& space, Alphabet alphabet, const Word& w) {
  check_fits(space, w);
  if (w.empty()) return "the empty word has no variables";
  for (Symbol s : w.symbols()) {
    if (s.is_letter() && s.letter_value() >= alphabet.size) return "letter outside the alphabet";
  }
  const auto vars = w.variables();
  if (vars.empty()) return "no variable occurs";
  const int p = space.level(vars.front());
  if (space.level(vars.back()) != p) return "variables are indexed by cells of different levels";
  if (p < w.bottom() || p >= w.top()) return "support level outside the word range";

  const int d = space.dim();
  std::vector<std::set<Index>> proj(static_cast<std::size_t>(d));
  for (CellId s : vars) {
    for (int i = 0; i < d; ++i) proj[static_cast<std::size_t>(i)].insert(space.coordinate(s, i));
  }
  std::uint64_t product = 1;
  for (const auto& c : proj) product *= c.size();
  if (product != vars.size()) return "variable cells do not form a level product";

  const CellId base = space.level_begin(w.bottom());
  std::vector<std::set<int>> levels(vars.size());
  for (std::size_t off = 0; off < w.size(); ++off) {
    const Symbol s = w[off];
    if (!s.is_variable()) continue;
    const CellId c = base + static_cast<CellId>(off);
    const std::size_t slot = index_of(vars, s.variable_cell());
    if (!space.leq(s.variable_cell(), c)) return "an occurrence of a variable is not above its index cell";
    levels[slot].insert(space.level(c));
  }
  for (std::size_t slot = 0; slot < vars.size(); ++slot) {
    if (w.at(space, vars[slot]) != Symbol::variable(vars[slot])) {
      return "a variable does not occur at its own index cell";
    }
    if (levels[slot] != levels.front()) return "occurrence level sets differ between variables";
  }
  return std::nullopt;
}

bool validate_variable_word(const CellSpace& space, Alphabet alphabet, const Word& w) {
  return !variable_word_defect(space, alphabet, w).has_value();
}

VectorLevelSubset support(const CellSpace& space, const Word& w) {
  const auto vars = w.variables();
  if (vars.empty()) throw PreconditionError("support of a word without variables");
  VectorLevelSubset out{space.level(vars.front()), std::vector<std::vector<Index>>(static_cast<std::size_t>(space.dim()))};
  for (CellId s : vars) {
    for (int i = 0; i < space.dim(); ++i) out.coords[static_cast<std::size_t>(i)].push_back(space.coordinate(s, i));
  }
  for (auto& c : out.coords) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return out;
}

Word substitute(const Word& w, std::span<const Letter> family) {
  const auto vars = w.variables();
  if (family.size() != vars.size()) {
    throw PreconditionError("substitution family has " + std::to_string(family.size()) + " letters for " +
                            std::to_string(vars.size()) + " variables");
  }
  std::vector<Symbol> out(w.symbols().begin(), w.symbols().end());
  for (auto& s : out) {
    if (s.is_variable()) s = Symbol::letter(family[index_of(vars, s.variable_cell())]);
  }
  return Word(w.bottom(), w.top(), std::move(out));
}

std::uint64_t span_size(Alphabet alphabet, const Word& w) {
  std::uint64_t n = 1;
  for (std::size_t i = 0, e = w.variables().size(); i < e; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(alphabet.size)) {
      throw RangeError("span size overflows");
    }
    n *= static_cast<std::uint64_t>(alphabet.size);
  }
  return n;
}

void for_each_in_span(Alphabet alphabet, const Word& w, const std::function<bool(const Word&)>& visit) {
  const auto vars = w.variables();
  if (vars.empty()) {
    visit(w);
    return;
  }
  std::vector<std::size_t> slot_of(w.size(), vars.size());
  for (std::size_t off = 0; off < w.size(); ++off) {
    if (w[off].is_variable()) slot_of[off] = index_of(vars, w[off].variable_cell());
  }
  std::vector<Letter> family(vars.size(), 0);
  std::vector<Symbol> out(w.symbols().begin(), w.symbols().end());
  while (true) {
    for (std::size_t off = 0; off < out.size(); ++off) {
      if (slot_of[off] < vars.size()) out[off] = Symbol::letter(family[slot_of[off]]);
    }
    if (!visit(Word(w.bottom(), w.top(), out))) return;
    std::size_t i = vars.size();
    while (i-- > 0) {
      if (++family[i] < alphabet.size) break;
      family[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

std::vector<Word> span(Alphabet alphabet, const Word& w) {
  std::vector<Word> out;
  for_each_in_span(alphabet, w, [&](const Word& f) {
    out.push_back(f);
    return true;
  });
  return out;
}

bool compatible(const Word& a, const Word& b) { return a.empty() || b.empty() || a.top() == b.bottom(); }

Word concat(const Word& a, const Word& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.top() != b.bottom()) {
    throw PreconditionError("concatenation of non-abutting words [" + std::to_string(a.bottom()) + "," +
                            std::to_string(a.top()) + ") and [" + std::to_string(b.bottom()) + "," +
                            std::to_string(b.top()) + ")");
  }
  std::vector<Symbol> out(a.symbols().begin(), a.symbols().end());
  out.insert(out.end(), b.symbols().begin(), b.symbols().end());
  return Word(a.bottom(), b.top(), std::move(out));
}

std::vector<Word> concat_spans(const std::vector<Word>& a, const std::vector<Word>& b) {
  std::vector<Word> out;
  out.reserve(a.size() * b.size());
  for (const auto& f1 : a) {
    for (const auto& f2 : b) out.push_back(concat(f1, f2));
  }
  return out;
}

bool span_contains(Alphabet alphabet, const Word& host, const Word& w) {
  if (!w.is_constant()) throw PreconditionError("span membership of a non-constant word");
  return span_subset(alphabet, w, host);
}

bool span_subset(Alphabet alphabet, const Word& inner, const Word& host) {
  if (inner.empty() || host.empty()) return inner.empty() && host.empty();
  if (inner.bottom() != host.bottom() || inner.top() != host.top()) return false;
  if (inner.size() != host.size()) throw StructuralError("words on the same range with different sizes");
  const auto host_vars = host.variables();
  std::vector<std::optional<Symbol>> bound(host_vars.size());
  for (std::size_t off = 0; off < host.size(); ++off) {
    const Symbol h = host[off];
    const Symbol x = inner[off];
    if (h.is_letter()) {
      if (alphabet.size == 1) continue;
      if (x != h) return false;
      continue;
    }
    if (alphabet.size == 1) continue;
    auto& b = bound[index_of(host_vars, h.variable_cell())];
    if (!b) {
      b = x;
    } else if (*b != x) {
      return false;
    }
  }
  return true;
}

std::optional<Word> word_from_span(const CellSpace& space, Alphabet alphabet, const std::vector<Word>& words) {
  if (alphabet.size < 2) throw PreconditionError("a one-letter span does not determine its word");
  if (words.empty()) return std::nullopt;
  const Word& first = words.front();
  if (first.empty()) return std::nullopt;
  for (const auto& w : words) {
    if (w.bottom() != first.bottom() || w.top() != first.top() || !w.is_constant()) return std::nullopt;
  }
  const CellId base = space.level_begin(first.bottom());
  // Positions that always agree share a variable; the class minimum indexes it.
  std::map<std::vector<Letter>, CellId> classes;
  std::vector<Symbol> symbols(first.size());
  for (std::size_t off = 0; off < first.size(); ++off) {
    std::vector<Letter> column;
    column.reserve(words.size());
    for (const auto& w : words) column.push_back(w[off].letter_value());
    if (std::all_of(column.begin(), column.end(), [&](Letter a) { return a == column.front(); })) {
      symbols[off] = Symbol::letter(column.front());
      continue;
    }
    const CellId c = base + static_cast<CellId>(off);
    auto [it, inserted] = classes.try_emplace(std::move(column), c);
    symbols[off] = Symbol::variable(it->second);
  }
  Word h(first.bottom(), first.top(), std::move(symbols));
  if (!validate_variable_word(space, alphabet, h)) return std::nullopt;
  if (span_size(alphabet, h) != std::set<Word>(words.begin(), words.end()).size()) return std::nullopt;
  for (const auto& w : words) {
    if (!span_subset(alphabet, w, h)) return std::nullopt;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Finite subspaces

Word FiniteSubspace::joined() const {
  Word out(ell, ell, {});
  for (const auto& b : blocks) out = concat(out, b);
  return out;
}

FiniteSubspace FiniteSubspace::prefix(std::size_t j) const {
  if (j > blocks.size()) throw PreconditionError("prefix longer than the subspace");
  return {std::vector<Word>(blocks.begin(), blocks.begin() + static_cast<std::ptrdiff_t>(j)), k, ell};
}

std::optional<std::string> subspace_defect(const CellSpace& space, Alphabet alphabet, const FiniteSubspace& x) {
  int expected_bottom = x.ell;
  for (std::size_t i = 0; i < x.blocks.size(); ++i) {
    const auto& f = x.blocks[i];
    if (auto defect = variable_word_defect(space, alphabet, f)) {
      return "block " + std::to_string(i) + ": " + *defect;
    }
    if (f.bottom() != expected_bottom) {
      return i == 0 ? std::string("first block does not start at the anchor level")
                    : "blocks " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not compatible";
    }
    expected_bottom = f.top();
    const int target = x.k + static_cast<int>(i);
    if (target >= space.height()) return "domination target level outside the truncation";
    const auto ws = support(space, f);
    if (ws.level < target || !dominates(space.vtree(), ws, full_level(space.vtree(), target))) {
      return "support of block " + std::to_string(i) + " does not dominate T(" + std::to_string(target) + ")";
    }
  }
  return std::nullopt;
}

std::vector<Word> span_sequence(Alphabet alphabet, const FiniteSubspace& x) {
  std::vector<Word> acc{Word(x.ell, x.ell, {})};
  for (const auto& f : x.blocks) acc = concat_spans(acc, span(alphabet, f));
  return acc;
}

FiniteSubspace standard_subspace(const CellSpace& space, int k, int ell, int length) {
  if (ell < k) throw PreconditionError("a full level ell dominates T(k) only when ell >= k");
  if (length < 0 || ell + length > space.height()) throw RangeError("standard subspace exceeds the truncation");
  FiniteSubspace x{{}, k, ell};
  for (int i = 0; i < length; ++i) {
    const int level = ell + i;
    std::vector<Symbol> symbols;
    for (CellId c = space.level_begin(level); c < space.level_begin(level + 1); ++c) {
      symbols.push_back(Symbol::variable(c));
    }
    x.blocks.emplace_back(level, level + 1, std::move(symbols));
  }
  return x;
}

bool is_further_subspace(Alphabet alphabet, const FiniteSubspace& y, const FiniteSubspace& x) {
  if (y.ell != x.ell) throw PreconditionError("further subspace check across different anchors");
  if (y.blocks.empty()) return true;
  for (std::size_t j = 1; j <= x.blocks.size(); ++j) {
    if (x.blocks[j - 1].top() == y.top()) return span_subset(alphabet, y.joined(), x.prefix(j).joined());
  }
  return false;
}

FiniteSubspace quotient(Alphabet alphabet, const FiniteSubspace& big, const FiniteSubspace& x) {
  if (x.ell != big.ell) throw PreconditionError("quotient across different anchors");
  if (x.blocks.empty()) throw PreconditionError("quotient by the empty sequence");
  for (std::size_t j = 1; j <= big.blocks.size(); ++j) {
    if (big.blocks[j - 1].top() != x.top()) continue;
    const auto head = big.prefix(j);
    if (!span_subset(alphabet, x.joined(), head.joined())) break;
    return {std::vector<Word>(big.blocks.begin() + static_cast<std::ptrdiff_t>(j), big.blocks.end()),
            big.k + static_cast<int>(j), head.top()};
  }
  throw PreconditionError("x is not a further subspace of any prefix");
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

class WordSearch {
 public:
  WordSearch(const CellSpace& space, Alphabet alphabet, const VariableWordQuery& q,
             const std::function<bool(const Word&)>& visit)
      : space_(space), alphabet_(alphabet), q_(q), visit_(visit) {}

  void run() {
    const int h = space_.height();
    if (q_.bottom < 0 || q_.top > h || q_.bottom >= q_.top) throw RangeError("enumeration range outside the truncation");
    validate(space_.vtree(), q_.target);
    base_ = space_.level_begin(q_.bottom);
    ncell_ = space_.range_size(q_.bottom, q_.top);
    if (q_.host) {
      if (q_.host->bottom() != q_.bottom || q_.host->top() != q_.top || q_.host->size() != ncell_) {
        throw StructuralError("host word does not cover the enumeration range");
      }
    }
    level_.resize(ncell_);
    for (std::size_t i = 0; i < ncell_; ++i) level_[i] = space_.level(base_ + static_cast<CellId>(i));
    cur_.resize(ncell_);
    for (int p = std::max(q_.bottom, q_.target.level); p < q_.top && !stop_; ++p) over_supports(p);
  }

 private:
  void over_supports(int p) {
    const auto& vt = space_.vtree();
    const int d = vt.dim();
    std::vector<std::vector<std::vector<Index>>> choices(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const auto n = vt.tree(i).level_size(p);
      if (n > 24) throw RangeError("level too wide for support enumeration");
      const LevelSubset lower(q_.target.level, q_.target.coords[static_cast<std::size_t>(i)]);
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<Index> members;
        for (std::uint64_t x = 0; x < n; ++x) {
          if (mask >> x & 1U) members.push_back(static_cast<Index>(x));
        }
        if (dominates(vt.tree(i), LevelSubset(p, members), lower)) {
          choices[static_cast<std::size_t>(i)].push_back(std::move(members));
        }
      }
      if (choices[static_cast<std::size_t>(i)].empty()) return;
    }
    std::vector<std::size_t> pos(static_cast<std::size_t>(d), 0);
    while (!stop_) {
      VectorLevelSubset s{p, {}};
      for (int i = 0; i < d; ++i) s.coords.push_back(choices[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]]);
      const auto size = s.product_size();
      if (size <= q_.size_cap && (!q_.exact_size || size == *q_.exact_size)) over_levels(s);
      std::size_t i = pos.size();
      while (i-- > 0) {
        if (++pos[i] < choices[i].size()) break;
        pos[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }

  void over_levels(const VectorLevelSubset& s) {
    p_ = s.level;
    support_.clear();
    for (const auto& c : VectorSubset({s}).product()) support_.push_back(space_.id(c));
    for (CellId c : support_) {
      if (q_.host && q_.host->at(space_, c).is_letter()) return;
    }
    slot_.assign(ncell_, -1);
    for (std::size_t i = 0; i < ncell_; ++i) {
      if (level_[i] < p_) continue;
      const auto idx = index_of(support_, space_.ancestor(base_ + static_cast<CellId>(i), p_));
      if (idx < support_.size()) slot_[i] = static_cast<int>(idx);
    }
    const int extra = q_.top - p_ - 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << extra) && !stop_; ++mask) {
      extra_levels_ = mask;
      occ_.assign(support_.size() * static_cast<std::size_t>(extra + 1), 0);
      dfs(0);
    }
  }

  bool in_extra(int lv) const { return lv > p_ && (extra_levels_ >> (lv - p_ - 1) & 1U); }
  int& occ(int slot, int lv) { return occ_[static_cast<std::size_t>(slot) * static_cast<std::size_t>(q_.top - p_) + static_cast<std::size_t>(lv - p_)]; }

  void step(std::size_t i) {
    const int lv = level_[i];
    if (in_extra(lv) && (i + 1 == ncell_ || level_[i + 1] != lv)) {
      for (std::size_t slot = 0; slot < support_.size(); ++slot) {
        if (occ(static_cast<int>(slot), lv) == 0) return;
      }
    }
    dfs(i + 1);
  }

  void dfs(std::size_t i) {
    if (stop_) return;
    if (i == ncell_) {
      if (!visit_(Word(q_.bottom, q_.top, cur_))) stop_ = true;
      return;
    }
    const int lv = level_[i];
    const int slot = slot_[i];
    if (lv == p_ && slot >= 0) {
      cur_[i] = Symbol::variable(support_[static_cast<std::size_t>(slot)]);
      step(i);
      return;
    }
    const std::optional<Symbol> host = q_.host ? std::optional<Symbol>((*q_.host)[i]) : std::nullopt;
    if (host && host->is_letter()) {
      cur_[i] = *host;
      step(i);
      return;
    }
    for (int a = 0; a < alphabet_.size && !stop_; ++a) {
      cur_[i] = Symbol::letter(static_cast<Letter>(a));
      step(i);
    }
    if (slot >= 0 && in_extra(lv) && !stop_) {
      cur_[i] = Symbol::variable(support_[static_cast<std::size_t>(slot)]);
      ++occ(slot, lv);
      step(i);
      --occ(slot, lv);
    }
  }

  const CellSpace& space_;
  Alphabet alphabet_;
  const VariableWordQuery& q_;
  const std::function<bool(const Word&)>& visit_;
  CellId base_ = 0;
  std::size_t ncell_ = 0;
  std::vector<int> level_;
  std::vector<Symbol> cur_;
  int p_ = 0;
  std::vector<CellId> support_;
  std::vector<int> slot_;
  std::uint64_t extra_levels_ = 0;
  std::vector<int> occ_;
  bool stop_ = false;
};

}  // namespace

void for_each_variable_word(const CellSpace& space, Alphabet alphabet, const VariableWordQuery& query,
                            const std::function<bool(const Word&)>& visit) {
  WordSearch(space, alphabet, query, visit).run();
}

std::vector<Word> enumerate_variable_words(const CellSpace& space, Alphabet alphabet,
                                           const VariableWordQuery& query, std::size_t limit) {
  std::vector<Word> out;
  if (limit == 0) return out;
  for_each_variable_word(space, alphabet, query, [&](const Word& w) {
    out.push_back(w);
    return out.size() < limit;
  });
  return out;
}

void for_each_further_subspace(const CellSpace& space, Alphabet alphabet, const FiniteSubspace& x, std::size_t q,
                               const std::function<bool(const FiniteSubspace&)>& visit) {
  if (q > x.length()) throw PreconditionError("further subspaces longer than the host subspace");
  if (q == 0) {
    visit({{}, x.k, x.ell});
    return;
  }
  const FiniteSubspace head = x.prefix(q);
  if (!visit(head)) return;

  // Blocks of y spanning host blocks [from, to) as block number i.
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<Word>> cache;
  auto block_words = [&](std::size_t from, std::size_t to, std::size_t i) -> const std::vector<Word>& {
    auto key = std::make_tuple(from, to, i);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<Word> words;
    const int target = x.k + static_cast<int>(i);
    if (target < space.height()) {
      FiniteSubspace piece{std::vector<Word>(x.blocks.begin() + static_cast<std::ptrdiff_t>(from),
                                             x.blocks.begin() + static_cast<std::ptrdiff_t>(to)),
                           0, x.blocks[from].bottom()};
      VariableWordQuery query;
      query.bottom = piece.ell;
      query.top = piece.top();
      query.target = full_level(space.vtree(), target);
      query.host = piece.joined();
      for_each_variable_word(space, alphabet, query, [&](const Word& w) {
        if (span_subset(alphabet, w, *query.host)) words.push_back(w);
        return true;
      });
    }
    return cache.emplace(key, std::move(words)).first->second;
  };

  std::vector<std::size_t> bounds(q + 1, 0);
  bool stop = false;
  std::function<void(std::size_t)> choose = [&](std::size_t i) {
    if (stop) return;
    if (i == q) {
      std::vector<const std::vector<Word>*> lists;
      for (std::size_t b = 0; b < q; ++b) {
        lists.push_back(&block_words(bounds[b], bounds[b + 1], b));
        if (lists.back()->empty()) return;
      }
      std::vector<std::size_t> pos(q, 0);
      while (true) {
        FiniteSubspace y{{}, x.k, x.ell};
        for (std::size_t b = 0; b < q; ++b) y.blocks.push_back((*lists[b])[pos[b]]);
        if (!(y == head) && !visit(y)) {
          stop = true;
          return;
        }
        std::size_t b = q;
        while (b-- > 0) {
          if (++pos[b] < lists[b]->size()) break;
          pos[b] = 0;
        }
        if (b == static_cast<std::size_t>(-1)) return;
      }
    }
    const std::size_t remaining = q - i - 1;
    for (std::size_t next = bounds[i] + 1; next + remaining <= x.length(); ++next) {
      bounds[i + 1] = next;
      choose(i + 1);
      if (stop) return;
    }
  };
  choose(0);
}

// ---------------------------------------------------------------------------
// Span text

std::string format_span(const CellSpace& space, std::span<const Word> words) {
  std::string out = "BEGIN SPAN\n";
  for (const auto& w : words) out += encode_word(space, w) + "\n";
  out += "END SPAN\n";
  return out;
}

std::vector<Word> parse_span(const CellSpace& space, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool open = false;
  std::vector<Word> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!open) {
      if (line != "BEGIN SPAN") throw ParseError("expected `BEGIN SPAN`", line_no);
      open = true;
      continue;
    }
    if (line == "END SPAN") return out;
    try {
      out.push_back(parse_word(space, line));
    } catch (const InputError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  throw ParseError(open ? "missing `END SPAN`" : "missing `BEGIN SPAN`", line_no);
}

}  // namespace hjt
