#include "hjt/shell.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hjt/coloring.hpp"
#include "hjt/error.hpp"
#include "hjt/large.hpp"
#include "hjt/lines.hpp"
#include "hjt/parallel.hpp"
#include "hjt/union.hpp"
#include "hjt/word.hpp"

namespace hjt {

namespace {

constexpr std::uint64_t kForcingRecheckLimit = std::uint64_t{1} << 20;

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::pair<std::string_view, std::string_view> key_rest(std::string_view line) {
  const auto gap = line.find(' ');
  if (gap == std::string_view::npos) return {line, {}};
  return {line.substr(0, gap), line.substr(gap + 1)};
}

int to_int(std::string_view text, const char* what) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(std::string("bad ") + what + " `" + std::string(text) + "`");
}

struct Options {
  CLI::App* hj = nullptr;
  CLI::App* lines = nullptr;
  CLI::App* folkman = nullptr;
  CLI::App* tree_hj = nullptr;
  CLI::App* hl = nullptr;
  CLI::App* du = nullptr;
  CLI::App* counterexample = nullptr;
  CLI::App* validate = nullptr;
  CLI::Option* folkman_n = nullptr;
  CLI::Option* folkman_colors = nullptr;
  CLI::Option* folkman_nmax = nullptr;
  CLI::Option* folkman_coloring = nullptr;
  CLI::Option* length = nullptr;
};

void common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--workers", c.workers, "worker threads (default HJT_WORKERS or 1)");
  sub->add_option("--out", c.out, "write the certificate to this file");
}

void coloring_option(CLI::App* sub, RunConfig& c, const char* help, bool required = true) {
  auto* opt = sub->add_option("--coloring", c.coloring, help)->expected(1, -1);
  if (required) opt->required();
}

Options build_app(CLI::App& app, RunConfig& c) {
  Options o;
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");

  o.hj = app.add_subcommand("hj", "least N forcing a monochromatic line in every coloring");
  o.hj->add_option("--k", c.k, "alphabet size")->required();
  o.hj->add_option("--r", c.r, "number of colors")->required();
  o.hj->add_option("--nmax", c.nmax, "largest length to try")->required();

  o.lines = app.add_subcommand("lines", "first monochromatic line of a point coloring");
  o.lines->add_option("--k", c.k, "alphabet size")->required();
  o.lines->add_option("--n", c.n, "word length")->required();
  coloring_option(o.lines, c, "constant C | letter_count_mod M | table PATH");

  o.folkman = app.add_subcommand("folkman", "disjoint sets with monochromatic unions");
  o.folkman->add_option("--k", c.k, "number of sets")->required();
  o.folkman_n = o.folkman->add_option("--n", c.n, "ground set size");
  o.folkman_colors = o.folkman->add_option("--colors", c.colors, "colors, for the least forcing ground size");
  o.folkman_nmax = o.folkman->add_option("--nmax", c.nmax, "largest ground size to try");
  o.folkman_coloring = o.folkman->add_option("--coloring", c.coloring, "constant C | size_mod M | table PATH")
                           ->expected(1, -1);

  o.tree_hj = app.add_subcommand("tree-hj", "monochromatic further subspace of a standard subspace");
  o.tree_hj->add_option("--tree", c.tree_path, "tree spec file")->required();
  o.tree_hj->add_option("--alphabet", c.alphabet, "alphabet size");
  coloring_option(o.tree_hj, c, "constant C | letter_count_mod M | table PATH");
  o.tree_hj->add_option("--k", c.k, "domination level")->required();
  o.tree_hj->add_option("--ell", c.ell, "first level")->required();
  o.length = o.tree_hj->add_option("--length", c.length, "number of blocks (default: up to the top)");
  o.tree_hj->add_option("--q", c.q, "length of the further subspace")->required();

  o.hl = app.add_subcommand("hl", "dense or t-dense monochromatic pattern of a cell coloring");
  o.hl->add_option("--tree", c.tree_path, "tree spec file")->required();
  coloring_option(o.hl, c, "constant C | level_parity | min_level_mod M | table PATH");
  o.hl->add_option("--m", c.m, "pattern depth")->required();

  o.du = app.add_subcommand("disjoint-union", "disjoint family with a monochromatic union span");
  o.du->add_option("--tree", c.tree_path, "tree spec file")->required();
  coloring_option(o.du, c, "constant C | size_mod M | level_parity | min_level_mod M | table PATH");
  o.du->add_option("--depth", c.depth, "truncation depth")->required();
  o.du->add_option("--m", c.m, "pattern depth")->required();
  o.du->add_option("--q", c.q, "repair length")->required();

  o.counterexample = app.add_subcommand("counterexample", "check the strong-subtree pair coloring");
  o.counterexample->add_option("--tree", c.tree_path, "tree spec file (one coordinate)")->required();
  o.counterexample->add_option("--subtree-height", c.subtree_height, "levels of each strong subtree");
  o.counterexample->add_option("--depth", c.depth, "truncation depth (default: tree height)");
  o.counterexample->add_option("--cap", c.cap, "families checked per subtree");
  coloring_option(o.counterexample, c, "counterexample_pair", false);

  o.validate = app.add_subcommand("validate", "re-check a certificate file");
  o.validate->add_option("cert", c.cert_path, "certificate file")->required();

  for (auto* sub : {o.hj, o.lines, o.folkman, o.tree_hj, o.hl, o.du, o.counterexample, o.validate}) common(sub, c);
  return o;
}

void positive(int v, const char* flag) {
  if (v < 1) throw InputError(std::string("budget ") + flag + " must be positive, got " + std::to_string(v));
}

void nonnegative(int v, const char* flag) {
  if (v < 0) throw InputError(std::string(flag) + " must be nonnegative, got " + std::to_string(v));
}

void require_names(const RunConfig& c, std::initializer_list<const char*> names) {
  const auto spec = ColoringSpec::parse(c.coloring);
  if (spec.name == "table") {
    if (spec.params.size() != 1) throw InputError("coloring `table` takes a file path");
    load_color_table(spec.params.front());
    return;
  }
  for (const char* n : names) {
    if (spec.name == n) return;
  }
  throw InputError("unknown builtin coloring `" + spec.name + "` for " + c.command);
}

VectorSubset full_levels(const VectorTree& vt) {
  std::vector<VectorLevelSubset> levels;
  for (int n = 0; n < vt.height(); ++n) levels.push_back(full_level(vt, n));
  return VectorSubset(std::move(levels));
}

std::string format_level(const VectorLevelSubset& l) {
  std::string out = "level " + std::to_string(l.level) + " ";
  for (std::size_t i = 0; i < l.coords.size(); ++i) {
    if (i) out += '/';
    for (std::size_t j = 0; j < l.coords[i].size(); ++j) {
      if (j) out += ',';
      out += std::to_string(l.coords[i][j]);
    }
  }
  return out;
}

VectorLevelSubset parse_level(std::string_view rest) {
  const auto parts = split_ws(rest);
  if (parts.size() != 2) throw InputError("level line needs a level and coordinate lists");
  VectorLevelSubset out;
  out.level = to_int(parts[0], "level");
  std::stringstream coords(parts[1]);
  std::string coord;
  while (std::getline(coords, coord, '/')) {
    std::vector<Index> members;
    std::stringstream in(coord);
    std::string item;
    while (std::getline(in, item, ',')) {
      const int v = to_int(item, "node index");
      if (v < 0) throw InputError("negative node index");
      members.push_back(static_cast<Index>(v));
    }
    out.coords.push_back(std::move(members));
  }
  return out;
}

CellId parse_cell(const CellSpace& space, std::string_view text) {
  const auto cells = parse_min_set(space, text);
  if (cells.size() != 1) throw InputError("expected a single cell, got `" + std::string(text) + "`");
  return cells.front();
}

void pattern_payload(const CellSpace& space, const HlWitness& w, std::vector<std::string>& out) {
  out.push_back(std::string("branch ") + (w.branch == HlBranch::Dense ? "i" : "ii"));
  if (w.anchor) out.push_back("anchor " + to_string(space.cell(*w.anchor)));
  for (const auto& l : w.d.levels()) out.push_back(format_level(l));
}

HlWitness parse_pattern(const CellSpace& space, const std::vector<std::string>& payload) {
  HlWitness w;
  std::vector<VectorLevelSubset> levels;
  bool branch = false;
  for (const auto& line : payload) {
    const auto [key, rest] = key_rest(line);
    if (key == "branch") {
      if (rest != "i" && rest != "ii") throw InputError("branch must be i or ii");
      w.branch = rest == "i" ? HlBranch::Dense : HlBranch::TDense;
      branch = true;
    } else if (key == "anchor") {
      w.anchor = parse_cell(space, rest);
    } else if (key == "level") {
      levels.push_back(parse_level(rest));
    }
  }
  if (!branch) throw InputError("payload has no branch line");
  w.d = VectorSubset(std::move(levels));
  return w;
}

std::string format_subtree(const StrongSubtree& s) {
  std::string out = "subtree";
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    out += " " + std::to_string(s.levels[i]) + ":";
    for (std::size_t j = 0; j < s.nodes[i].size(); ++j) {
      if (j) out += ',';
      out += std::to_string(s.nodes[i][j]);
    }
  }
  return out;
}

bool forcing_checkable(int k, int r, int value) {
  std::uint64_t total = 1;
  const auto points = point_count(k, value);
  for (std::uint64_t i = 0; i < points; ++i) {
    total *= static_cast<std::uint64_t>(r);
    if (total > kForcingRecheckLimit) return false;
  }
  return true;
}

std::optional<std::string> check_hj(const RunConfig& c, const std::vector<std::string>& payload) {
  int value = -1;
  int length = -1;
  std::vector<std::pair<std::string, int>> points;
  for (const auto& line : payload) {
    const auto [key, rest] = key_rest(line);
    if (key == "value") {
      value = to_int(rest, "value");
    } else if (key == "avoiding-length") {
      length = to_int(rest, "length");
    } else if (key == "point") {
      const auto parts = split_ws(rest);
      if (parts.size() != 2) return "point line needs a word and a color";
      points.emplace_back(parts[0], to_int(parts[1], "color"));
    } else {
      return "unexpected payload line `" + line + "`";
    }
  }
  if (value < 1 || length != value - 1) return std::string("value and avoiding length disagree");
  PointColoring avoid{c.k, length, c.r, std::vector<int>(point_count(c.k, length), -1)};
  for (const auto& [text, color] : points) {
    const auto w = text == "-" ? ClassicWord{} : parse_classic(c.k, text);
    if (static_cast<int>(w.size()) != length || std::count(w.begin(), w.end(), kVar) > 0) {
      return "point `" + text + "` is not a letter string of length " + std::to_string(length);
    }
    auto& slot = avoid.colors[point_index(c.k, w)];
    if (slot != -1) return "point `" + text + "` repeats";
    slot = color;
  }
  try {
    check_total(avoid);
  } catch (const InputError& e) {
    return std::string("avoiding coloring: ") + e.what();
  }
  if (has_mono_line_bruteforce(avoid)) return std::string("the avoiding coloring has a monochromatic line");
  if (forcing_checkable(c.k, c.r, value)) {
    PointColoring any{c.k, value, c.r, std::vector<int>(point_count(c.k, value), 0)};
    while (true) {
      if (!has_mono_line_bruteforce(any)) return "a coloring of length " + std::to_string(value) + " avoids every line";
      std::size_t i = any.colors.size();
      while (i-- > 0) {
        if (++any.colors[i] < c.r) break;
        any.colors[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_lines(const RunConfig& c, const std::vector<std::string>& payload) {
  const auto coloring = make_point_coloring(c.k, c.n, ColoringSpec::parse(c.coloring));
  std::optional<ClassicWord> line;
  std::optional<int> color;
  for (const auto& l : payload) {
    const auto [key, rest] = key_rest(l);
    if (key == "line") line = parse_classic(c.k, rest);
    else if (key == "color") color = to_int(rest, "color");
    else return "unexpected payload line `" + l + "`";
  }
  if (!line || !color) return std::string("payload needs a line and a color");
  if (static_cast<int>(line->size()) != c.n || std::count(line->begin(), line->end(), kVar) == 0) {
    return std::string("payload line is not a variable word of the right length");
  }
  for (auto p : line_points(c.k, *line)) {
    if (coloring.colors[p] != *color) return "point " + encode_classic(point_letters(c.k, c.n, p)) + " has another color";
  }
  return std::nullopt;
}

std::optional<std::string> check_folkman(const RunConfig& c, const std::vector<std::string>& payload) {
  if (c.colors > 0) {
    int value = -1;
    int size = -1;
    std::vector<int> colors;
    std::vector<std::pair<std::string, int>> entries;
    for (const auto& l : payload) {
      const auto [key, rest] = key_rest(l);
      if (key == "value") {
        value = to_int(rest, "value");
      } else if (key == "avoiding-size") {
        size = to_int(rest, "size");
      } else if (key == "subset") {
        const auto parts = split_ws(rest);
        if (parts.size() != 2) return "subset line needs a subset and a color";
        entries.emplace_back(parts[0], to_int(parts[1], "color"));
      } else {
        return "unexpected payload line `" + l + "`";
      }
    }
    if (value < 1 || size != value - 1 || size > 16) return std::string("value and avoiding size disagree");
    colors.assign(std::size_t{1} << size, -1);
    for (const auto& [text, color] : entries) {
      const auto mask = parse_subset(size, text);
      if (colors[mask] != -1) return "subset " + text + " repeats";
      if (color < 0 || color >= c.colors) return "subset " + text + " has color out of range";
      colors[mask] = color;
    }
    for (std::size_t mask = 1; mask < colors.size(); ++mask) {
      if (colors[mask] == -1) return "subset " + encode_subset(static_cast<std::uint32_t>(mask)) + " has no color";
    }
    if (folkman_bruteforce(size, c.k, [&](std::uint32_t mask) { return colors[mask]; })) {
      return std::string("the avoiding coloring admits a monochromatic configuration");
    }
    return std::nullopt;
  }
  const auto coloring = make_subset_coloring(c.n, ColoringSpec::parse(c.coloring));
  std::vector<std::uint32_t> sets;
  for (const auto& l : payload) {
    const auto [key, rest] = key_rest(l);
    if (key != "set") return "unexpected payload line `" + l + "`";
    sets.push_back(parse_subset(c.n, std::string(rest)));
  }
  return folkman_defect(c.n, c.k, coloring, sets);
}

struct TreeHjSetup {
  CellSpace space;
  Alphabet alphabet;
  WordColoring coloring;
  FiniteSubspace x;

  explicit TreeHjSetup(const RunConfig& c)
      : space(*c.tree),
        alphabet(c.alphabet),
        coloring(make_word_coloring(space, ColoringSpec::parse(c.coloring))),
        x(standard_subspace(space, c.k, c.ell, c.length)) {}
  TreeHjSetup(const TreeHjSetup&) = delete;
};

std::optional<std::string> check_tree_hj(const RunConfig& c, const std::vector<std::string>& payload) {
  const TreeHjSetup s(c);
  std::optional<int> color;
  FiniteSubspace w{{}, s.x.k, s.x.ell};
  for (const auto& l : payload) {
    const auto [key, rest] = key_rest(l);
    if (key == "color") color = to_int(rest, "color");
    else if (key == "block") w.blocks.push_back(parse_word(s.space, rest));
    else return "unexpected payload line `" + l + "`";
  }
  if (!color) return std::string("payload has no color");
  if (w.length() != static_cast<std::size_t>(c.q)) return std::string("witness length differs from q");
  return tree_hj_defect(s.space, s.alphabet, s.coloring, s.x, w, *color);
}

std::optional<std::string> check_hl(const RunConfig& c, const std::vector<std::string>& payload) {
  const CellSpace space(*c.tree);
  const auto coloring = make_cell_coloring(space, ColoringSpec::parse(c.coloring));
  const auto w = parse_pattern(space, payload);
  return hl_defect(space, coloring, full_levels(space.vtree()), c.m, w);
}

std::optional<std::string> check_du(const RunConfig& c, const std::vector<std::string>& payload) {
  const CellSpace space(*c.tree);
  const auto coloring = make_set_coloring(space, ColoringSpec::parse(c.coloring));
  const auto original = UFamily::singletons(space, full_levels(space.vtree()));
  const auto pattern = parse_pattern(space, payload);
  std::vector<UFamily::Entry> entries;
  for (const auto& l : payload) {
    const auto [key, rest] = key_rest(l);
    if (key != "set") continue;
    const auto parts = split_ws(rest);
    if (parts.size() != 2) return "set line needs an index and a set";
    entries.emplace_back(parse_cell(space, parts[0]), parse_min_set(space, parts[1]));
  }
  const UFamily lifted(space, pattern.d, std::move(entries));
  return du_defect(space, coloring, original, c.m, pattern, lifted);
}

std::optional<std::string> check_counterexample(const RunConfig& c, const std::vector<std::string>& payload) {
  if (payload != std::vector<std::string>{"holds true"}) return std::string("payload does not assert that the coloring holds");
  const auto report = verify_counterexample(c.tree->tree(0), c.subtree_height, c.depth, c.cap, 1);
  if (!report.holds) return std::string("a strong subtree has a monochromatic family");
  if (report.capped) return std::string("the family cap was reached");
  return std::nullopt;
}

Certificate run_hj(const RunConfig& c) {
  Certificate cert;
  const auto res = hj_number(c.k, c.r, c.nmax, c.workers);
  for (const auto& l : res.levels) {
    cert.stat("level-" + std::to_string(l.n) + "-colorings", l.colorings);
    cert.stat("level-" + std::to_string(l.n) + "-examined", l.examined);
  }
  if (!res.note.empty()) cert.notes.push_back(res.note);
  if (!res.resolved) {
    cert.outcome = res.levels.size() == static_cast<std::size_t>(c.nmax) ? Outcome::Exhausted : Outcome::Unresolved;
    cert.payload.push_back("checked-length " + std::to_string(res.value));
    return cert;
  }
  cert.outcome = Outcome::Witness;
  cert.payload.push_back("value " + std::to_string(res.value));
  cert.payload.push_back("avoiding-length " + std::to_string(res.avoiding->n));
  for (std::uint64_t p = 0; p < res.avoiding->colors.size(); ++p) {
    const auto w = point_letters(c.k, res.avoiding->n, p);
    cert.payload.push_back("point " + (w.empty() ? std::string("-") : encode_classic(w)) + " " +
                           std::to_string(res.avoiding->colors[p]));
  }
  if (!forcing_checkable(c.k, c.r, res.value)) {
    cert.notes.push_back("forcing at length " + std::to_string(res.value) + " rests on the search alone");
  }
  return cert;
}

Certificate run_lines(const RunConfig& c) {
  Certificate cert;
  const auto coloring = make_point_coloring(c.k, c.n, ColoringSpec::parse(c.coloring));
  const auto res = find_mono_line(coloring);
  cert.stat("points", coloring.colors.size());
  cert.stat("lines-checked", res.lines_checked);
  if (!res.witness) {
    cert.outcome = Outcome::Exhausted;
    return cert;
  }
  cert.outcome = Outcome::Witness;
  cert.payload.push_back("line " + encode_classic(res.witness->line));
  cert.payload.push_back("color " + std::to_string(res.witness->color));
  return cert;
}

Certificate run_folkman(const RunConfig& c) {
  Certificate cert;
  if (c.colors > 0) {
    const auto res = folkman_number(c.k, c.colors, c.nmax, c.workers);
    for (const auto& l : res.levels) cert.stat("size-" + std::to_string(l.n) + "-nodes", l.nodes);
    if (!res.resolved) {
      cert.outcome = Outcome::Exhausted;
      cert.notes.push_back("every checked ground size admits an avoiding coloring");
      return cert;
    }
    cert.outcome = Outcome::Witness;
    cert.payload.push_back("value " + std::to_string(res.value));
    cert.payload.push_back("avoiding-size " + std::to_string(res.value - 1));
    for (std::size_t i = 0; i < res.avoiding.size(); ++i) {
      cert.payload.push_back("subset " + encode_subset(static_cast<std::uint32_t>(i + 1)) + " " +
                             std::to_string(res.avoiding[i]));
    }
    cert.notes.push_back("forcing at size " + std::to_string(res.value) + " rests on the search alone");
    return cert;
  }
  const auto coloring = make_subset_coloring(c.n, ColoringSpec::parse(c.coloring));
  const auto res = folkman_search(c.n, c.k, coloring);
  cert.stat("nodes", res.nodes);
  if (!res.sets) {
    cert.outcome = Outcome::Exhausted;
    return cert;
  }
  cert.outcome = Outcome::Witness;
  for (auto m : *res.sets) cert.payload.push_back("set " + encode_subset(m));
  return cert;
}

Certificate run_tree_hj(const RunConfig& c) {
  Certificate cert;
  const TreeHjSetup s(c);
  const auto res = tree_hj_search(s.space, s.alphabet, s.coloring, s.x, static_cast<std::size_t>(c.q), c.workers);
  cert.stat("candidates", res.candidates);
  cert.stat("examined", res.examined);
  if (!res.witness) {
    cert.outcome = Outcome::Exhausted;
    return cert;
  }
  cert.outcome = Outcome::Witness;
  cert.payload.push_back("color " + std::to_string(res.color));
  for (const auto& b : res.witness->blocks) cert.payload.push_back("block " + encode_word(s.space, b));
  return cert;
}

Certificate run_hl(const RunConfig& c) {
  Certificate cert;
  const CellSpace space(*c.tree);
  const auto coloring = make_cell_coloring(space, ColoringSpec::parse(c.coloring));
  const auto res = hl_search(space, coloring, full_levels(space.vtree()), c.m);
  cert.stat("patterns", res.patterns);
  if (!res.witness) {
    cert.outcome = Outcome::Exhausted;
    return cert;
  }
  cert.outcome = Outcome::Witness;
  pattern_payload(space, *res.witness, cert.payload);
  return cert;
}

Certificate run_du(const RunConfig& c) {
  Certificate cert;
  const CellSpace space(*c.tree);
  const auto coloring = make_set_coloring(space, ColoringSpec::parse(c.coloring));
  const auto u = UFamily::singletons(space, full_levels(space.vtree()));
  const auto res = disjoint_union_search(space, coloring, u, c.depth, c.m, static_cast<std::size_t>(c.q), c.workers);
  cert.stat("repairs", res.repairs);
  cert.stat("span-checked", res.span_checked);
  cert.notes = res.notes;
  if (!res.pattern) {
    cert.outcome = Outcome::Exhausted;
    return cert;
  }
  cert.outcome = Outcome::Witness;
  cert.notes.push_back("pattern validated as dense up to m levels, which implies domination");
  pattern_payload(space, *res.pattern, cert.payload);
  for (const auto& [t, set] : res.family.entries()) {
    cert.payload.push_back("set " + to_string(space.cell(t)) + " " + encode_min_set(space, set));
  }
  return cert;
}

Certificate run_counterexample(const RunConfig& c) {
  Certificate cert;
  const auto& tree = c.tree->tree(0);
  const auto res = verify_counterexample(tree, c.subtree_height, c.depth, c.cap, c.workers);
  cert.stat("subtrees", res.subtrees);
  cert.stat("families", res.families);
  if (!res.holds) {
    cert.outcome = Outcome::Exhausted;
    cert.payload.push_back("holds false");
    cert.payload.push_back(format_subtree(*res.failing_subtree));
    const CellSpace space(*c.tree);
    for (const auto& u : *res.failing_family) cert.payload.push_back("family " + encode_min_set(space, u));
    return cert;
  }
  if (res.capped) {
    cert.outcome = Outcome::Unresolved;
    cert.notes.push_back("family cap reached before every family was checked");
    return cert;
  }
  cert.outcome = Outcome::Witness;
  cert.payload.push_back("holds true");
  return cert;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  c.workers = default_workers();
  CLI::App app{"hjt"};
  const auto o = build_app(app, c);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Error& e) {
    const std::string msg = e.what();
    throw InputError(msg.empty() ? e.get_name() : msg);
  }
  c.command = app.get_subcommands().front()->get_name();
  positive(c.workers, "--workers");

  auto load_tree = [&] { c.tree = load_vector_tree(c.tree_path); };
  if (c.command == "hj") {
    positive(c.k, "--k");
    positive(c.r, "--r");
    positive(c.nmax, "--nmax");
  } else if (c.command == "lines") {
    positive(c.k, "--k");
    positive(c.n, "--n");
    require_names(c, {"constant", "letter_count_mod"});
  } else if (c.command == "folkman") {
    positive(c.k, "--k");
    if (o.folkman_colors->count() > 0 || o.folkman_nmax->count() > 0) {
      if (o.folkman_n->count() > 0 || o.folkman_coloring->count() > 0) {
        throw InputError("folkman takes either --n and --coloring, or --colors and --nmax");
      }
      positive(c.colors, "--colors");
      positive(c.nmax, "--nmax");
    } else {
      if (o.folkman_n->count() == 0 || o.folkman_coloring->count() == 0) {
        throw InputError("folkman needs --n and --coloring, or --colors and --nmax");
      }
      positive(c.n, "--n");
      require_names(c, {"constant", "size_mod"});
    }
  } else if (c.command == "tree-hj") {
    positive(c.alphabet, "--alphabet");
    nonnegative(c.k, "--k");
    nonnegative(c.ell, "--ell");
    positive(c.q, "--q");
    require_names(c, {"constant", "letter_count_mod"});
    load_tree();
    if (o.length->count() == 0) c.length = c.tree->height() - c.ell;
    positive(c.length, "--length");
  } else if (c.command == "hl") {
    positive(c.m, "--m");
    require_names(c, {"constant", "level_parity", "min_level_mod"});
    load_tree();
  } else if (c.command == "disjoint-union") {
    positive(c.depth, "--depth");
    positive(c.m, "--m");
    positive(c.q, "--q");
    require_names(c, {"constant", "size_mod", "level_parity", "min_level_mod"});
    load_tree();
  } else if (c.command == "counterexample") {
    if (c.coloring.empty()) c.coloring = {"counterexample_pair"};
    if (c.coloring != std::vector<std::string>{"counterexample_pair"}) {
      throw InputError("counterexample only supports --coloring counterexample_pair");
    }
    positive(c.subtree_height, "--subtree-height");
    if (c.cap < 1) throw InputError("budget --cap must be positive");
    load_tree();
    if (c.tree->dim() != 1) throw InputError("counterexample needs a tree spec with one coordinate");
    if (c.depth == 0) c.depth = c.tree->height();
    positive(c.depth, "--depth");
  } else if (c.command == "validate") {
    std::ifstream in(c.cert_path);
    if (!in) throw InputError("cannot open certificate `" + c.cert_path + "`");
  }
  return c;
}

std::string canonical_echo(const RunConfig& c) {
  auto opt = [](const char* flag, auto v) { return std::string(" ") + flag + " " + std::to_string(v); };
  std::string coloring;
  for (const auto& t : c.coloring) coloring += " " + t;
  if (!c.coloring.empty()) coloring = " --coloring" + coloring;
  const std::string tree = " --tree " + c.tree_path;
  if (c.command == "hj") return "hj" + opt("--k", c.k) + opt("--r", c.r) + opt("--nmax", c.nmax);
  if (c.command == "lines") return "lines" + opt("--k", c.k) + opt("--n", c.n) + coloring;
  if (c.command == "folkman") {
    if (c.colors > 0) return "folkman" + opt("--k", c.k) + opt("--colors", c.colors) + opt("--nmax", c.nmax);
    return "folkman" + opt("--k", c.k) + opt("--n", c.n) + coloring;
  }
  if (c.command == "tree-hj") {
    return "tree-hj" + tree + opt("--alphabet", c.alphabet) + coloring + opt("--k", c.k) + opt("--ell", c.ell) +
           opt("--length", c.length) + opt("--q", c.q);
  }
  if (c.command == "hl") return "hl" + tree + coloring + opt("--m", c.m);
  if (c.command == "disjoint-union") {
    return "disjoint-union" + tree + coloring + opt("--depth", c.depth) + opt("--m", c.m) + opt("--q", c.q);
  }
  if (c.command == "counterexample") {
    return "counterexample" + tree + opt("--subtree-height", c.subtree_height) + opt("--depth", c.depth) +
           opt("--cap", c.cap) + coloring;
  }
  return "validate " + c.cert_path;
}

std::string config_hash(const RunConfig& c) {
  std::string material = canonical_echo(c) + "\n";
  if (c.tree) material += format_vector_tree(*c.tree);
  material += "\n";
  if (!c.coloring.empty()) material += ColoringSpec::parse(c.coloring).fingerprint();
  return hex64(fnv1a64(material));
}

std::optional<std::string> check_payload(const RunConfig& c, const Certificate& cert) {
  try {
    if (c.command == "hj") return check_hj(c, cert.payload);
    if (c.command == "lines") return check_lines(c, cert.payload);
    if (c.command == "folkman") return check_folkman(c, cert.payload);
    if (c.command == "tree-hj") return check_tree_hj(c, cert.payload);
    if (c.command == "hl") return check_hl(c, cert.payload);
    if (c.command == "disjoint-union") return check_du(c, cert.payload);
    if (c.command == "counterexample") return check_counterexample(c, cert.payload);
  } catch (const Error& e) {
    return std::string("payload rejected: ") + e.what();
  }
  return "no checker for `" + c.command + "`";
}

RunResult run(const RunConfig& c) {
  Certificate cert;
  if (c.command == "hj") cert = run_hj(c);
  else if (c.command == "lines") cert = run_lines(c);
  else if (c.command == "folkman") cert = run_folkman(c);
  else if (c.command == "tree-hj") cert = run_tree_hj(c);
  else if (c.command == "hl") cert = run_hl(c);
  else if (c.command == "disjoint-union") cert = run_du(c);
  else if (c.command == "counterexample") cert = run_counterexample(c);
  else throw InputError("command `" + c.command + "` does not produce a certificate");
  cert.command = canonical_echo(c);
  cert.config_hash = config_hash(c);
  if (cert.outcome == Outcome::Witness) {
    if (auto defect = check_payload(c, cert)) throw PreconditionError("witness failed its checker: " + *defect);
    cert.validated = true;
  }
  return {cert, cert.outcome == Outcome::Witness ? 0 : 1};
}

ValidationReport validate_certificate(const std::string& text, int workers) {
  ValidationReport report;
  const auto cert = parse_certificate(text);
  auto config = parse_config(split_ws(cert.command));
  config.workers = workers;
  const bool hash_ok = config_hash(config) == cert.config_hash;
  report.lines.push_back(std::string("config-hash ") + (hash_ok ? "ok" : "mismatch"));
  bool payload_ok = true;
  if (cert.outcome == Outcome::Witness) {
    const auto defect = check_payload(config, cert);
    payload_ok = !defect && cert.validated;
    report.lines.push_back(defect ? "payload rejected: " + *defect : std::string("payload ok"));
  } else {
    payload_ok = !cert.validated;
    report.lines.push_back("payload not a witness");
  }
  const auto fresh = serialize_certificate(run(config).cert);
  const bool bytes_ok = fresh == text;
  report.lines.push_back(std::string("rerun ") + (bytes_ok ? "identical" : "differs"));
  report.ok = hash_ok && payload_ok && bytes_ok;
  report.lines.push_back(report.ok ? "certificate valid" : "certificate mismatch");
  return report;
}

int run_cli(const std::vector<std::string>& args) {
  if (args.empty() || std::find(args.begin(), args.end(), "--help") != args.end() ||
      std::find(args.begin(), args.end(), "-h") != args.end() ||
      std::find(args.begin(), args.end(), "--help-all") != args.end()) {
    RunConfig c;
    CLI::App app{"exhaustive searches over words, trees and set families", "hjt"};
    build_app(app, c);
    std::string sub;
    if (!args.empty() && args.front().rfind("-", 0) != 0) sub = args.front();
    const bool all = std::find(args.begin(), args.end(), "--help-all") != args.end();
    try {
      std::cout << (sub.empty() ? app.help("", all ? CLI::AppFormatMode::All : CLI::AppFormatMode::Normal)
                                : app.get_subcommand(sub)->help());
    } catch (const CLI::Error&) {
      std::cerr << "error: unknown command `" << sub << "`\n";
      return 2;
    }
    return args.empty() ? 2 : 0;
  }
  try {
    const auto config = parse_config(args);
    const auto start = std::chrono::steady_clock::now();
    if (config.command == "validate") {
      std::ifstream in(config.cert_path, std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      const auto report = validate_certificate(buf.str(), config.workers);
      for (const auto& l : report.lines) std::cout << l << "\n";
      return report.ok ? 0 : 1;
    }
    const auto result = run(config);
    const auto text = serialize_certificate(result.cert);
    if (config.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(config.out, std::ios::binary);
      if (!out) throw InputError("cannot write `" + config.out + "`");
      out << text;
      std::cout << to_string(result.cert.outcome) << "\n";
    }
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    std::cerr << "wall " << wall.count() << " s\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hjt
