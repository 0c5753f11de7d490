#include "hjt/coloring.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "hjt/error.hpp"

namespace hjt {

namespace {

int parse_param(const ColoringSpec& spec, bool positive) {
  if (spec.params.size() != 1) throw InputError("coloring `" + spec.name + "` takes one integer parameter");
  const auto& p = spec.params.front();
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(p, &used);
    if (used != p.size()) v = -1;
  } catch (const std::exception&) {
    v = -1;
  }
  if (v < 0) throw InputError("coloring `" + spec.name + "` parameter `" + p + "` is not a nonnegative integer");
  if (positive && v < 1) throw InputError("coloring `" + spec.name + "` parameter must be positive");
  return v;
}

void no_params(const ColoringSpec& spec) {
  if (!spec.params.empty()) throw InputError("coloring `" + spec.name + "` takes no parameters");
}

[[noreturn]] void unknown(const ColoringSpec& spec, const char* kind) {
  throw InputError("unknown " + std::string(kind) + " coloring `" + spec.name + "`");
}

using Table = std::shared_ptr<const std::map<std::string, int>>;

Table table_of(const ColoringSpec& spec, const std::function<std::string(const std::string&)>& canonical) {
  if (spec.params.size() != 1) throw InputError("coloring `table` takes a file path");
  std::map<std::string, int> out;
  for (const auto& [key, color] : load_color_table(spec.params.front())) {
    std::string c;
    try {
      c = canonical(key);
    } catch (const Error& e) {
      throw InputError(spec.params.front() + ": key `" + key + "`: " + e.what());
    }
    if (!out.emplace(c, color).second) throw InputError(spec.params.front() + ": key `" + key + "` repeats");
  }
  return std::make_shared<const std::map<std::string, int>>(std::move(out));
}

int lookup(const Table& table, const std::string& key) {
  auto it = table->find(key);
  if (it == table->end()) throw InputError("coloring table has no entry for `" + key + "`");
  return it->second;
}

int count_letter_zero(std::span<const Symbol> symbols) {
  return static_cast<int>(std::count_if(symbols.begin(), symbols.end(),
                                        [](Symbol s) { return s.is_letter() && s.letter_value() == 0; }));
}

}  // namespace

ColoringSpec ColoringSpec::parse(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw InputError("empty coloring spec");
  return {tokens.front(), std::vector<std::string>(tokens.begin() + 1, tokens.end())};
}

std::string ColoringSpec::echo() const {
  std::string out = name;
  for (const auto& p : params) out += " " + p;
  return out;
}

std::string ColoringSpec::fingerprint() const {
  if (name != "table" || params.size() != 1) return {};
  std::ifstream in(params.front(), std::ios::binary);
  if (!in) throw InputError("cannot open coloring table " + params.front());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, int> load_color_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open coloring table " + path);
  std::map<std::string, int> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const auto gap = line.find_last_of(" \t", last);
    if (gap == std::string::npos || gap < first) {
      throw ParseError(path + ": expected `<key> <color>`", line_no, static_cast<int>(first) + 1);
    }
    const auto color_text = line.substr(gap + 1, last - gap);
    int color = -1;
    try {
      std::size_t used = 0;
      color = std::stoi(color_text, &used);
      if (used != color_text.size()) color = -1;
    } catch (const std::exception&) {
      color = -1;
    }
    if (color < 0) throw ParseError(path + ": bad color `" + color_text + "`", line_no, static_cast<int>(gap) + 2);
    const auto key_end = line.find_last_not_of(" \t", gap);
    const auto key = line.substr(first, key_end - first + 1);
    if (!out.emplace(key, color).second) {
      throw ParseError(path + ": key `" + key + "` repeats", line_no, static_cast<int>(first) + 1);
    }
  }
  return out;
}

CellColoring make_cell_coloring(const CellSpace& space, const ColoringSpec& spec) {
  if (spec.name == "constant") {
    const int c = parse_param(spec, false);
    return [c](CellId) { return c; };
  }
  if (spec.name == "level_parity") {
    no_params(spec);
    return [&space](CellId c) { return space.level(c) % 2; };
  }
  if (spec.name == "min_level_mod") {
    const int m = parse_param(spec, true);
    return [&space, m](CellId c) { return space.level(c) % m; };
  }
  if (spec.name == "table") {
    auto table = table_of(spec, [&](const std::string& key) {
      const auto cells = parse_min_set(space, key);
      if (cells.size() != 1) throw InputError("cell table keys must be single cells");
      return encode_min_set(space, cells);
    });
    return [&space, table](CellId c) { return lookup(table, to_string(space.cell(c))); };
  }
  unknown(spec, "cell");
}

SetColoring make_set_coloring(const CellSpace& space, const ColoringSpec& spec) {
  if (spec.name == "constant") {
    const int c = parse_param(spec, false);
    return [c](const MinSet&) { return c; };
  }
  if (spec.name == "size_mod") {
    const int m = parse_param(spec, true);
    return [m](const MinSet& u) { return static_cast<int>(u.size() % static_cast<std::size_t>(m)); };
  }
  if (spec.name == "level_parity" || spec.name == "min_level_mod") {
    const int m = spec.name == "level_parity" ? (no_params(spec), 2) : parse_param(spec, true);
    return [&space, m](const MinSet& u) {
      const auto t = set_minimum(space, u);
      if (!t) throw InputError("set coloring applied to a set without a minimum");
      return space.level(*t) % m;
    };
  }
  if (spec.name == "table") {
    auto table = table_of(spec, [&](const std::string& key) { return encode_min_set(space, parse_min_set(space, key)); });
    return [&space, table](const MinSet& u) { return lookup(table, encode_min_set(space, u)); };
  }
  unknown(spec, "set");
}

WordColoring make_word_coloring(const CellSpace& space, const ColoringSpec& spec) {
  if (spec.name == "constant") {
    const int c = parse_param(spec, false);
    return [c](const Word&) { return c; };
  }
  if (spec.name == "letter_count_mod") {
    const int m = parse_param(spec, true);
    return [m](const Word& w) { return count_letter_zero(w.symbols()) % m; };
  }
  if (spec.name == "table") {
    auto table = table_of(spec, [&](const std::string& key) { return encode_word(space, parse_word(space, key)); });
    return [&space, table](const Word& w) { return lookup(table, encode_word(space, w)); };
  }
  unknown(spec, "word");
}

std::string encode_subset(std::uint32_t mask) {
  std::string out;
  for (int i = 0; i < 32; ++i) {
    if (mask >> i & 1U) {
      if (!out.empty()) out += ',';
      out += std::to_string(i + 1);
    }
  }
  return out;
}

std::uint32_t parse_subset(int n, const std::string& text) {
  std::uint32_t mask = 0;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    int e = 0;
    try {
      std::size_t used = 0;
      e = std::stoi(item, &used);
      if (used != item.size()) e = 0;
    } catch (const std::exception&) {
      e = 0;
    }
    if (e < 1 || e > n) throw InputError("subset element `" + item + "` outside {1.." + std::to_string(n) + "}");
    if (mask >> (e - 1) & 1U) throw InputError("subset repeats element " + item);
    mask |= std::uint32_t{1} << (e - 1);
  }
  if (mask == 0) throw InputError("empty subset");
  return mask;
}

SubsetColoring make_subset_coloring(int n, const ColoringSpec& spec) {
  if (spec.name == "constant") {
    const int c = parse_param(spec, false);
    return [c](std::uint32_t) { return c; };
  }
  if (spec.name == "size_mod") {
    const int m = parse_param(spec, true);
    return [m](std::uint32_t mask) { return std::popcount(mask) % m; };
  }
  if (spec.name == "table") {
    auto table = table_of(spec, [n](const std::string& key) { return encode_subset(parse_subset(n, key)); });
    return [table](std::uint32_t mask) { return lookup(table, encode_subset(mask)); };
  }
  unknown(spec, "subset");
}

PointColoring make_point_coloring(int k, int n, const ColoringSpec& spec) {
  PointColoring out{k, n, 1, {}};
  const auto points = point_count(k, n);
  if (points > (std::uint64_t{1} << 24)) throw InputError("too many points to color");
  out.colors.resize(points);
  if (spec.name == "constant") {
    const int c = parse_param(spec, false);
    std::fill(out.colors.begin(), out.colors.end(), c);
  } else if (spec.name == "letter_count_mod") {
    const int m = parse_param(spec, true);
    for (std::uint64_t p = 0; p < points; ++p) {
      const auto letters = point_letters(k, n, p);
      out.colors[p] = static_cast<int>(std::count(letters.begin(), letters.end(), 0)) % m;
    }
  } else if (spec.name == "table") {
    auto table = table_of(spec, [k, n](const std::string& key) {
      auto w = parse_classic(k, key);
      if (static_cast<int>(w.size()) != n || std::count(w.begin(), w.end(), kVar) > 0) {
        throw InputError("point key must be a letter string of length " + std::to_string(n));
      }
      return encode_classic(w);
    });
    for (std::uint64_t p = 0; p < points; ++p) {
      out.colors[p] = lookup(table, encode_classic(point_letters(k, n, p)));
    }
  } else {
    unknown(spec, "point");
  }
  out.r = 1 + *std::max_element(out.colors.begin(), out.colors.end());
  return out;
}

}  // namespace hjt
