#pragma once

// Line-oriented search certificates.
//
//   BEGIN CERT
//   command <canonical command line>
//   config-hash <16 hex digits>
//   outcome WITNESS | EXHAUSTED | UNRESOLVED
//   validated yes | no
//   stat <name> <value>        (any number)
//   note <text>                (any number)
//   BEGIN PAYLOAD
//   <payload lines>
//   END PAYLOAD
//   END CERT

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hjt {

enum class Outcome { Witness, Exhausted, Unresolved };

std::string to_string(Outcome o);
Outcome parse_outcome(std::string_view text);

struct Certificate {
  std::string command;
  std::string config_hash;
  Outcome outcome = Outcome::Exhausted;
  bool validated = false;
  std::vector<std::pair<std::string, std::string>> stats;
  std::vector<std::string> notes;
  std::vector<std::string> payload;

  void stat(std::string name, std::uint64_t value) { stats.emplace_back(std::move(name), std::to_string(value)); }

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

std::string serialize_certificate(const Certificate& cert);
/// Throws ParseError naming the line of the first violation.
Certificate parse_certificate(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace hjt
