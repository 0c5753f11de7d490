#pragma once

// Command line configuration, dispatch and certificate validation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hjt/certificate.hpp"
#include "hjt/tree.hpp"

namespace hjt {

struct RunConfig {
  std::string command;  // hj, lines, folkman, tree-hj, hl, disjoint-union, counterexample, validate
  std::string tree_path;
  std::optional<VectorTree> tree;
  int alphabet = 2;
  std::vector<std::string> coloring;
  int k = 0;
  int r = 2;
  int n = 0;
  int nmax = 0;
  int colors = 0;  // folkman number mode when positive
  int q = 1;
  int m = 1;
  int depth = 0;
  int ell = 0;
  int length = 0;
  int subtree_height = 2;
  std::uint64_t cap = std::uint64_t{1} << 22;
  std::string out;
  int workers = 1;
  std::string cert_path;
};

/// Arguments after the program name. Throws InputError with the offending
/// token, or ParseError for malformed files.
RunConfig parse_config(const std::vector<std::string>& args);

/// The command line that reproduces the run, without --workers and --out.
std::string canonical_echo(const RunConfig& config);
std::string config_hash(const RunConfig& config);

struct RunResult {
  Certificate cert;
  int exit_code = 1;
};

RunResult run(const RunConfig& config);

/// Null when the payload of `cert` passes the independent checker for the
/// run described by `config`.
std::optional<std::string> check_payload(const RunConfig& config, const Certificate& cert);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> lines;
};

/// Hash check, byte comparison against a fresh run, and payload check.
ValidationReport validate_certificate(const std::string& text, int workers);

/// Full CLI behaviour: prints to stdout/stderr and returns the exit status.
int run_cli(const std::vector<std::string>& args);

}  // namespace hjt
