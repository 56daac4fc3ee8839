#pragma once

#include <string>
#include <vector>

#include "cantordyn/textio.hpp"

namespace cantordyn {

// Exit codes shared by the CLI and the in-process driver.
inline constexpr int kExitEstablished = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitRefuted = 3;
inline constexpr int kExitInconclusive = 4;

struct RunResult {
  int exit_code = kExitUsage;
  std::string out;  // stdout text
  std::string err;  // stderr text
};

// Builds the action named by --builtin or described by --action <file>.
// Accepts parameterized builtin names, e.g. "free_boundary(2)",
// "bit_permutation(0>1,1>0)", "product_with_trivial(f2_boundary,full_shift(2))".
ActionPtr resolve_action(const std::string& builtin, const std::string& action_file);

// Runs one CLI command in-process. args excludes the program name,
// e.g. {"check-paradoxical", "--builtin", "f2_boundary", "--set", "[a]"}.
// Deterministic: no timestamps, no environment reads.
RunResult run_command(const std::vector<std::string>& args);

// Replays a certificate (or a report of embedded certificates) through the
// exact verifiers only; never searches. Returns kExitEstablished when every
// claim replays, kExitRefuted otherwise, kExitInputError on malformed input.
RunResult verify_certificate_text(const std::string& text);

int cli_main(int argc, char** argv);

}  // namespace cantordyn
