#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmp/generate.hpp"

namespace qmp {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,        // verification or self-test failure
  kExitBadInput = 2,      // malformed document or flags
  kExitNotPositive = 3,   // M(2) singular or not PSD
  kExitNumerical = 4,     // numerical failure, unsupported conic, generator budget
};

struct CommandFlags {
  std::optional<double> tol_rank;
  std::optional<double> tol_moment;
  std::optional<std::uint64_t> seed;
  /// Adds the case trace details and every intermediate matrix to the output.
  bool trace = false;
};

/// Machine output for stdout (or --out) and log lines for stderr.
struct CommandResult {
  int exit_code = kExitOk;
  std::string output;
  std::string log;
};

CommandResult cmd_solve(const std::string& input, const CommandFlags& flags = {});
CommandResult cmd_classify(const std::string& input, const CommandFlags& flags = {});
CommandResult cmd_normalize(const std::string& input, const CommandFlags& flags = {});
CommandResult cmd_reduce(const std::string& input, const CommandFlags& flags = {});
/// One document carrying both "beta" and "atoms" (solver output qualifies).
CommandResult cmd_verify(const std::string& input, const CommandFlags& flags = {});
/// Moments from one document, atoms from another.
CommandResult cmd_verify(const std::string& moments, const std::string& measure, const CommandFlags& flags);

struct GeneratedDocuments {
  int exit_code = kExitOk;
  std::vector<std::string> documents;  // one instance file each
  std::string log;
};

/// Instance files with the generating measure under "truth".
GeneratedDocuments cmd_gen(int count, std::uint64_t seed, const GeneratorOptions& opts = {});

/// Seed used when neither a flag nor the file gives one; QMP_SEED overrides the built-in 42.
std::uint64_t default_seed();

}  // namespace qmp
