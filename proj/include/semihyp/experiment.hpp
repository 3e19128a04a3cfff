#pragma once

// Command implementations behind the semihyp CLI. Each command validates
// its config before computing, writes its results plus manifest.json into
// the output directory and returns the process exit code.

#include "semihyp/error.hpp"
#include "semihyp/io.hpp"

#include <cstdint>
#include <string>

namespace semihyp {

enum ExitCode : int { kExitPass = 0, kExitNumeric = 1, kExitAmbiguous = 2, kExitConfig = 3 };

struct RunContext {
  std::string command;
  std::string out_dir = ".";
  std::string format = "csv";  // csv or json
  std::uint64_t seed = 1;
  int jobs = 1;
  json config = json::object();
};

/// Maps an error kind onto the exit-code contract.
int exit_code_for(ErrorKind kind);

int cmd_classify(const std::string& matrix_file, const RunContext& ctx);
int cmd_contract(const RunContext& ctx);
int cmd_ladder(const RunContext& ctx);
int cmd_geodesic(const RunContext& ctx);
int cmd_positivity(const RunContext& ctx);

/// Runs `body`, converting thrown errors into exit codes with a message on stderr.
int run_guarded(const std::string& command, int (*body)(const RunContext&), const RunContext& ctx);

}  // namespace semihyp
