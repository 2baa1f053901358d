#pragma once

#include <json.hpp>
#include <string>

#include "ma/config.hpp"
#include "ma/nashmoser.hpp"
#include "ma/verify.hpp"

namespace ma {

/// Exit codes of the command line tool.
enum ExitCode { exit_ok = 0, exit_error = 1, exit_stalled = 2 };

nlohmann::json to_json(const VerificationReport& r, Mode mode);

/// Solve, verify and write the run artifacts into c.out_dir. Returns the exit code.
int solve_and_write(const RunConfig& c, nlohmann::json* report = nullptr);

/// Re-verify the run stored in dir; the result is also written to dir/verify.json.
nlohmann::json verify_saved(const std::string& dir);

int cli_main(int argc, char** argv);

}  // namespace ma
