#pragma once

// Command-line front end: bracket, simulate, verify, parse-check.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 numeric failure.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdw/model_file.hpp"

namespace hdw {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

// "u1=1, p1_1=0.5" -> binding; throws SchemaError on malformed input.
Binding parse_point(const std::string& text);

int cmd_bracket(const ModelFile& mf, const std::vector<std::string>& current_names,
                const std::vector<Binding>& extra_points, std::ostream& out);
int cmd_simulate(const ModelFile& mf, const std::string& out_dir, std::ostream& out);
int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed, int levels,
               const std::string& out_dir, bool json, std::ostream& out);
int cmd_parse_check_expr(const std::string& text, std::ostream& out);
int cmd_parse_check_model(const ModelFile& mf, std::ostream& out);

// Full-precision CSV cell.
std::string format_number(double v);

// Parses arguments and dispatches; errors go to `err` and map to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace hdw
