#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace degenlab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "DEGENLAB_OUTPUT_DIR";

/// Serializes with sorted keys, two-space indent and %.17g numbers. Non-finite
/// doubles become the strings "inf", "-inf" and "nan".
std::string dump_json(const Json& value);

/// A CSV table: header plus rows of preformatted cells.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::string> descriptions;  ///< one per column, written to COLUMNS.md
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

std::string format_number(double v);

/// Errors of a run configuration, one "path: message" line each. Empty when valid.
std::vector<std::string> validate_config(const Json& config);

/// The validated configuration with every default filled in.
Json normalize_config(const Json& config);

struct RunOutput {
  Json report;                   ///< the full report.json document
  std::optional<CsvTable> sweep; ///< sweep.csv
  int exit_code = 0;
};

/// Executes a validated configuration in memory. Computation failures are
/// captured in the report (status "error", exit code 1).
RunOutput execute(const Json& normalized_config);

/// Validates, executes and writes report.json, optional sweep.csv and COLUMNS.md,
/// and manifest.json into the output directory (the environment override wins over
/// output_dir). Returns the process exit code: 0 ok, 1 computation failure,
/// 2 schema violation (nothing written; one error per line on `err`).
/// When `echo_to` is set the written report.json (or sweep.csv with `echo_csv`) is
/// copied there as well.
int run(const Json& config, std::ostream& err, std::ostream* echo_to = nullptr, bool echo_csv = false);

/// One configurable key of a command, for building command-line flags.
struct FlagSpec {
  std::string section;  ///< params, example, solver, tolerances or options
  std::string key;
  std::string kind;     ///< int, number, extended, string, bool, number_list, int_list
  std::string help;
  bool required = false;
};

/// Keys a command reads, options first, then the shared sections in lookup order.
std::vector<FlagSpec> flag_specs(const std::string& command, const std::string& subcommand);

/// Subcommand names accepted in "command" and, for grouped commands, "subcommand".
const std::map<std::string, std::vector<std::string>>& command_table();

}  // namespace degenlab
