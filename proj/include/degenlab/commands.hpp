#pragma once

#include <optional>

#include "degenlab/report.hpp"

namespace degenlab {

struct CommandResult {
  Json result;
  std::optional<CsvTable> sweep;
};

/// Dispatches a normalized configuration to its subcommand. Throws on failure.
CommandResult run_command(const Json& normalized_config);

}  // namespace degenlab
