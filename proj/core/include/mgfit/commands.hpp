#pragma once

#include <iosfwd>

#include "mgfit/config.hpp"

namespace mgfit {

// Subcommand bodies behind the CLI; they throw ConfigError/DataError on
// validation failures and write progress to `log`. The CLI maps exceptions
// to exit codes (1 validation, 2 runtime).
void cmd_predict(const RunConfig& cfg, std::ostream& log);
void cmd_blackbox(const RunConfig& cfg, std::ostream& log);
void cmd_report(const RunConfig& cfg, std::ostream& log);

}  // namespace mgfit
