#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "report.hpp"
#include "run_config.hpp"

namespace kacm::cli {

struct RunOptions {
    /// Restrict to one operation (the subcommands); absent runs every task.
    std::optional<Operation> only;
    std::optional<std::string> task;
    std::optional<std::uint64_t> seed_override;
    /// Overrides mc.workers and the engine's tabulation workers.
    std::optional<int> workers;
    /// Progress lines go here when verbosity > 0.
    std::ostream* log = nullptr;
};

/// Applies the overrides to `cfg` (so the echoed configuration matches what
/// ran) and selects the tasks. Throws ConfigError when nothing is selected.
void apply_options(RunConfig& cfg, const RunOptions& opt);

/// Executes the selected tasks in declaration order. Numeric failures
/// become fail rows; the run continues.
Report execute(const RunConfig& cfg, const RunOptions& opt);

Row run_task(const RunConfig& cfg, const Task& task, int workers);

/// Worker count from KACM_WORKERS, or 1.
int default_workers();

}  // namespace kacm::cli
