#ifndef SEMIGARCH_EXPERIMENTS_HPP
#define SEMIGARCH_EXPERIMENTS_HPP

#include "semigarch/config.hpp"
#include "semigarch/mixing.hpp"

#include <iosfwd>
#include <string>

namespace semigarch {

/// Exit codes of run_command (and of the CLI).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariantViolation = 1;
inline constexpr int kExitConfigError = 2;

struct CommandResult {
    int exit_code = kExitOk;
    std::string data_path;    // CSV (or combined JSON in json format)
    std::string summary_path; // JSON summary; empty in json format
    std::string message;      // one-line outcome description
};

/// Dispatches the experiment described by the config, writing the data file
/// and a JSON summary next to it.  Configuration problems surface as exit
/// code 2, violated invariants as exit code 1; log output goes to `log`.
CommandResult run_command(const RunConfig& config, std::ostream& log);

/// Replicate results merge by index, so any worker count gives identical
/// bytes.  Exposed for tests.
std::string format_csv_double(double v);

/// Serialized forms of the mixing-lab result records, matching the JSON
/// summary schemas the commands emit.
std::string trial_schedule_json(const TrialSchedule& schedule);
std::string mixing_estimate_json(const MixingEstimate& estimate);

} // namespace semigarch

#endif
