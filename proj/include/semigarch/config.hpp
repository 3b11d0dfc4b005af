#ifndef SEMIGARCH_CONFIG_HPP
#define SEMIGARCH_CONFIG_HPP

#include "semigarch/intensity.hpp"
#include "semigarch/reconstruct.hpp"
#include "semigarch/seed_family.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace semigarch {

enum class ExperimentKind {
    Simulate,
    Couple,
    CoalescenceLemma,
    MixingRate,
    DriftCheck,
    Reconstruct,
    Counterexample,
};

std::string experiment_name(ExperimentKind kind);

enum class OutputFormat { Csv, Json };

/// Validated run configuration.  Parsed from a flat key=value file with
/// sectioned keys (model.*, family.*, experiment.*) plus CLI overrides;
/// every field is checked before any computation and all problems are
/// reported in one aggregated error.
struct RunConfig {
    // model.*
    ModelOrder order{1, 1};
    IntensityForm form = IntensityForm::Linear;
    ProcessMode mode = ProcessMode::Ingarch;
    double intercept = 1.0;
    std::vector<double> obs_coeffs{0.3};
    std::vector<double> intensity_coeffs{0.5};
    double lower = 0.0;
    double upper = 0.0;
    Regime inside;
    Regime outside;

    // family.*
    FamilyKind family_kind = FamilyKind::Poisson;
    double family_pi = 0.5;
    double family_omega = 1.0;
    std::vector<double> family_jumps{0.5, 0.5};

    // experiment.*
    ExperimentKind kind = ExperimentKind::Simulate;
    std::uint64_t seed = 1;
    long replicates = 1000;
    long horizon = 0;   // 0 = derive a default per command
    long burn_in = -1;  // -1 = default 1000 (p+q)
    int workers = 1;
    long steps = 1000;
    double lambda0 = 0.0;
    std::vector<long> n_grid{1, 4, 9, 16, 25, 36, 49, 64};
    std::vector<double> gap_grid{0.05, 0.1, 0.2, 0.5};
    double rho_target = 0.5;
    double recover_offset = 0.2;
    double recover_scale = 0.25;
    std::string out_prefix; // empty = the command name
    OutputFormat format = OutputFormat::Csv;

    IntensitySpec build_spec() const;
    SeedFamily build_family() const;
    SaturatingFeedback build_feedback() const;

    /// Canonical key=value view of every field (used for hashing and the
    /// summary echo).  Execution details (workers, out, format) are listed
    /// but excluded from the hash so they never affect data identity.
    std::map<std::string, std::string> to_key_values() const;
    std::string config_hash() const;
};

/// Parse a config file body.  Unknown keys, malformed values and violated
/// invariants are all collected and thrown as one ConfigError.
RunConfig parse_config(const std::string& text);

/// Apply key=value overrides (same keys as the file) on top of a config.
RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& overrides);

/// FNV-1a 64-bit over a string, fixed for all builds.
std::uint64_t fnv1a64(const std::string& text);

} // namespace semigarch

#endif
