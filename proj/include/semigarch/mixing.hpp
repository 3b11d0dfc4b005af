#ifndef SEMIGARCH_MIXING_HPP
#define SEMIGARCH_MIXING_HPP

#include "semigarch/drift.hpp"
#include "semigarch/intensity.hpp"
#include "semigarch/rng.hpp"
#include "semigarch/seed_family.hpp"
#include "semigarch/simulate.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace semigarch {

/// Lower bound exp(-delta * gap / (1 - c)) on the probability that two
/// coupled chains, already aligned on their last p-1 observations, produce
/// identical observations at every later time.
double coalescence_bound(double delta, double c_total, double gap);

/// eta = 2/(1+kappa) and the return level (2 a0 + 2)/(1 - kappa) used by the
/// stopping-time bounds.
struct StoppingConstants {
    double eta;
    double level;
};
StoppingConstants stopping_constants(const DriftConstants& drift);

// ---------------------------------------------------------------------------
// Coalescence-bound verification
// ---------------------------------------------------------------------------

struct CoalescenceGridPoint {
    double target_gap;   // requested initial gap K
    double realized_gap; // largest gap actually realized across replicates (<= K)
    double bound;        // exp(-delta K / (1-c))
    double empirical;    // fraction of runs where every step hit
    double se;           // one Wilson standard error
    long replicates = 0;
    long successes = 0;
    bool frequency_ok = false; // empirical >= bound - 3 se
    double max_gap_sum = 0.0;  // largest intensity-gap sum over successful runs
    bool gap_sum_ok = true;    // every successful run stayed within realized/(1-c)
};

struct CoalescenceReport {
    double delta;
    double c_total;
    std::vector<CoalescenceGridPoint> points;
    bool all_ok() const;
};

/// For each grid gap K: draws a stationary state, offsets the newest
/// intensity lag so the conditional initial gap is at most K while the
/// observation lags agree (the aligned-history precondition), then runs
/// coupled continuations and checks the conditional coalescence bound and
/// the gap-sum ceiling.
CoalescenceReport verify_coalescence_lemma(const IntensitySpec& spec,
                                           const SeedFamily& family,
                                           std::span<const double> gap_grid,
                                           long replicates, long horizon,
                                           const RngStream& base, int workers = 1,
                                           long burn_in = -1);

// ---------------------------------------------------------------------------
// Trial schedules with retarded return times
// ---------------------------------------------------------------------------

struct TrialSchedule {
    double level = 0.0;      // return level for W
    long trial_length = 0;   // time points per trial
    double gap_target = 0.0; // end-of-trial intensity gap threshold
    std::vector<long> taus;  // trial start times (return times of W)
    std::vector<std::uint8_t> success;  // favorable end state reached
    std::vector<std::uint8_t> all_hits; // every step of the trial window hit
    bool truncated = false;  // horizon ran out before the last trial finished
};

/// Runs the coupled chain, detecting the first return of
/// W_t = (V(state_a)+V(state_b))/2 below the level and afterwards returns
/// retarded by the trial length; each trial is scored by the aligned-tail /
/// end-gap criterion.
TrialSchedule run_trial_schedule(const IntensitySpec& spec, const SeedFamily& family,
                                 const DriftConstants& drift, long trial_length,
                                 double gap_target, long horizon, RngStream& rng,
                                 std::optional<std::pair<ChainState, ChainState>> init =
                                     std::nullopt,
                                 long burn_in = -1);

/// Trial length making c^(length - p + 1) * level <= rho_target^sqrt(n);
/// computed from the inputs, never hard-coded.
long default_trial_length(long n, double rho_target, double c_total, double level, int p);

// ---------------------------------------------------------------------------
// Mixing-coefficient estimation
// ---------------------------------------------------------------------------

struct MixingEstimate {
    std::vector<long> n_grid;
    std::vector<double> beta_hat;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    long replicates = 0;
    long horizon = 0;
    /// Truncation-bias proxy: fraction of replicates whose last discrepancy
    /// fell in the upper half of (max n, horizon].  The finite horizon can
    /// only underestimate the tail, never inflate it.
    double tail_discrepancy_rate = 0.0;
};

/// Starts both chains from independent approximate stationary draws and
/// estimates, per n, the probability that the coupled observations still
/// disagree somewhere at or after time n (truncated at the horizon).
MixingEstimate estimate_beta(const IntensitySpec& spec, const SeedFamily& family,
                             std::span<const long> n_grid, long replicates, long horizon,
                             long burn_in, const RngStream& base, int workers = 1);

struct SubgeometricFit {
    double scale = 0.0; // beta_n ~ scale * rho^sqrt(n)
    double rho = 0.0;
    double slope = 0.0; // log rho
    double slope_se = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;
    // Comparison fit against the plain geometric model rho'^n.
    double rho_geometric = 0.0;
    double r_squared_geometric = 0.0;
    long points_used = 0;
};

/// Least squares of log beta_hat on sqrt(n) over the positive estimates;
/// throws InsufficientDataError with fewer than 3 of them.
SubgeometricFit fit_subgeometric_rate(const MixingEstimate& estimate);

// ---------------------------------------------------------------------------
// Stopping-time return bound
// ---------------------------------------------------------------------------

struct StoppingTimeCheck {
    double w0 = 0.0;
    double eta = 0.0;
    double level = 0.0;
    double mean = 0.0; // Monte Carlo mean of eta^{tau_1}
    double se = 0.0;
    long replicates = 0;
    long truncated = 0; // runs that never returned within the cap (counted at the cap)
    bool ok = false;    // mean <= w0 + 3 se
};

/// Starts the coupled pair at W_0 = w0 (both chains at the same intensity
/// level) and measures eta^{tau_1} for the first return of W below the level.
StoppingTimeCheck verify_stopping_return(const IntensitySpec& spec,
                                         const SeedFamily& family,
                                         const DriftConstants& drift, double w0,
                                         long replicates, long horizon_cap,
                                         const RngStream& base, int workers = 1);

} // namespace semigarch

#endif
