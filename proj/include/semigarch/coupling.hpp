#ifndef SEMIGARCH_COUPLING_HPP
#define SEMIGARCH_COUPLING_HPP

#include "semigarch/intensity.hpp"
#include "semigarch/rng.hpp"
#include "semigarch/seed_family.hpp"
#include "semigarch/simulate.hpp"

#include <cstdint>
#include <vector>

namespace semigarch {

/// One paired draw from (Q(lambda), Q(lambda_prime)) using a single shared
/// uniform: the hit branch inverts the common part on [0, overlap], the miss
/// branch inverts both residuals at u - overlap.
struct CoupleStepOutcome {
    double y;
    double y_prime;
    bool hit;
    double overlap; // the hit probability used for this draw
};

CoupleStepOutcome maximal_couple_draw(const SeedFamily& family, double lambda,
                                      double lambda_prime, double u);

/// Paired chain histories advanced by one shared uniform per step.
struct CoupledState {
    ChainState chain_a;
    ChainState chain_b;
    long t = 0;
    std::vector<std::uint8_t> hits; // per-step hit flags, step t at index t-1
    double gap = 0.0;               // sum_i |l-lag_a[i] - l-lag_b[i]|
    int consecutive_hits = 0;
    bool coalesced = false; // forced-identical regime (continuous families)

    bool states_identical() const {
        return chain_a.y_lags == chain_b.y_lags && chain_a.lambda_lags == chain_b.lambda_lags;
    }
};

CoupledState make_coupled(ChainState a, ChainState b);

struct CoupledStepRecord {
    double y;
    double y_prime;
    bool hit;
    double lambda;
    double lambda_prime;
    double gap;
};

/// Advances both chains by one step.  Intensities follow the model equation
/// on each chain's own lags; the shared uniform decides hit vs split.  For
/// continuous families, once p consecutive hits coincide with a gap below
/// 1e-12 the chains are locked together (exact coalescence is a measure-zero
/// event in floating point; the lock preserves the marginals since both
/// intensities agree to machine precision by then).
CoupledStepRecord coupled_step(CoupledState& state, const IntensitySpec& spec,
                               const SeedFamily& family, double u);

struct CoupledTrajectory {
    std::vector<CoupledStepRecord> steps;
    /// Smallest n >= 1 such that steps n..horizon all hit; -1 when the final
    /// step missed.
    long first_coalescence = -1;
};

CoupledTrajectory run_coupled(ChainState init_a, ChainState init_b,
                              const IntensitySpec& spec, const SeedFamily& family,
                              long horizon, RngStream& rng);

long first_coalescence_index(const std::vector<std::uint8_t>& hits);

} // namespace semigarch

#endif
