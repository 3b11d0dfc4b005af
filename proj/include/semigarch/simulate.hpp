#ifndef SEMIGARCH_SIMULATE_HPP
#define SEMIGARCH_SIMULATE_HPP

#include "semigarch/intensity.hpp"
#include "semigarch/rng.hpp"
#include "semigarch/seed_family.hpp"

#include <vector>

namespace semigarch {

/// Lag windows feeding the intensity map, newest first.  In GARCH mode the
/// stored observation lags are the squared draws, so one evaluation path
/// serves both model classes.
struct ChainState {
    std::vector<double> y_lags;      // p entries
    std::vector<double> lambda_lags; // q entries

    bool operator==(const ChainState&) const = default;
};

ChainState zero_state(ModelOrder order);

/// Push a new step into the windows.
void shift_state(ChainState& state, double stored_obs, double lambda);

struct PathPoint {
    double y;
    double lambda;
};

/// Iterates the model equations by inverse transform on the stream.
/// The returned y is the raw observation (no squaring in GARCH mode).
std::vector<PathPoint> simulate_path(const IntensitySpec& spec, const SeedFamily& family,
                                     long n, ChainState init, RngStream& rng);

/// Approximate draw from the stationary law: burn_in steps from the zero state.
ChainState stationary_draw(const IntensitySpec& spec, const SeedFamily& family,
                           long burn_in, RngStream& rng);

/// Default burn-in used when a config does not pin one.
long default_burn_in(ModelOrder order);

} // namespace semigarch

#endif
