#ifndef SEMIGARCH_DRIFT_HPP
#define SEMIGARCH_DRIFT_HPP

#include "semigarch/intensity.hpp"
#include "semigarch/rng.hpp"
#include "semigarch/seed_family.hpp"
#include "semigarch/simulate.hpp"

#include <span>
#include <string>
#include <vector>

namespace semigarch {

/// A point of the lag-state Markov chain the Lyapunov map acts on:
/// p-1 observation lags followed by q intensity lags, newest first.
struct LyapunovPoint {
    std::vector<double> y;   // p-1 entries
    std::vector<double> lam; // q entries
};

/// One strict inequality the construction must satisfy; ratio = lhs/rhs is
/// the contribution to kappa.
struct InequalityCheck {
    std::string label;
    double lhs;
    double rhs;
    bool strict() const { return lhs < rhs; }
    double ratio() const { return lhs / rhs; }
};

/// Constants of the linear Lyapunov map V(x) = sum a_i y_i + sum b_j l_j
/// with E(V(X_t) | X_{t-1}) <= kappa V(X_{t-1}) + a0.
struct DriftConstants {
    int p = 1;
    int q = 1;
    double a0 = 0.0;
    double kappa = 0.0;
    double epsilon = 0.0;
    std::vector<double> a; // a_1..a_{p-1}
    std::vector<double> b; // b_0..b_{q-1}, b[0] == 1
    std::vector<InequalityCheck> inequalities;

    double lyapunov(const LyapunovPoint& x) const;
    /// V evaluated on the embedded point of a lag state (drops the newest
    /// observation, keeps all intensities).
    double lyapunov(const ChainState& state) const;
    /// Coupled level W = (V(state_a) + V(state_b)) / 2.
    double coupled_level(const ChainState& a, const ChainState& b) const;

    LyapunovPoint point_from_state(const ChainState& state) const;
};

/// Builds drift constants from the coefficient bound
///   l_t <= abar0 + sum abar_i Y_{t-i} + sum bbar_j l_{t-j},
/// requiring sum abar + sum bbar < 1, with
///   epsilon = (1 - sum abar - sum bbar)/4,
///   a_1 = sum abar - abar_1 + epsilon, b_1 = sum bbar - bbar_1 + epsilon,
/// downward recursions spaced by epsilon/(2*(lags-2)), and kappa equal to
/// the largest coefficient ratio of the resulting strict inequalities.
///
/// The observation family must satisfy E(Y | l) <= l (squared observations
/// in GARCH mode); families with a mean factor above 1 are rejected with a
/// hint to rescale the observation coefficients.
DriftConstants drift_constants(double abar0, std::span<const double> abar,
                               std::span<const double> bbar, const SeedFamily& family);

/// Convenience: pull the coefficient bound out of a linear spec.
DriftConstants drift_constants(const IntensitySpec& linear_spec, const SeedFamily& family);

/// Monte Carlo verification of the drift inequality at one probe state:
/// sample mean of V(X_t) given X_{t-1} = x against kappa V(x) + a0.
struct DriftProbeResult {
    double v_x;
    double mean_v_next;
    double se;
    double bound; // kappa V(x) + a0
    bool ok;      // mean <= bound + 3 se
};

DriftProbeResult drift_mc_probe(const IntensitySpec& spec, const SeedFamily& family,
                                const DriftConstants& drift, const LyapunovPoint& x,
                                long transitions, RngStream& rng);

/// Exact coefficient-wise drift verification for linear specs, using the
/// family's observation-mean identity.  Returns per-coefficient margins
/// (bound minus achieved), all of which must be >= 0.
struct AnalyticDriftCheck {
    bool ok;
    std::vector<InequalityCheck> coefficients;
};

AnalyticDriftCheck analytic_drift_check(const IntensitySpec& linear_spec,
                                        const SeedFamily& family,
                                        const DriftConstants& drift);

} // namespace semigarch

#endif
