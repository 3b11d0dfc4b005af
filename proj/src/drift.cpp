#include "semigarch/drift.hpp"

#include "semigarch/errors.hpp"
#include "semigarch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace semigarch {

double DriftConstants::lyapunov(const LyapunovPoint& x) const {
    if (static_cast<int>(x.y.size()) != p - 1 || static_cast<int>(x.lam.size()) != q)
        throw std::invalid_argument("lyapunov: point does not match the model order");
    double v = 0.0;
    for (int i = 1; i < p; ++i) v += a[i - 1] * x.y[i - 1];
    for (int j = 0; j < q; ++j) v += b[j] * x.lam[j];
    return v;
}

double DriftConstants::lyapunov(const ChainState& state) const {
    if (static_cast<int>(state.y_lags.size()) != p ||
        static_cast<int>(state.lambda_lags.size()) != q)
        throw std::invalid_argument("lyapunov: state does not match the model order");
    double v = 0.0;
    for (int i = 1; i < p; ++i) v += a[i - 1] * state.y_lags[i];
    for (int j = 0; j < q; ++j) v += b[j] * state.lambda_lags[j];
    return v;
}

double DriftConstants::coupled_level(const ChainState& sa, const ChainState& sb) const {
    return 0.5 * (lyapunov(sa) + lyapunov(sb));
}

LyapunovPoint DriftConstants::point_from_state(const ChainState& state) const {
    LyapunovPoint x;
    x.y.assign(state.y_lags.begin() + 1, state.y_lags.end());
    x.lam = state.lambda_lags;
    return x;
}

DriftConstants drift_constants(double abar0, std::span<const double> abar,
                               std::span<const double> bbar, const SeedFamily& family) {
    const int p = static_cast<int>(abar.size());
    const int q = static_cast<int>(bbar.size());
    if (p < 1 || q < 1)
        throw std::invalid_argument("drift_constants: need at least one coefficient per block");
    if (!(abar0 >= 0.0))
        throw std::invalid_argument("drift_constants: the constant term must be non-negative");
    for (double v : abar)
        if (!(v >= 0.0)) throw std::invalid_argument("drift_constants: negative observation coefficient");
    for (double v : bbar)
        if (!(v >= 0.0)) throw std::invalid_argument("drift_constants: negative intensity coefficient");

    const double m = family.mean_factor();
    if (m > 1.0 + 1e-12)
        throw std::invalid_argument(
            "drift_constants: the seed family has E(Y|lambda) > lambda; "
            "rescale the observation coefficients by the mean factor first");

    double abar_sum = 0.0, bbar_sum = 0.0;
    for (double v : abar) abar_sum += v;
    for (double v : bbar) bbar_sum += v;
    if (!(abar_sum + bbar_sum < 1.0)) {
        std::ostringstream msg;
        msg << "infeasible drift: coefficient sum " << abar_sum + bbar_sum << " >= 1";
        throw InfeasibleDriftError(msg.str());
    }

    DriftConstants drift;
    drift.p = p;
    drift.q = q;
    drift.a0 = abar0;
    drift.epsilon = (1.0 - abar_sum - bbar_sum) / 4.0;

    if (p >= 2) {
        drift.a.resize(p - 1);
        drift.a[0] = abar_sum - abar[0] + drift.epsilon;
        const double gamma = p > 2 ? drift.epsilon / (2.0 * (p - 2)) : 0.0;
        for (int i = 2; i <= p - 1; ++i)
            drift.a[i - 1] = drift.a[i - 2] - abar[i - 1] - gamma;
    }
    drift.b.resize(q);
    drift.b[0] = 1.0;
    if (q >= 2) {
        drift.b[1] = bbar_sum - bbar[0] + drift.epsilon;
        const double delta = q > 2 ? drift.epsilon / (2.0 * (q - 2)) : 0.0;
        for (int j = 2; j <= q - 1; ++j)
            drift.b[j] = drift.b[j - 1] - bbar[j - 1] - delta;
    }

    for (double v : drift.a)
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "drift construction failed: non-positive observation weight " << v;
            throw InfeasibleDriftError(msg.str());
        }
    for (double v : drift.b)
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "drift construction failed: non-positive intensity weight " << v;
            throw InfeasibleDriftError(msg.str());
        }

    // Strict inequalities whose largest lhs/rhs ratio is the tightest valid kappa.
    auto& ineq = drift.inequalities;
    {
        double lhs = abar[0] + bbar[0];
        if (p >= 2) lhs += drift.a[0];
        if (q >= 2) lhs += drift.b[1];
        ineq.push_back({"lag-1 combined", lhs, drift.b[0]});
    }
    for (int j = 2; j <= q - 1; ++j)
        ineq.push_back({"intensity lag " + std::to_string(j), bbar[j - 1] + drift.b[j],
                        drift.b[j - 1]});
    if (q >= 2)
        ineq.push_back({"intensity lag " + std::to_string(q), bbar[q - 1], drift.b[q - 1]});
    for (int i = 2; i <= p - 1; ++i)
        ineq.push_back({"observation lag " + std::to_string(i), abar[i - 1] + drift.a[i - 1],
                        drift.a[i - 2]});
    if (p >= 2)
        ineq.push_back({"observation lag " + std::to_string(p), abar[p - 1], drift.a[p - 2]});

    double kappa = 0.0;
    for (const InequalityCheck& c : ineq) {
        if (!c.strict()) {
            std::ostringstream msg;
            msg << "drift construction failed: inequality '" << c.label << "' not strict ("
                << c.lhs << " >= " << c.rhs << ")";
            throw InfeasibleDriftError(msg.str());
        }
        kappa = std::max(kappa, c.ratio());
    }
    drift.kappa = kappa;
    if (!(drift.kappa < 1.0))
        throw InfeasibleDriftError("drift construction failed: kappa >= 1");
    return drift;
}

DriftConstants drift_constants(const IntensitySpec& linear_spec, const SeedFamily& family) {
    if (linear_spec.form() != IntensityForm::Linear)
        throw std::invalid_argument("drift_constants: coefficient extraction needs a linear spec");
    return drift_constants(linear_spec.intercept(), linear_spec.obs_coeffs(),
                           linear_spec.intensity_coeffs(), family);
}

DriftProbeResult drift_mc_probe(const IntensitySpec& spec, const SeedFamily& family,
                                const DriftConstants& drift, const LyapunovPoint& x,
                                long transitions, RngStream& rng) {
    if (transitions < 2) throw std::invalid_argument("drift_mc_probe: need at least 2 transitions");
    const int p = drift.p;
    const int q = drift.q;
    const bool garch = spec.mode() == ProcessMode::Garch;

    std::vector<double> full_y(static_cast<std::size_t>(p));
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(transitions));
    for (long r = 0; r < transitions; ++r) {
        const double y_obs = family.sample(x.lam[0], rng.next_uniform());
        const double stored = garch ? y_obs * y_obs : y_obs;
        full_y[0] = stored;
        for (int i = 1; i < p; ++i) full_y[i] = x.y[i - 1];
        const double lambda_new = spec.evaluate(full_y, x.lam);
        double v_next = drift.b[0] * lambda_new;
        if (p >= 2) v_next += drift.a[0] * stored;
        for (int i = 2; i < p; ++i) v_next += drift.a[i - 1] * x.y[i - 2];
        for (int j = 1; j < q; ++j) v_next += drift.b[j] * x.lam[j - 1];
        values.push_back(v_next);
    }
    const MeanSe ms = mean_and_se(values);
    DriftProbeResult res;
    res.v_x = drift.lyapunov(x);
    res.mean_v_next = ms.mean;
    res.se = ms.se;
    res.bound = drift.kappa * res.v_x + drift.a0;
    res.ok = ms.mean <= res.bound + 3.0 * ms.se;
    return res;
}

AnalyticDriftCheck analytic_drift_check(const IntensitySpec& linear_spec,
                                        const SeedFamily& family,
                                        const DriftConstants& drift) {
    if (linear_spec.form() != IntensityForm::Linear)
        throw std::invalid_argument("analytic_drift_check: needs a linear spec");
    const int p = drift.p;
    const int q = drift.q;
    const std::vector<double>& abar = linear_spec.obs_coeffs();
    const std::vector<double>& bbar = linear_spec.intensity_coeffs();
    if (static_cast<int>(abar.size()) != p || static_cast<int>(bbar.size()) != q)
        throw std::invalid_argument("analytic_drift_check: order mismatch");
    const double m = family.mean_factor();

    // Coefficient of each state component in E(V(X_t) | X_{t-1}), against
    // kappa times its coefficient in V(X_{t-1}).
    AnalyticDriftCheck out;
    {
        double lhs = m * abar[0] + bbar[0];
        if (p >= 2) lhs += m * drift.a[0];
        if (q >= 2) lhs += drift.b[1];
        out.coefficients.push_back({"intensity lag 1", lhs, drift.kappa * drift.b[0]});
    }
    for (int j = 2; j <= q - 1; ++j)
        out.coefficients.push_back({"intensity lag " + std::to_string(j),
                                    bbar[j - 1] + drift.b[j], drift.kappa * drift.b[j - 1]});
    if (q >= 2)
        out.coefficients.push_back({"intensity lag " + std::to_string(q), bbar[q - 1],
                                    drift.kappa * drift.b[q - 1]});
    for (int i = 2; i <= p - 1; ++i)
        out.coefficients.push_back({"observation lag " + std::to_string(i),
                                    abar[i - 1] + drift.a[i - 1], drift.kappa * drift.a[i - 2]});
    if (p >= 2)
        out.coefficients.push_back({"observation lag " + std::to_string(p), abar[p - 1],
                                    drift.kappa * drift.a[p - 2]});

    out.ok = true;
    for (const InequalityCheck& c : out.coefficients)
        if (c.lhs > c.rhs + 1e-12) out.ok = false;
    return out;
}

} // namespace semigarch
