#include "semigarch/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace semigarch {

CoupleStepOutcome maximal_couple_draw(const SeedFamily& family, double lambda,
                                      double lambda_prime, double u) {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::domain_error("maximal_couple_draw: u outside [0,1]");
    if (lambda == lambda_prime) {
        const double y = family.quantile(lambda, u);
        return {y, y, true, 1.0};
    }
    const SplitCdf split = family.tv_overlap(lambda, lambda_prime);
    const double overlap = split.overlap();
    if (u <= overlap) {
        const double y = split.common_quantile(u);
        return {y, y, true, overlap};
    }
    const double v = u - overlap;
    return {split.residual_a_quantile(v), split.residual_b_quantile(v), false, overlap};
}

CoupledState make_coupled(ChainState a, ChainState b) {
    if (a.y_lags.size() != b.y_lags.size() || a.lambda_lags.size() != b.lambda_lags.size())
        throw std::invalid_argument("make_coupled: mismatched state shapes");
    CoupledState st;
    st.chain_a = std::move(a);
    st.chain_b = std::move(b);
    st.gap = 0.0;
    for (std::size_t j = 0; j < st.chain_a.lambda_lags.size(); ++j)
        st.gap += std::fabs(st.chain_a.lambda_lags[j] - st.chain_b.lambda_lags[j]);
    return st;
}

CoupledStepRecord coupled_step(CoupledState& state, const IntensitySpec& spec,
                               const SeedFamily& family, double u) {
    const bool garch = spec.mode() == ProcessMode::Garch;
    const double lambda = spec.evaluate(state.chain_a.y_lags, state.chain_a.lambda_lags);
    double lambda_prime;
    CoupleStepOutcome out{};
    if (state.coalesced) {
        lambda_prime = lambda;
        const double y = family.quantile(lambda, u);
        out = {y, y, true, 1.0};
    } else {
        lambda_prime = spec.evaluate(state.chain_b.y_lags, state.chain_b.lambda_lags);
        out = maximal_couple_draw(family, lambda, lambda_prime, u);
    }

    shift_state(state.chain_a, garch ? out.y * out.y : out.y, lambda);
    shift_state(state.chain_b, garch ? out.y_prime * out.y_prime : out.y_prime, lambda_prime);

    state.gap = 0.0;
    for (std::size_t j = 0; j < state.chain_a.lambda_lags.size(); ++j)
        state.gap += std::fabs(state.chain_a.lambda_lags[j] - state.chain_b.lambda_lags[j]);

    state.consecutive_hits = out.hit ? state.consecutive_hits + 1 : 0;
    state.t += 1;
    state.hits.push_back(out.hit ? 1 : 0);

    if (!state.coalesced && !family.is_discrete() &&
        state.consecutive_hits >= spec.order().p && state.gap < 1e-12) {
        state.coalesced = true;
        state.chain_b = state.chain_a;
        state.gap = 0.0;
    }

    return {out.y, out.y_prime, out.hit, lambda, lambda_prime, state.gap};
}

long first_coalescence_index(const std::vector<std::uint8_t>& hits) {
    if (hits.empty() || !hits.back()) return -1;
    long n = static_cast<long>(hits.size());
    while (n >= 2 && hits[static_cast<std::size_t>(n - 2)]) --n;
    return n;
}

CoupledTrajectory run_coupled(ChainState init_a, ChainState init_b,
                              const IntensitySpec& spec, const SeedFamily& family,
                              long horizon, RngStream& rng) {
    if (horizon < 1) throw std::invalid_argument("run_coupled: horizon must be >= 1");
    CoupledState state = make_coupled(std::move(init_a), std::move(init_b));
    CoupledTrajectory traj;
    traj.steps.reserve(static_cast<std::size_t>(horizon));
    for (long t = 1; t <= horizon; ++t)
        traj.steps.push_back(coupled_step(state, spec, family, rng.next_uniform()));
    traj.first_coalescence = first_coalescence_index(state.hits);
    return traj;
}

} // namespace semigarch
