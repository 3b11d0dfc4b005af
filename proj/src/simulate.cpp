#include "semigarch/simulate.hpp"

#include <stdexcept>

namespace semigarch {

ChainState zero_state(ModelOrder order) {
    ChainState s;
    s.y_lags.assign(static_cast<std::size_t>(order.p), 0.0);
    s.lambda_lags.assign(static_cast<std::size_t>(order.q), 0.0);
    return s;
}

void shift_state(ChainState& state, double stored_obs, double lambda) {
    for (std::size_t i = state.y_lags.size(); i-- > 1;) state.y_lags[i] = state.y_lags[i - 1];
    state.y_lags[0] = stored_obs;
    for (std::size_t j = state.lambda_lags.size(); j-- > 1;)
        state.lambda_lags[j] = state.lambda_lags[j - 1];
    state.lambda_lags[0] = lambda;
}

std::vector<PathPoint> simulate_path(const IntensitySpec& spec, const SeedFamily& family,
                                     long n, ChainState init, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("simulate_path: n must be >= 1");
    if (static_cast<int>(init.y_lags.size()) != spec.order().p ||
        static_cast<int>(init.lambda_lags.size()) != spec.order().q)
        throw std::invalid_argument("simulate_path: init state does not match the model order");

    std::vector<PathPoint> path;
    path.reserve(static_cast<std::size_t>(n));
    ChainState state = std::move(init);
    const bool garch = spec.mode() == ProcessMode::Garch;
    for (long t = 0; t < n; ++t) {
        const double lambda = spec.evaluate(state.y_lags, state.lambda_lags);
        const double y = family.sample(lambda, rng.next_uniform());
        shift_state(state, garch ? y * y : y, lambda);
        path.push_back({y, lambda});
    }
    return path;
}

ChainState stationary_draw(const IntensitySpec& spec, const SeedFamily& family,
                           long burn_in, RngStream& rng) {
    if (burn_in < 0) throw std::invalid_argument("stationary_draw: burn_in must be >= 0");
    ChainState state = zero_state(spec.order());
    const bool garch = spec.mode() == ProcessMode::Garch;
    for (long t = 0; t < burn_in; ++t) {
        const double lambda = spec.evaluate(state.y_lags, state.lambda_lags);
        const double y = family.sample(lambda, rng.next_uniform());
        shift_state(state, garch ? y * y : y, lambda);
    }
    return state;
}

long default_burn_in(ModelOrder order) { return 1000L * (order.p + order.q); }

} // namespace semigarch
