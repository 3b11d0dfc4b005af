#include "semigarch/reconstruct.hpp"

#include "semigarch/contraction.hpp"
#include "semigarch/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace semigarch {

Reconstruction reconstruct_intensity(const IntensitySpec& spec,
                                     std::span<const double> y_history,
                                     std::span<const double> lambda_prior_bound) {
    const int p = spec.order().p;
    const int q = spec.order().q;
    if (static_cast<int>(y_history.size()) < p)
        throw std::invalid_argument("reconstruct_intensity: need at least p observations");
    if (static_cast<int>(lambda_prior_bound.size()) != q)
        throw std::invalid_argument("reconstruct_intensity: need q prior bounds");
    for (double v : lambda_prior_bound)
        if (!(v >= 0.0))
            throw std::invalid_argument("reconstruct_intensity: prior bounds must be non-negative");

    const int steps = static_cast<int>(y_history.size()) - p + 1;
    std::vector<double> lam(static_cast<std::size_t>(q), 0.0);
    std::vector<double> y_lags(static_cast<std::size_t>(p));
    double lambda_hat = 0.0;
    for (int s = 1; s <= steps; ++s) {
        // Newest-first window ending at history index s+p-2.
        for (int i = 0; i < p; ++i) y_lags[i] = y_history[s + p - 2 - i];
        lambda_hat = spec.evaluate(y_lags, lam);
        for (int j = q - 1; j >= 1; --j) lam[j] = lam[j - 1];
        lam[0] = lambda_hat;
    }

    const ContractionTable table = contraction_coeffs(spec.contraction(), steps + 1);
    double bound = 0.0;
    for (int i = 1; i <= q; ++i) bound += table.coeff(steps + 1, i) * lambda_prior_bound[i - 1];
    return {lambda_hat, bound, steps};
}

SaturatingFeedback::SaturatingFeedback(double offset, double scale)
    : offset_(offset), scale_(scale) {
    if (!(offset > 0.0)) throw std::invalid_argument("saturating feedback: offset must be positive");
    if (!(scale > 0.0 && scale < 0.5))
        throw std::invalid_argument("saturating feedback: scale must lie in (0, 1/2)");
    if (!(offset + scale <= 0.5))
        throw std::invalid_argument("saturating feedback: range must stay below 1/2");
}

double SaturatingFeedback::operator()(double lambda) const {
    if (!(lambda >= 0.0)) throw std::domain_error("saturating feedback: negative intensity");
    return offset_ + scale_ * (1.0 - std::exp(-lambda));
}

double SaturatingFeedback::inverse(double value) const {
    const double frac = (value - offset_) / scale_;
    if (!(frac >= 0.0 && frac < 1.0))
        throw std::domain_error("saturating feedback: value outside the range of the map");
    return -std::log1p(-frac);
}

IntensitySpec recovery_model_spec(const SaturatingFeedback& g) {
    return IntensitySpec::custom(
        ModelOrder{1, 1},
        [g](std::span<const double> y, std::span<const double> lam) {
            return 0.5 * y[0] + g(lam[0]);
        },
        {g.scale()});
}

RecoveredStep counterexample_recover(const SaturatingFeedback& g, double lambda_t) {
    if (!(lambda_t >= 0.0))
        throw std::domain_error("counterexample_recover: negative intensity");
    const double y_prev = std::floor(2.0 * lambda_t);
    double remainder = lambda_t - 0.5 * y_prev;
    // The remainder equals g(previous intensity) up to one rounding of the
    // forward addition; snap to the lower edge before validating the band.
    if (remainder < g.range_lo() && remainder > g.range_lo() - 1e-9)
        remainder = g.range_lo();
    if (!(remainder >= g.range_lo() && remainder < g.range_hi()))
        throw std::domain_error("counterexample_recover: input not generated by the recovery model");
    return {y_prev, g.inverse(remainder)};
}

} // namespace semigarch
