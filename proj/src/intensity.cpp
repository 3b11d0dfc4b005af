#include "semigarch/intensity.hpp"

#include "semigarch/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace semigarch {

namespace {

void check_order(ModelOrder order) {
    if (order.p < 1 || order.q < 1)
        throw std::invalid_argument("model order: p and q must both be >= 1");
}

void check_contraction(const std::vector<double>& c) {
    double total = 0.0;
    for (double v : c) {
        if (!(v >= 0.0)) throw std::invalid_argument("contraction constants must be non-negative");
        total += v;
    }
    if (!(total < 1.0))
        throw std::invalid_argument("contraction constants must satisfy c_1 + ... + c_q < 1");
}

} // namespace

IntensitySpec IntensitySpec::linear(ModelOrder order, double intercept,
                                    std::vector<double> obs_coeffs,
                                    std::vector<double> intensity_coeffs,
                                    ProcessMode mode) {
    check_order(order);
    if (static_cast<int>(obs_coeffs.size()) != order.p)
        throw std::invalid_argument("linear intensity: need exactly p observation coefficients");
    if (static_cast<int>(intensity_coeffs.size()) != order.q)
        throw std::invalid_argument("linear intensity: need exactly q intensity coefficients");
    if (!(intercept >= 0.0))
        throw std::invalid_argument("linear intensity: intercept must be non-negative");
    for (double v : obs_coeffs)
        if (!(v >= 0.0))
            throw std::invalid_argument("linear intensity: coefficients must be non-negative");
    check_contraction(intensity_coeffs);

    IntensitySpec spec;
    spec.order_ = order;
    spec.mode_ = mode;
    spec.form_ = IntensityForm::Linear;
    spec.intercept_ = intercept;
    spec.obs_coeffs_ = std::move(obs_coeffs);
    spec.intensity_coeffs_ = spec.contraction_ = std::move(intensity_coeffs);
    return spec;
}

IntensitySpec IntensitySpec::threshold(double lower, double upper, Regime inside,
                                       Regime outside, ProcessMode mode) {
    if (!(lower <= upper)) throw std::invalid_argument("threshold intensity: lower > upper");
    for (const Regime& r : {inside, outside}) {
        if (!(r.intercept >= 0.0 && r.obs_coeff >= 0.0 && r.intensity_coeff >= 0.0))
            throw std::invalid_argument("threshold intensity: regime coefficients must be non-negative");
    }
    const double c1 = std::max(inside.intensity_coeff, outside.intensity_coeff);
    if (!(c1 < 1.0))
        throw std::invalid_argument("threshold intensity: max regime intensity coefficient must be < 1");

    IntensitySpec spec;
    spec.order_ = ModelOrder{1, 1};
    spec.mode_ = mode;
    spec.form_ = IntensityForm::Threshold;
    spec.lower_ = lower;
    spec.upper_ = upper;
    spec.inside_ = inside;
    spec.outside_ = outside;
    spec.contraction_ = {c1};
    return spec;
}

IntensitySpec IntensitySpec::custom(ModelOrder order, CustomFn fn,
                                    std::vector<double> contraction, ProcessMode mode) {
    check_order(order);
    if (!fn) throw std::invalid_argument("custom intensity: callable must be non-empty");
    if (static_cast<int>(contraction.size()) != order.q)
        throw std::invalid_argument("custom intensity: need exactly q contraction constants");
    check_contraction(contraction);

    IntensitySpec spec;
    spec.order_ = order;
    spec.mode_ = mode;
    spec.form_ = IntensityForm::Custom;
    spec.custom_ = std::move(fn);
    spec.contraction_ = std::move(contraction);
    return spec;
}

double IntensitySpec::contraction_total() const {
    double total = 0.0;
    for (double v : contraction_) total += v;
    return total;
}

double IntensitySpec::evaluate(std::span<const double> y_lags,
                               std::span<const double> lambda_lags) const {
    if (static_cast<int>(y_lags.size()) != order_.p ||
        static_cast<int>(lambda_lags.size()) != order_.q)
        throw std::invalid_argument("intensity evaluation: lag lengths do not match the model order");
    for (double l : lambda_lags)
        if (!(l >= 0.0))
            throw std::invalid_argument("intensity evaluation: intensity lags must be non-negative");

    double value = 0.0;
    switch (form_) {
        case IntensityForm::Linear: {
            value = intercept_;
            for (int i = 0; i < order_.p; ++i) value += obs_coeffs_[i] * y_lags[i];
            for (int j = 0; j < order_.q; ++j) value += intensity_coeffs_[j] * lambda_lags[j];
            break;
        }
        case IntensityForm::Threshold: {
            const double y = y_lags[0];
            const Regime& r = (y >= lower_ && y <= upper_) ? inside_ : outside_;
            value = r.intercept + r.obs_coeff * y + r.intensity_coeff * lambda_lags[0];
            break;
        }
        case IntensityForm::Custom: {
            value = custom_(y_lags, lambda_lags);
            if (!(value >= 0.0))
                throw ContractViolation("custom intensity returned a negative value");
            break;
        }
    }
    return value;
}

ProbeResult semicontractive_probe(const IntensitySpec& spec, int probe_count,
                                  RngStream& rng) {
    if (probe_count < 1) throw std::invalid_argument("semicontractive_probe: probe count must be >= 1");
    const int p = spec.order().p;
    const int q = spec.order().q;
    const std::vector<double>& c = spec.contraction();

    std::vector<double> y(p), la(q), lb(q);
    for (int n = 0; n < probe_count; ++n) {
        // Exponential magnitudes over several decades keep both the small-gap
        // and the large-gap regions covered.
        const double scale = std::exp(6.0 * rng.next_uniform() - 3.0);
        for (int i = 0; i < p; ++i) y[i] = -std::log(rng.next_uniform()) * scale;
        for (int j = 0; j < q; ++j) {
            la[j] = -std::log(rng.next_uniform()) * scale;
            lb[j] = -std::log(rng.next_uniform()) * scale;
        }
        const double lhs = std::fabs(spec.evaluate(y, la) - spec.evaluate(y, lb));
        double rhs = 0.0;
        for (int j = 0; j < q; ++j) rhs += c[j] * std::fabs(la[j] - lb[j]);
        if (lhs > rhs + 1e-9 * (1.0 + rhs))
            return {false, ContractionWitness{y, la, lb, lhs, rhs}};
    }
    return {true, std::nullopt};
}

} // namespace semigarch
