#ifndef SEMIGARCH_INTENSITY_HPP
#define SEMIGARCH_INTENSITY_HPP

#include "semigarch/rng.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace semigarch {

struct ModelOrder {
    int p = 1; // observation lags
    int q = 1; // intensity lags
};

/// GARCH mode feeds squared observations into the map and treats the hidden
/// process as a conditional variance; INGARCH feeds levels.
enum class ProcessMode { Ingarch, Garch };

enum class IntensityForm { Linear, Threshold, Custom };

/// One branch of a threshold map: intercept + obs_coeff*y + intensity_coeff*l.
struct Regime {
    double intercept = 0.0;
    double obs_coeff = 0.0;
    double intensity_coeff = 0.0;
};

/// The intensity/volatility map l_t = f(y lags; l lags) together with its
/// declared contraction constants c_1..c_q in the intensity arguments.
class IntensitySpec {
  public:
    using CustomFn =
        std::function<double(std::span<const double>, std::span<const double>)>;

    static IntensitySpec linear(ModelOrder order, double intercept,
                                std::vector<double> obs_coeffs,
                                std::vector<double> intensity_coeffs,
                                ProcessMode mode = ProcessMode::Ingarch);

    /// Threshold map for p = q = 1: the inside regime applies when the lagged
    /// observation lies in [lower, upper].
    static IntensitySpec threshold(double lower, double upper, Regime inside,
                                   Regime outside,
                                   ProcessMode mode = ProcessMode::Ingarch);

    /// User-supplied map; the contraction constants are declared, never
    /// inferred, and are validated by semicontractive_probe.
    static IntensitySpec custom(ModelOrder order, CustomFn fn,
                                std::vector<double> contraction,
                                ProcessMode mode = ProcessMode::Ingarch);

    double evaluate(std::span<const double> y_lags,
                    std::span<const double> lambda_lags) const;

    ModelOrder order() const { return order_; }
    ProcessMode mode() const { return mode_; }
    IntensityForm form() const { return form_; }
    const std::vector<double>& contraction() const { return contraction_; }
    double contraction_total() const;

    // Linear accessors (valid when form() == Linear).
    double intercept() const { return intercept_; }
    const std::vector<double>& obs_coeffs() const { return obs_coeffs_; }
    const std::vector<double>& intensity_coeffs() const { return intensity_coeffs_; }

    // Threshold accessors (valid when form() == Threshold).
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    const Regime& inside() const { return inside_; }
    const Regime& outside() const { return outside_; }

  private:
    IntensitySpec() = default;

    ModelOrder order_;
    ProcessMode mode_ = ProcessMode::Ingarch;
    IntensityForm form_ = IntensityForm::Linear;
    std::vector<double> contraction_;

    double intercept_ = 0.0;
    std::vector<double> obs_coeffs_;
    std::vector<double> intensity_coeffs_;

    double lower_ = 0.0;
    double upper_ = 0.0;
    Regime inside_;
    Regime outside_;

    CustomFn custom_;
};

/// A randomly probed counterexample to the declared contraction constants.
struct ContractionWitness {
    std::vector<double> y_lags;
    std::vector<double> lambda_lags;
    std::vector<double> lambda_lags_prime;
    double lhs; // |f(y; l) - f(y; l')|
    double rhs; // sum c_i |l_i - l_i'|
};

struct ProbeResult {
    bool ok = true;
    std::optional<ContractionWitness> witness;
};

/// Samples random lag tuples and checks the declared contraction inequality;
/// a witness is a result, not an error.
ProbeResult semicontractive_probe(const IntensitySpec& spec, int probe_count,
                                  RngStream& rng);

} // namespace semigarch

#endif
