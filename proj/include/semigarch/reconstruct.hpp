#ifndef SEMIGARCH_RECONSTRUCT_HPP
#define SEMIGARCH_RECONSTRUCT_HPP

#include "semigarch/intensity.hpp"

#include <span>

namespace semigarch {

/// Forward-iteration reconstruction of the hidden intensity from observed
/// values alone: the iteration is restarted from all-zero intensity lags and
/// driven by the true observations, so after k steps the reconstruction
/// error is bounded by the contraction weights applied to any prior bound
/// on the unknown initial intensities.
struct Reconstruction {
    double lambda_hat;
    double error_bound;
    int steps; // forward iterations applied
};

/// y_history is time-ordered oldest..newest and must hold at least p values
/// (length p gives one application of the map with zero intensity lags);
/// lambda_prior_bound holds q non-negative bounds on the absolute initial
/// intensities, newest first.
Reconstruction reconstruct_intensity(const IntensitySpec& spec,
                                     std::span<const double> y_history,
                                     std::span<const double> lambda_prior_bound);

/// Strictly increasing bounded map g(l) = offset + scale * (1 - exp(-l)),
/// the intensity feedback of the invertible-history model
/// f(y; l) = y/2 + g(l).  Requiring offset > 0, scale < 1/2 and
/// offset + scale <= 1/2 makes the observation recoverable from the next
/// intensity alone.
class SaturatingFeedback {
  public:
    explicit SaturatingFeedback(double offset = 0.2, double scale = 0.25);

    double operator()(double lambda) const;
    double inverse(double value) const;

    double offset() const { return offset_; }
    double scale() const { return scale_; }
    double range_lo() const { return offset_; }
    double range_hi() const { return offset_ + scale_; } // approached, not attained

  private:
    double offset_;
    double scale_;
};

/// The model f(y; l) = y/2 + g(l) as a custom spec with c_1 = scale.
IntensitySpec recovery_model_spec(const SaturatingFeedback& g);

struct RecoveredStep {
    double y_prev;      // integer-valued
    double lambda_prev;
};

/// Exact inversion of one transition of the recovery model: the lagged
/// observation is floor(2 l_t) and the lagged intensity is g^{-1} of the
/// remainder.  Throws if the remainder falls outside the range of g.
RecoveredStep counterexample_recover(const SaturatingFeedback& g, double lambda_t);

} // namespace semigarch

#endif
