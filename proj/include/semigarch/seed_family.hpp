#ifndef SEMIGARCH_SEED_FAMILY_HPP
#define SEMIGARCH_SEED_FAMILY_HPP

#include <string>
#include <vector>

namespace semigarch {

enum class Support { NonnegativeIntegers, Reals };

enum class FamilyKind {
    Poisson,
    GaussianZeroMean,
    ZeroInflatedPoisson,
    CompoundPoisson,
    GaussianWithFloor,
};

/// Constant delta with TV(Q(l), Q(l')) <= 1 - exp(-delta |l - l'|).
struct SimilarityConstant {
    double delta;
};

/// Overlap decomposition of a pair (Q(lambda), Q(lambda')).
///
/// overlap is the integral of the pointwise minimum of the two densities.
/// common_* carries the (unnormalized) CDF of that minimum, total mass
/// `overlap`; residual_a/residual_b carry the leftover densities of each
/// side, total mass 1 - overlap each.  Quantiles are generalized inverses
/// evaluated against the unnormalized masses, so a shared uniform u is used
/// as: u <= overlap -> common_quantile(u); else residual_*_quantile(u - overlap).
class SplitCdf {
  public:
    double overlap() const { return overlap_; }
    bool discrete() const { return discrete_; }

    double common_quantile(double u) const;
    double residual_a_quantile(double v) const;
    double residual_b_quantile(double v) const;

    double common_cdf(double x) const;
    double residual_a_cdf(double x) const;
    double residual_b_cdf(double x) const;

    // Discrete internals, exposed for the decomposition checks.
    const std::vector<double>& common_cum() const { return common_cum_; }
    const std::vector<double>& residual_a_cum() const { return res_a_cum_; }
    const std::vector<double>& residual_b_cum() const { return res_b_cum_; }

  private:
    friend class SeedFamily;

    double overlap_ = 1.0;
    bool discrete_ = true;
    bool identical_ = false;

    std::vector<double> common_cum_;
    std::vector<double> res_a_cum_;
    std::vector<double> res_b_cum_;

    // Continuous (zero-mean Gaussian) representation.
    double var_a_ = 0.0;
    double var_b_ = 0.0;
    double crossing_ = 0.0; // densities intersect at +-crossing_

    double gaussian_bisect(double target, double (SplitCdf::*cdf)(double) const) const;
};

/// Parametric observation family Q(lambda).
///
/// Discrete members live on the non-negative integers with pmf tables
/// truncated where the cumulative mass reaches 1 - 1e-12 (the residual is
/// folded into the last bucket of the CDF).  The Gaussian members are
/// zero-mean with variance lambda.
class SeedFamily {
  public:
    static SeedFamily poisson();
    static SeedFamily gaussian_zero_mean();
    static SeedFamily zero_inflated_poisson(double pi);
    static SeedFamily compound_poisson(std::vector<double> jump_pmf);
    static SeedFamily gaussian_with_floor(double omega);

    FamilyKind kind() const { return kind_; }
    Support support() const;
    bool is_discrete() const;
    std::string name() const;

    /// pmf value (discrete) or Lebesgue density (continuous).
    double density(double lambda, double y) const;

    /// Distribution function at y.
    double cdf(double lambda, double y) const;

    /// Generalized inverse: smallest support point whose CDF reaches t.
    double quantile(double lambda, double t) const;

    /// Inverse-transform draw; a pure function of (lambda, u).
    double sample(double lambda, double u) const { return quantile(lambda, u); }

    /// Overlap and split CDFs for the pair (Q(lambda), Q(lambda_prime)).
    SplitCdf tv_overlap(double lambda, double lambda_prime) const;

    SimilarityConstant similarity_delta() const;

    /// E(Y | lambda) / lambda for discrete members; for the Gaussian members
    /// this is E(Y^2 | lambda) / lambda = 1, the quantity entering the drift
    /// bound through the squared lags.
    double mean_factor() const;

    double zero_inflation() const { return pi_; }
    double floor_omega() const { return omega_; }
    const std::vector<double>& jump_pmf() const { return jump_pmf_; }

    /// Truncated pmf table for discrete members (index = support point).
    std::vector<double> pmf_table(double lambda) const;

  private:
    SeedFamily(FamilyKind kind) : kind_(kind) {}

    FamilyKind kind_;
    double pi_ = 0.0;
    double omega_ = 0.0;
    std::vector<double> jump_pmf_;

    SplitCdf gaussian_overlap(double var_a, double var_b) const;
};

} // namespace semigarch

#endif
