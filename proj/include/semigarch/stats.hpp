#ifndef SEMIGARCH_STATS_HPP
#define SEMIGARCH_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace semigarch {

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double point;  // plain successes/trials
    double center; // Wilson-adjusted midpoint
    double lo;
    double hi;
};

/// Interval at confidence given by z (z = 2.5758... for 99%).
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

/// One "Wilson standard error": half-width of the z=1 Wilson interval.
/// Stays meaningful for proportions at or near 0 and 1.
double wilson_se(std::int64_t successes, std::int64_t trials);

/// z for a two-sided 99% interval, from the project quantile function.
double z99();

/// Regularized lower/upper incomplete gamma P(a,x), Q(a,x)
/// (series + Lentz continued fraction).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double stat, double df);

/// Kolmogorov distribution tail Q(t) = 2 sum (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_sf(double t);

/// Goodness-of-fit p-value of observed counts against expected counts.
/// Trailing cells are pooled until every expected count is >= min_expected.
double chi_square_gof_pvalue(std::span<const double> observed,
                             std::span<const double> expected,
                             double min_expected = 5.0);

/// Two-sample chi-square homogeneity p-value over aligned count vectors.
double chi_square_two_sample_pvalue(std::span<const double> counts_a,
                                    std::span<const double> counts_b,
                                    double min_expected = 5.0);

/// One-sample Kolmogorov-Smirnov p-value; cdf_values must be the model CDF
/// evaluated at the (unsorted) sample points.
double ks_test_pvalue(std::vector<double> cdf_values);

/// Ordinary least squares y = intercept + slope * x with the usual
/// residual-based standard error of the slope.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Mean and standard error of the mean of a sample.
struct MeanSe {
    double mean;
    double se;
};
MeanSe mean_and_se(std::span<const double> values);

} // namespace semigarch

#endif
