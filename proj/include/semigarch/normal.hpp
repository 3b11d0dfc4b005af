#ifndef SEMIGARCH_NORMAL_HPP
#define SEMIGARCH_NORMAL_HPP

namespace semigarch {

// Standard normal helpers built on fixed rational approximations
// (Cody's rational Chebyshev erf/erfc and Wichura's AS 241 quantile),
// so results are bit-identical across platforms and libm versions.

/// Error function, Cody (1969) rational approximation, |rel err| < 1e-15.
double erf_cody(double x);

/// Complementary error function, same source, scaled exp handling for
/// large arguments.
double erfc_cody(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal quantile, AS 241 (Wichura 1988), |abs err| < 1e-13
/// for t in (1e-300, 1 - 1e-16).  t=0 / t=1 map to -inf / +inf.
double normal_quantile(double t);

} // namespace semigarch

#endif
