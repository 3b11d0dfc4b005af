#include "semigarch/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace semigarch {

namespace {

// Cody, "Rational Chebyshev approximation for the error function",
// Math. Comp. 23 (1969).  Coefficient sets as in the netlib CALERF code.
constexpr double kErfA[5] = {
    3.16112374387056560e+00, 1.13864154151050156e+02, 3.77485237685302021e+02,
    3.20937758913846947e+03, 1.85777706184603153e-01};
constexpr double kErfB[4] = {
    2.36012909523441209e+01, 2.44024637934444173e+02, 1.28261652607737228e+03,
    2.84423683343917062e+03};
constexpr double kErfC[9] = {
    5.64188496988670089e-01, 8.88314979438837594e+00, 6.61191906371416295e+01,
    2.98635138197400131e+02, 8.81952221241769090e+02, 1.71204761263407058e+03,
    2.05107837782607147e+03, 1.23033935479799725e+03, 2.15311535474403846e-08};
constexpr double kErfD[8] = {
    1.57449261107098347e+01, 1.17693950891312499e+02, 5.37181101862009858e+02,
    1.62138957456669019e+03, 3.29079923573345963e+03, 4.36261909014324716e+03,
    3.43936767414372164e+03, 1.23033935480374942e+03};
constexpr double kErfP[6] = {
    3.05326634961232344e-01, 3.60344899949804439e-01, 1.25781726111229246e-01,
    1.60837851487422766e-02, 6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kErfQ[5] = {
    2.56852019228982242e+00, 1.87295284992346047e+00, 5.27905102951428412e-01,
    6.05183413124413191e-02, 2.33520497626869185e-03};

constexpr double kInvSqrtPi = 5.6418958354775628695e-01; // 1/sqrt(pi)

// erfc(y)*exp(y^2) for y > 0.46875; the caller applies the exp factor.
double erfcx_upper(double y) {
    if (y <= 4.0) {
        double num = kErfC[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kErfC[i]) * y;
            den = (den + kErfD[i]) * y;
        }
        return (num + kErfC[7]) / (den + kErfD[7]);
    }
    const double z = 1.0 / (y * y);
    double num = kErfP[5] * z;
    double den = z;
    for (int i = 0; i < 4; ++i) {
        num = (num + kErfP[i]) * z;
        den = (den + kErfQ[i]) * z;
    }
    double r = z * (num + kErfP[4]) / (den + kErfQ[4]);
    return (kInvSqrtPi - r) / y;
}

// exp(-y^2) split so the truncation trick preserves accuracy for large y.
double exp_neg_y_squared(double y) {
    const double ysq = std::trunc(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

} // namespace

double erf_cody(double x) {
    const double y = std::fabs(x);
    if (y <= 0.46875) {
        const double z = y * y;
        double num = kErfA[4] * z;
        double den = z;
        for (int i = 0; i < 3; ++i) {
            num = (num + kErfA[i]) * z;
            den = (den + kErfB[i]) * z;
        }
        return x * (num + kErfA[3]) / (den + kErfB[3]);
    }
    const double ec = erfc_cody(y);
    return x > 0.0 ? 1.0 - ec : ec - 1.0;
}

double erfc_cody(double x) {
    const double y = std::fabs(x);
    if (y <= 0.46875) return 1.0 - erf_cody(x);
    double r = 0.0;
    if (y < 26.6) r = erfcx_upper(y) * exp_neg_y_squared(y);
    return x > 0.0 ? r : 2.0 - r;
}

double normal_cdf(double x) {
    return 0.5 * erfc_cody(-x * 7.0710678118654752440e-01); // x / sqrt(2)
}

double normal_pdf(double x) {
    return 3.9894228040143267794e-01 * std::exp(-0.5 * x * x); // 1/sqrt(2 pi)
}

double normal_quantile(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::domain_error("normal_quantile: t outside [0,1]");
    if (t == 0.0) return -std::numeric_limits<double>::infinity();
    if (t == 1.0) return std::numeric_limits<double>::infinity();

    // Wichura, Algorithm AS 241 (PPND16).
    static constexpr double a[8] = {
        3.3871328727963666080e+00, 1.3314166789178437745e+02,
        1.9715909503065514427e+03, 1.3731693765509461125e+04,
        4.5921953931549871457e+04, 6.7265770927008700853e+04,
        3.3430575583588128105e+04, 2.5090809287301226727e+03};
    static constexpr double b[7] = {
        4.2313330701600911252e+01, 6.8718700749205790830e+02,
        5.3941960214247511077e+03, 2.1213794301586595867e+04,
        3.9307895800092710610e+04, 2.8729085735721942674e+04,
        5.2264952788528545610e+03};
    static constexpr double c[8] = {
        1.42343711074968357734e+00, 4.63033784615654529590e+00,
        5.76949722146069140550e+00, 3.64784832476320460504e+00,
        1.27045825245236838258e+00, 2.41780725177450611770e-01,
        2.27238449892691845833e-02, 7.74545014278341407640e-04};
    static constexpr double d[7] = {
        2.05319162663775882187e+00, 1.67638483018380384940e+00,
        6.89767334985100004550e-01, 1.48103976427480074590e-01,
        1.51986665636164571966e-02, 5.47593808499534494600e-04,
        1.05075007164441684324e-09};
    static constexpr double e[8] = {
        6.65790464350110377720e+00, 5.46378491116411436990e+00,
        1.78482653991729133580e+00, 2.96560571828504891230e-01,
        2.65321895265761230930e-02, 1.24266094738807843860e-03,
        2.71155556874348757815e-05, 2.01033439929228813265e-07};
    static constexpr double f[7] = {
        5.99832206555887937690e-01, 1.36929880922735805310e-01,
        1.48753612908506148525e-02, 7.86869131145613259100e-04,
        1.84631831751005468180e-05, 1.42151175831644588870e-07,
        2.04426310338993978564e-15};

    const double q = t - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        double num = a[7];
        double den = b[6];
        for (int i = 6; i >= 0; --i) num = num * r + a[i];
        for (int i = 5; i >= 0; --i) den = den * r + b[i];
        return q * num / (den * r + 1.0);
    }
    double r = q < 0.0 ? t : 1.0 - t;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        double num = c[7];
        double den = d[6];
        for (int i = 6; i >= 0; --i) num = num * r + c[i];
        for (int i = 5; i >= 0; --i) den = den * r + d[i];
        val = num / (den * r + 1.0);
    } else {
        r -= 5.0;
        double num = e[7];
        double den = f[6];
        for (int i = 6; i >= 0; --i) num = num * r + e[i];
        for (int i = 5; i >= 0; --i) den = den * r + f[i];
        val = num / (den * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

} // namespace semigarch
