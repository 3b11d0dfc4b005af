#include "semigarch/stats.hpp"

#include "semigarch/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semigarch {

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be positive");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {p, center, std::max(0.0, center - half), std::min(1.0, center + half)};
}

double wilson_se(std::int64_t successes, std::int64_t trials) {
    const WilsonInterval w = wilson_interval(successes, trials, 1.0);
    return 0.5 * (w.hi - w.lo);
}

double z99() { return normal_quantile(0.995); }

namespace {

// Lanczos-free log-gamma is not needed; std::lgamma is deterministic enough
// here because it only scales the incomplete-gamma series.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_sf(double stat, double df) {
    if (stat <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * stat);
}

double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Pool trailing cells so each expected count reaches min_expected.
void pool_cells(std::vector<double>& obs, std::vector<double>& exp, double min_expected) {
    std::vector<double> o2;
    std::vector<double> e2;
    double o_acc = 0.0;
    double e_acc = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        o_acc += obs[i];
        e_acc += exp[i];
        if (e_acc >= min_expected) {
            o2.push_back(o_acc);
            e2.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (!e2.empty()) {
            o2.back() += o_acc;
            e2.back() += e_acc;
        } else {
            o2.push_back(o_acc);
            e2.push_back(e_acc);
        }
    }
    obs = std::move(o2);
    exp = std::move(e2);
}

} // namespace

double chi_square_gof_pvalue(std::span<const double> observed,
                             std::span<const double> expected,
                             double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof_pvalue: size mismatch");
    std::vector<double> obs(observed.begin(), observed.end());
    std::vector<double> exp(expected.begin(), expected.end());
    pool_cells(obs, exp, min_expected);
    if (obs.size() < 2) return 1.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double diff = obs[i] - exp[i];
        stat += diff * diff / exp[i];
    }
    return chi_square_sf(stat, static_cast<double>(obs.size() - 1));
}

double chi_square_two_sample_pvalue(std::span<const double> counts_a,
                                    std::span<const double> counts_b,
                                    double min_expected) {
    if (counts_a.size() != counts_b.size() || counts_a.empty())
        throw std::invalid_argument("chi_square_two_sample_pvalue: size mismatch");
    const std::size_t k = counts_a.size();
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        na += counts_a[i];
        nb += counts_b[i];
    }
    if (na <= 0.0 || nb <= 0.0)
        throw std::invalid_argument("chi_square_two_sample_pvalue: empty sample");
    // Pool against the combined expected so both samples stay aligned.
    std::vector<double> a(counts_a.begin(), counts_a.end());
    std::vector<double> b(counts_b.begin(), counts_b.end());
    std::vector<double> a2, b2;
    double aa = 0.0, bb = 0.0, pooled = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        aa += a[i];
        bb += b[i];
        pooled += a[i] + b[i];
        if (pooled * std::min(na, nb) / (na + nb) >= min_expected) {
            a2.push_back(aa);
            b2.push_back(bb);
            aa = bb = pooled = 0.0;
        }
    }
    if (pooled > 0.0 && !a2.empty()) {
        a2.back() += aa;
        b2.back() += bb;
    } else if (pooled > 0.0) {
        a2.push_back(aa);
        b2.push_back(bb);
    }
    if (a2.size() < 2) return 1.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < a2.size(); ++i) {
        const double tot = a2[i] + b2[i];
        const double ea = tot * na / (na + nb);
        const double eb = tot * nb / (na + nb);
        stat += (a2[i] - ea) * (a2[i] - ea) / ea + (b2[i] - eb) * (b2[i] - eb) / eb;
    }
    return chi_square_sf(stat, static_cast<double>(a2.size() - 1));
}

double ks_test_pvalue(std::vector<double> cdf_values) {
    if (cdf_values.empty()) throw std::invalid_argument("ks_test_pvalue: empty sample");
    std::sort(cdf_values.begin(), cdf_values.end());
    const double n = static_cast<double>(cdf_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < cdf_values.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(cdf_values[i] - lo, hi - cdf_values[i]));
    }
    const double sn = std::sqrt(n);
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("least_squares: degenerate x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    fit.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += fit.residuals[i] * fit.residuals[i];
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    if (x.size() > 2) {
        fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    } else {
        fit.slope_se = 0.0;
    }
    return fit;
}

MeanSe mean_and_se(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean_and_se: empty sample");
    double m = 0.0;
    for (double v : values) m += v;
    m /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - m) * (v - m);
    var /= std::max<std::size_t>(1, values.size() - 1);
    return {m, std::sqrt(var / static_cast<double>(values.size()))};
}

} // namespace semigarch
