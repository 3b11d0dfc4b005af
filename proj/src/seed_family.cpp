#include "semigarch/seed_family.hpp"

#include "semigarch/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace semigarch {

namespace {

constexpr double kTailCutoff = 1.0 - 1e-12;
constexpr std::size_t kMaxTableSize = 10'000'000;

void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("seed family: lambda must be a finite non-negative real");
}

void check_probability(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::domain_error("seed family: probability argument outside [0,1]");
}

// Poisson pmf table, truncated at cumulative >= 1 - 1e-12.  Falls back to
// log-space terms when exp(-lambda) underflows.
std::vector<double> poisson_table(double lambda) {
    std::vector<double> pmf;
    if (lambda == 0.0) {
        pmf.push_back(1.0);
        return pmf;
    }
    double p = std::exp(-lambda);
    if (p > 0.0) {
        double cum = p;
        pmf.push_back(p);
        std::size_t k = 0;
        while (cum < kTailCutoff) {
            ++k;
            if (k >= kMaxTableSize)
                throw std::invalid_argument("seed family: lambda too large for pmf table");
            p *= lambda / static_cast<double>(k);
            pmf.push_back(p);
            cum += p;
        }
        return pmf;
    }
    // log-space: pmf(k) = exp(k log(lambda) - lambda - lgamma(k+1))
    double cum = 0.0;
    const double log_lambda = std::log(lambda);
    for (std::size_t k = 0;; ++k) {
        if (k >= kMaxTableSize)
            throw std::invalid_argument("seed family: lambda too large for pmf table");
        const double lp =
            static_cast<double>(k) * log_lambda - lambda - std::lgamma(static_cast<double>(k) + 1.0);
        const double v = lp < -745.0 ? 0.0 : std::exp(lp);
        pmf.push_back(v);
        cum += v;
        if (cum >= kTailCutoff) break;
    }
    return pmf;
}

} // namespace

SeedFamily SeedFamily::poisson() { return SeedFamily(FamilyKind::Poisson); }

SeedFamily SeedFamily::gaussian_zero_mean() { return SeedFamily(FamilyKind::GaussianZeroMean); }

SeedFamily SeedFamily::zero_inflated_poisson(double pi) {
    if (!(pi > 0.0 && pi <= 1.0))
        throw std::invalid_argument("zero_inflated_poisson: pi must lie in (0,1]");
    SeedFamily f(FamilyKind::ZeroInflatedPoisson);
    f.pi_ = pi;
    return f;
}

SeedFamily SeedFamily::compound_poisson(std::vector<double> jump_pmf) {
    if (jump_pmf.empty())
        throw std::invalid_argument("compound_poisson: jump pmf must be non-empty");
    double sum = 0.0;
    for (double v : jump_pmf) {
        if (!(v >= 0.0)) throw std::invalid_argument("compound_poisson: negative jump probability");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("compound_poisson: jump pmf must sum to 1 within 1e-12");
    SeedFamily f(FamilyKind::CompoundPoisson);
    f.jump_pmf_ = std::move(jump_pmf);
    return f;
}

SeedFamily SeedFamily::gaussian_with_floor(double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("gaussian_with_floor: omega must be positive");
    SeedFamily f(FamilyKind::GaussianWithFloor);
    f.omega_ = omega;
    return f;
}

Support SeedFamily::support() const {
    return is_discrete() ? Support::NonnegativeIntegers : Support::Reals;
}

bool SeedFamily::is_discrete() const {
    return kind_ != FamilyKind::GaussianZeroMean && kind_ != FamilyKind::GaussianWithFloor;
}

std::string SeedFamily::name() const {
    switch (kind_) {
        case FamilyKind::Poisson: return "poisson";
        case FamilyKind::GaussianZeroMean: return "gaussian";
        case FamilyKind::ZeroInflatedPoisson: return "zero_inflated_poisson";
        case FamilyKind::CompoundPoisson: return "compound_poisson";
        case FamilyKind::GaussianWithFloor: return "gaussian_floor";
    }
    return "unknown";
}

std::vector<double> SeedFamily::pmf_table(double lambda) const {
    check_lambda(lambda);
    switch (kind_) {
        case FamilyKind::Poisson:
            return poisson_table(lambda);
        case FamilyKind::ZeroInflatedPoisson: {
            // Bernoulli(pi) thinning of the intensity: mass (1-pi) shifted to 0.
            std::vector<double> pmf = poisson_table(lambda);
            for (double& v : pmf) v *= pi_;
            pmf[0] += 1.0 - pi_;
            return pmf;
        }
        case FamilyKind::CompoundPoisson: {
            if (lambda == 0.0) return {1.0};
            // Sum over the truncated Poisson jump count, convolving the finite
            // jump pmf once per count.
            const std::vector<double> count_pmf = poisson_table(lambda);
            std::vector<double> conv{1.0}; // 0-fold convolution
            std::vector<double> result(1, count_pmf[0]);
            for (std::size_t n = 1; n < count_pmf.size(); ++n) {
                std::vector<double> next(conv.size() + jump_pmf_.size() - 1, 0.0);
                for (std::size_t i = 0; i < conv.size(); ++i) {
                    if (conv[i] == 0.0) continue;
                    for (std::size_t j = 0; j < jump_pmf_.size(); ++j)
                        next[i + j] += conv[i] * jump_pmf_[j];
                }
                conv = std::move(next);
                if (result.size() < conv.size()) result.resize(conv.size(), 0.0);
                for (std::size_t i = 0; i < conv.size(); ++i) result[i] += count_pmf[n] * conv[i];
            }
            // Trim the far tail to the same cutoff rule.
            double cum = 0.0;
            std::size_t keep = result.size();
            for (std::size_t i = 0; i < result.size(); ++i) {
                cum += result[i];
                if (cum >= kTailCutoff) {
                    keep = i + 1;
                    break;
                }
            }
            result.resize(keep);
            return result;
        }
        default:
            throw std::logic_error("pmf_table: continuous family has no pmf table");
    }
}

double SeedFamily::density(double lambda, double y) const {
    check_lambda(lambda);
    if (is_discrete()) {
        if (y < 0.0 || y != std::floor(y)) return 0.0;
        const auto k = static_cast<std::size_t>(y);
        const std::vector<double> pmf = pmf_table(lambda);
        return k < pmf.size() ? pmf[k] : 0.0;
    }
    if (lambda == 0.0)
        return y == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    const double sd = std::sqrt(lambda);
    return normal_pdf(y / sd) / sd;
}

double SeedFamily::cdf(double lambda, double y) const {
    check_lambda(lambda);
    if (is_discrete()) {
        if (y < 0.0) return 0.0;
        const std::vector<double> pmf = pmf_table(lambda);
        const double kf = std::floor(y);
        double cum = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            if (static_cast<double>(k) > kf) break;
            cum += pmf[k];
        }
        // Past the truncation point the CDF is exactly 1.
        if (kf >= static_cast<double>(pmf.size()) - 1.0) return 1.0;
        return std::min(cum, 1.0);
    }
    if (lambda == 0.0) return y < 0.0 ? 0.0 : 1.0;
    return normal_cdf(y / std::sqrt(lambda));
}

double SeedFamily::quantile(double lambda, double t) const {
    check_lambda(lambda);
    check_probability(t);
    if (is_discrete()) {
        const std::vector<double> pmf = pmf_table(lambda);
        double cum = 0.0;
        for (std::size_t k = 0; k + 1 < pmf.size(); ++k) {
            cum += pmf[k];
            if (cum >= t) return static_cast<double>(k);
        }
        return static_cast<double>(pmf.size() - 1); // CDF terminates at 1 here
    }
    if (lambda == 0.0) return 0.0;
    return std::sqrt(lambda) * normal_quantile(t);
}

SimilarityConstant SeedFamily::similarity_delta() const {
    switch (kind_) {
        case FamilyKind::Poisson: return {1.0};
        case FamilyKind::CompoundPoisson: return {1.0};
        case FamilyKind::ZeroInflatedPoisson: return {pi_};
        case FamilyKind::GaussianWithFloor: return {1.0 / omega_};
        case FamilyKind::GaussianZeroMean:
            throw std::invalid_argument(
                "similarity constant requires a volatility floor omega");
    }
    throw std::logic_error("similarity_delta: unreachable");
}

double SeedFamily::mean_factor() const {
    switch (kind_) {
        case FamilyKind::Poisson: return 1.0;
        case FamilyKind::ZeroInflatedPoisson: return pi_;
        case FamilyKind::CompoundPoisson: {
            double m = 0.0;
            for (std::size_t k = 0; k < jump_pmf_.size(); ++k)
                m += static_cast<double>(k) * jump_pmf_[k];
            return m;
        }
        case FamilyKind::GaussianZeroMean:
        case FamilyKind::GaussianWithFloor:
            return 1.0; // E(Y^2 | lambda) = lambda
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Overlap decomposition
// ---------------------------------------------------------------------------

SplitCdf SeedFamily::tv_overlap(double lambda, double lambda_prime) const {
    check_lambda(lambda);
    check_lambda(lambda_prime);

    SplitCdf split;
    if (is_discrete()) {
        split.discrete_ = true;
        if (lambda == lambda_prime) {
            // Identical laws: the common part is the family CDF itself.
            split.identical_ = true;
            split.overlap_ = 1.0;
            const std::vector<double> pmf = pmf_table(lambda);
            split.common_cum_.resize(pmf.size());
            double cum = 0.0;
            for (std::size_t k = 0; k < pmf.size(); ++k) {
                cum += pmf[k];
                split.common_cum_[k] = cum;
            }
            split.common_cum_.back() = 1.0;
            return split;
        }
        std::vector<double> pa = pmf_table(lambda);
        std::vector<double> pb = pmf_table(lambda_prime);
        const std::size_t n = std::max(pa.size(), pb.size());
        pa.resize(n, 0.0);
        pb.resize(n, 0.0);
        split.common_cum_.resize(n);
        split.res_a_cum_.resize(n);
        split.res_b_cum_.resize(n);
        double cum_min = 0.0, cum_a = 0.0, cum_b = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double m = std::min(pa[k], pb[k]);
            cum_min += m;
            cum_a += pa[k] - m;
            cum_b += pb[k] - m;
            split.common_cum_[k] = cum_min;
            split.res_a_cum_[k] = cum_a;
            split.res_b_cum_[k] = cum_b;
        }
        split.overlap_ = cum_min;
        return split;
    }
    return gaussian_overlap(lambda, lambda_prime);
}

SplitCdf SeedFamily::gaussian_overlap(double var_a, double var_b) const {
    SplitCdf split;
    split.discrete_ = false;
    split.var_a_ = var_a;
    split.var_b_ = var_b;
    if (var_a == var_b) {
        split.identical_ = true;
        split.overlap_ = 1.0;
        return split;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        // One point mass against a continuous law: zero overlap, each side
        // keeps its full distribution in the residual.
        split.overlap_ = 0.0;
        split.crossing_ = 0.0;
        return split;
    }
    const double lo = std::min(var_a, var_b);
    const double hi = std::max(var_a, var_b);
    // Densities intersect where x^2 = log(hi/lo) * lo*hi / (hi - lo).
    split.crossing_ = std::sqrt(std::log(hi / lo) * lo * hi / (hi - lo));
    const double phi_n = normal_cdf(-split.crossing_ / std::sqrt(lo));
    const double phi_w = normal_cdf(-split.crossing_ / std::sqrt(hi));
    split.overlap_ = 2.0 * phi_n + (1.0 - 2.0 * phi_w);
    return split;
}

namespace {

double step_or_normal_cdf(double var, double x) {
    if (var == 0.0) return x < 0.0 ? 0.0 : 1.0;
    return normal_cdf(x / std::sqrt(var));
}

} // namespace

double SplitCdf::common_cdf(double x) const {
    if (discrete_) throw std::logic_error("common_cdf: continuous accessor on discrete split");
    if (identical_) return step_or_normal_cdf(var_a_, x);
    if (var_a_ == 0.0 || var_b_ == 0.0) return 0.0;
    const double vn = std::min(var_a_, var_b_);
    const double vw = std::max(var_a_, var_b_);
    const double xs = crossing_;
    if (x <= -xs) return step_or_normal_cdf(vn, x);
    const double base = step_or_normal_cdf(vn, -xs);
    if (x < xs) return base + step_or_normal_cdf(vw, x) - step_or_normal_cdf(vw, -xs);
    return base + step_or_normal_cdf(vw, xs) - step_or_normal_cdf(vw, -xs) +
           step_or_normal_cdf(vn, x) - step_or_normal_cdf(vn, xs);
}

double SplitCdf::residual_a_cdf(double x) const {
    if (discrete_) throw std::logic_error("residual_a_cdf: continuous accessor on discrete split");
    if (identical_) return 0.0;
    if (var_a_ == 0.0) return x < 0.0 ? 0.0 : 1.0;
    if (var_b_ == 0.0) return normal_cdf(x / std::sqrt(var_a_));
    const double vn = std::min(var_a_, var_b_);
    const double vw = std::max(var_a_, var_b_);
    const double xs = crossing_;
    const bool a_is_narrow = var_a_ == vn;
    if (a_is_narrow) {
        // narrow residual lives inside (-xs, xs)
        if (x <= -xs) return 0.0;
        const double xx = std::min(x, xs);
        return (step_or_normal_cdf(vn, xx) - step_or_normal_cdf(vn, -xs)) -
               (step_or_normal_cdf(vw, xx) - step_or_normal_cdf(vw, -xs));
    }
    // wide residual lives in the tails
    if (x <= -xs) return step_or_normal_cdf(vw, x) - step_or_normal_cdf(vn, x);
    const double middle = step_or_normal_cdf(vw, -xs) - step_or_normal_cdf(vn, -xs);
    if (x < xs) return middle;
    return middle + (step_or_normal_cdf(vw, x) - step_or_normal_cdf(vw, xs)) -
           (step_or_normal_cdf(vn, x) - step_or_normal_cdf(vn, xs));
}

double SplitCdf::residual_b_cdf(double x) const {
    SplitCdf swapped = *this;
    std::swap(swapped.var_a_, swapped.var_b_);
    return swapped.residual_a_cdf(x);
}

double SplitCdf::gaussian_bisect(double target, double (SplitCdf::*cdf)(double) const) const {
    // Smallest x with cdf(x) >= target; the predicate set is a right
    // half-line, so plain bisection lands on its boundary.
    const double vmax = std::max(var_a_, var_b_);
    double hi = crossing_ + 12.0 * std::sqrt(std::max(vmax, 1e-12)) + 1.0;
    double lo = -hi;
    for (int i = 0; i < 64 && (this->*cdf)(hi) < target; ++i) hi *= 2.0;
    for (int i = 0; i < 64 && (this->*cdf)(lo) >= target; ++i) lo *= 2.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // ulp floor
        if ((this->*cdf)(mid) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double SplitCdf::common_quantile(double u) const {
    if (!(u >= 0.0 && u <= overlap_ + 1e-12))
        throw std::domain_error("common_quantile: u outside [0, overlap]");
    if (discrete_) {
        const double target = std::min(u, overlap_);
        for (std::size_t k = 0; k + 1 < common_cum_.size(); ++k)
            if (common_cum_[k] >= target) return static_cast<double>(k);
        return static_cast<double>(common_cum_.size() - 1);
    }
    if (identical_) {
        if (var_a_ == 0.0) return 0.0;
        return std::sqrt(var_a_) * normal_quantile(std::clamp(u, 0.0, 1.0));
    }
    return gaussian_bisect(std::min(u, overlap_), &SplitCdf::common_cdf);
}

double SplitCdf::residual_a_quantile(double v) const {
    const double mass = 1.0 - overlap_;
    if (!(v >= 0.0 && v <= mass + 1e-12))
        throw std::domain_error("residual_a_quantile: v outside [0, 1-overlap]");
    if (discrete_) {
        const double target = std::min(v, mass);
        for (std::size_t k = 0; k + 1 < res_a_cum_.size(); ++k)
            if (res_a_cum_[k] >= target) return static_cast<double>(k);
        return res_a_cum_.empty() ? 0.0 : static_cast<double>(res_a_cum_.size() - 1);
    }
    if (var_a_ == 0.0) return 0.0;
    if (var_b_ == 0.0) return std::sqrt(var_a_) * normal_quantile(std::clamp(v, 0.0, 1.0));
    return gaussian_bisect(std::min(v, mass), &SplitCdf::residual_a_cdf);
}

double SplitCdf::residual_b_quantile(double v) const {
    const double mass = 1.0 - overlap_;
    if (!(v >= 0.0 && v <= mass + 1e-12))
        throw std::domain_error("residual_b_quantile: v outside [0, 1-overlap]");
    if (discrete_) {
        const double target = std::min(v, mass);
        for (std::size_t k = 0; k + 1 < res_b_cum_.size(); ++k)
            if (res_b_cum_[k] >= target) return static_cast<double>(k);
        return res_b_cum_.empty() ? 0.0 : static_cast<double>(res_b_cum_.size() - 1);
    }
    if (var_b_ == 0.0) return 0.0;
    if (var_a_ == 0.0) return std::sqrt(var_b_) * normal_quantile(std::clamp(v, 0.0, 1.0));
    return gaussian_bisect(std::min(v, mass), &SplitCdf::residual_b_cdf);
}

} // namespace semigarch
