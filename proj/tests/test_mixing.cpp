#include "semigarch/mixing.hpp"

#include "semigarch/errors.hpp"
#include "semigarch/stats.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

using namespace semigarch;

namespace {

IntensitySpec linear_11() { return IntensitySpec::linear({1, 1}, 1.0, {0.3}, {0.5}); }

} // namespace

TEST_CASE("coalescence bound formula") {
    CHECK(coalescence_bound(1.0, 0.5, 0.0) == 1.0);
    CHECK(coalescence_bound(1.0, 0.5, 0.1) == doctest::Approx(std::exp(-0.2)).epsilon(1e-15));
    // first-order expansion floor
    for (double k : {0.0, 0.05, 0.4, 2.0})
        CHECK(coalescence_bound(1.0, 0.5, k) >= 1.0 - 1.0 * k / 0.5 - 1e-15);
    CHECK_THROWS_AS((void)coalescence_bound(1.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("stopping constants") {
    const SeedFamily poi = SeedFamily::poisson();
    const DriftConstants d = drift_constants(1.0, std::vector{0.3}, std::vector{0.4}, poi);
    const StoppingConstants sc = stopping_constants(d);
    CHECK(sc.eta == doctest::Approx(2.0 / 1.7).epsilon(1e-15));
    CHECK(sc.level == doctest::Approx(4.0 / 0.3).epsilon(1e-12));

    DriftConstants tiny = d;
    tiny.kappa = 0.0;
    tiny.a0 = 1.0;
    const StoppingConstants limit = stopping_constants(tiny);
    CHECK(limit.eta == 2.0);
    CHECK(limit.level == doctest::Approx(4.0));
}

TEST_CASE("coalescence verification on a small grid") {
    const SeedFamily poi = SeedFamily::poisson();
    const std::vector<double> grid{0.0, 0.2};
    const CoalescenceReport rep = verify_coalescence_lemma(
        linear_11(), poi, grid, 800, 200, derive_stream(1400, 0), 1, 500);
    REQUIRE(rep.points.size() == 2);
    CHECK(rep.delta == 1.0);
    CHECK(rep.c_total == doctest::Approx(0.5));
    // zero gap: identical states, certain coalescence
    CHECK(rep.points[0].empirical == 1.0);
    CHECK(rep.points[0].max_gap_sum == 0.0);
    // positive gap: bound honored and realized gap is the requested one (linear map)
    CHECK(rep.points[1].realized_gap == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rep.points[1].frequency_ok);
    CHECK(rep.points[1].gap_sum_ok);
    CHECK(rep.points[1].empirical >= std::exp(-0.4) - 3.0 * rep.points[1].se);
    CHECK(rep.all_ok());
}

TEST_CASE("stopping-time return bound from twice the level") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec spec = linear_11();
    const DriftConstants d = drift_constants(spec, poi);
    const StoppingConstants sc = stopping_constants(d);
    const StoppingTimeCheck chk = verify_stopping_return(
        spec, poi, d, 2.0 * sc.level, 2000, 100000, derive_stream(1401, 0), 1);
    CHECK(chk.truncated == 0);
    CHECK(chk.ok);
    CHECK(chk.mean <= chk.w0 + 3.0 * chk.se);
    CHECK(chk.mean > 1.0);
}

TEST_CASE("trial schedule honors retardation and evaluates trials") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec spec = linear_11();
    const DriftConstants d = drift_constants(spec, poi);
    RngStream rng = derive_stream(1402, 0);
    const long trial_len = 10;
    const TrialSchedule sched =
        run_trial_schedule(spec, poi, d, trial_len, 0.05, 3000, rng, std::nullopt, 1000);
    REQUIRE(!sched.taus.empty());
    for (std::size_t i = 1; i < sched.taus.size(); ++i)
        CHECK(sched.taus[i] - sched.taus[i - 1] >= trial_len);
    CHECK(sched.success.size() == sched.taus.size());
    CHECK(sched.all_hits.size() == sched.taus.size());
}

TEST_CASE("trial starting below the level returns at time zero") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec spec = linear_11();
    const DriftConstants d = drift_constants(spec, poi);
    RngStream rng = derive_stream(1403, 0);
    ChainState a = zero_state(spec.order());
    ChainState b = zero_state(spec.order());
    const TrialSchedule sched = run_trial_schedule(
        spec, poi, d, 5, 0.05, 200, rng, std::make_pair(a, b));
    REQUIRE(!sched.taus.empty());
    CHECK(sched.taus[0] == 0);
}

TEST_CASE("per-trial success rate is bounded away from zero") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec spec = linear_11();
    const DriftConstants d = drift_constants(spec, poi);
    const StoppingConstants sc = stopping_constants(d);
    const long n = 64;
    const long trial_len =
        default_trial_length(n, 0.5, spec.contraction_total(), sc.level, spec.order().p);
    CHECK(trial_len >= spec.order().p);
    const double gap_target = std::pow(0.5, std::sqrt(static_cast<double>(n)));

    long trials = 0, successes = 0;
    for (int rep = 0; rep < 300; ++rep) {
        RngStream rng = derive_stream(1404, static_cast<std::uint64_t>(rep));
        const TrialSchedule sched = run_trial_schedule(
            spec, poi, d, trial_len, gap_target, 400, rng, std::nullopt, 500);
        trials += static_cast<long>(sched.success.size());
        for (std::uint8_t s : sched.success) successes += s;
    }
    REQUIRE(trials > 100);
    CHECK(static_cast<double>(successes) / static_cast<double>(trials) > 0.05);
}

TEST_CASE("lemma-style bound on retarded return increments") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec spec = linear_11();
    const DriftConstants d = drift_constants(spec, poi);
    const StoppingConstants sc = stopping_constants(d);
    const long trial_len = 8;

    std::vector<double> values;
    for (int rep = 0; rep < 400; ++rep) {
        RngStream rng = derive_stream(1405, static_cast<std::uint64_t>(rep));
        const TrialSchedule sched = run_trial_schedule(
            spec, poi, d, trial_len, 0.01, 600, rng, std::nullopt, 500);
        for (std::size_t i = 1; i < sched.taus.size(); ++i)
            values.push_back(std::pow(sc.eta, static_cast<double>(sched.taus[i] - sched.taus[i - 1])));
    }
    REQUIRE(values.size() > 200);
    const MeanSe ms = mean_and_se(values);
    const double ceiling = std::pow(sc.eta, static_cast<double>(trial_len)) *
                           (1.0 + (d.a0 + d.kappa * sc.level) / (1.0 - d.kappa));
    CHECK(ms.mean <= ceiling + 3.0 * ms.se);
}

TEST_CASE("constant-intensity model mixes immediately") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec constant = IntensitySpec::linear({1, 1}, 1.0, {0.0}, {0.0});
    const std::vector<long> grid{1, 2, 4};
    const MixingEstimate est =
        estimate_beta(constant, poi, grid, 200, 20, 100, derive_stream(1406, 0), 1);
    for (double b : est.beta_hat) CHECK(b == 0.0);
    CHECK_THROWS_AS((void)fit_subgeometric_rate(est), InsufficientDataError);
}

TEST_CASE("beta estimates are exactly nonincreasing and eventually small") {
    const SeedFamily poi = SeedFamily::poisson();
    const std::vector<long> grid{1, 2, 4, 9, 16, 25, 36, 49, 64};
    const MixingEstimate est =
        estimate_beta(linear_11(), poi, grid, 400, 320, 1500, derive_stream(1407, 0), 1);
    for (std::size_t i = 1; i < est.beta_hat.size(); ++i)
        CHECK(est.beta_hat[i] <= est.beta_hat[i - 1]);
    CHECK(est.beta_hat.back() < est.beta_hat.front());
    CHECK(est.beta_hat.back() < 0.05);
}

TEST_CASE("estimate_beta validates its configuration") {
    const SeedFamily poi = SeedFamily::poisson();
    const std::vector<long> grid{1, 4, 16};
    CHECK_THROWS_AS((void)estimate_beta(linear_11(), poi, grid, 200, 8, 100,
                                        derive_stream(1408, 0), 1),
                    ConfigError);
    const std::vector<long> bad{4, 1};
    CHECK_THROWS_AS((void)estimate_beta(linear_11(), poi, bad, 200, 100, 100,
                                        derive_stream(1408, 0), 1),
                    ConfigError);
    CHECK_THROWS_AS((void)estimate_beta(linear_11(), poi, grid, 50, 100, 100,
                                        derive_stream(1408, 0), 1),
                    ConfigError);
}

TEST_CASE("second-order models run through the full estimation path") {
    const SeedFamily poi = SeedFamily::poisson();
    const IntensitySpec spec =
        IntensitySpec::linear({2, 2}, 1.0, {0.2, 0.1}, {0.25, 0.2});

    const std::vector<long> grid{1, 4, 9, 16};
    const MixingEstimate est =
        estimate_beta(spec, poi, grid, 200, 120, 600, derive_stream(1409, 0), 1);
    for (std::size_t i = 1; i < est.beta_hat.size(); ++i)
        CHECK(est.beta_hat[i] <= est.beta_hat[i - 1]);
    CHECK(est.beta_hat.back() < est.beta_hat.front());

    // initial-gap preparation with q = 2: the realized conditional gap stays
    // at or below the requested one and the bound holds
    const std::vector<double> gaps{0.3};
    const CoalescenceReport rep = verify_coalescence_lemma(
        spec, poi, gaps, 500, 150, derive_stream(1410, 0), 1, 400);
    CHECK(rep.points[0].realized_gap <= 0.3 + 1e-12);
    CHECK(rep.points[0].realized_gap > 0.0);
    CHECK(rep.points[0].frequency_ok);
    CHECK(rep.points[0].gap_sum_ok);
}

TEST_CASE("subgeometric fit recovers exact synthetic curves") {
    MixingEstimate est;
    est.n_grid = {1, 4, 9, 16, 25, 36};
    for (long n : est.n_grid) est.beta_hat.push_back(std::pow(0.5, std::sqrt(static_cast<double>(n))));
    est.ci_lo.assign(est.n_grid.size(), 0.0);
    est.ci_hi.assign(est.n_grid.size(), 1.0);
    const SubgeometricFit fit = fit_subgeometric_rate(est);
    CHECK(fit.scale == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.rho == doctest::Approx(0.5).epsilon(1e-10));
    for (double r : fit.residuals) CHECK(std::fabs(r) < 1e-12);

    MixingEstimate est2;
    est2.n_grid = est.n_grid;
    for (long n : est2.n_grid)
        est2.beta_hat.push_back(2.0 * std::pow(0.8, std::sqrt(static_cast<double>(n))));
    const SubgeometricFit fit2 = fit_subgeometric_rate(est2);
    CHECK(fit2.scale == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit2.rho == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(fit2.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("default trial length scales like sqrt(n)") {
    const long d1 = default_trial_length(16, 0.5, 0.5, 20.0, 1);
    const long d2 = default_trial_length(64, 0.5, 0.5, 20.0, 1);
    const long d3 = default_trial_length(256, 0.5, 0.5, 20.0, 1);
    // affine in sqrt(n): slope per unit of sqrt(n) is stable
    const double slope_a = static_cast<double>(d2 - d1) / (8.0 - 4.0);
    const double slope_b = static_cast<double>(d3 - d2) / (16.0 - 8.0);
    CHECK(slope_a == doctest::Approx(slope_b).epsilon(0.3));
    CHECK(d1 >= 1);
    // the defining inequality holds
    for (long n : {16L, 64L, 256L}) {
        const long len = default_trial_length(n, 0.5, 0.5, 20.0, 1);
        CHECK(std::pow(0.5, static_cast<double>(len - 1 + 1)) * 20.0 <=
              std::pow(0.5, std::sqrt(static_cast<double>(n))) + 1e-12);
    }
}
