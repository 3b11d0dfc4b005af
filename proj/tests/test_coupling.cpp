#include "semigarch/coupling.hpp"

#include "semigarch/contraction.hpp"
#include "semigarch/rng.hpp"
#include "semigarch/stats.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

using namespace semigarch;

TEST_CASE("equal intensities hit for every uniform") {
    const SeedFamily poi = SeedFamily::poisson();
    for (double u : {0.001, 0.3, 0.7, 0.9999}) {
        const CoupleStepOutcome out = maximal_couple_draw(poi, 1.5, 1.5, u);
        CHECK(out.hit);
        CHECK(out.y == out.y_prime);
        CHECK(out.y == poi.quantile(1.5, u));
        CHECK(out.overlap == 1.0);
    }
}

TEST_CASE("hit frequency matches the overlap and beats the similarity floor") {
    const SeedFamily poi = SeedFamily::poisson();
    const double delta = poi.similarity_delta().delta;
    RngStream rng = derive_stream(900, 0);
    for (auto [la, lb] : std::vector<std::pair<double, double>>{
             {1.0, 1.5}, {0.5, 2.0}, {3.0, 3.2}, {0.0, 1.0}}) {
        const double overlap = poi.tv_overlap(la, lb).overlap();
        const long n = 100000;
        long hits = 0;
        for (long i = 0; i < n; ++i)
            if (maximal_couple_draw(poi, la, lb, rng.next_uniform()).hit) ++hits;
        const double freq = static_cast<double>(hits) / static_cast<double>(n);
        CHECK(std::fabs(freq - overlap) <= 3.0 * wilson_se(hits, n));
        CHECK(freq >= std::exp(-delta * std::fabs(la - lb)) - 3.0 * wilson_se(hits, n));
    }
}

TEST_CASE("marginals of the coupled draw match each side") {
    const SeedFamily poi = SeedFamily::poisson();
    const double la = 1.0, lb = 2.5;
    RngStream rng = derive_stream(901, 0);
    const long n = 100000;
    const int kmax = 30;
    std::vector<double> counts_a(kmax + 1, 0.0), counts_b(kmax + 1, 0.0);
    for (long i = 0; i < n; ++i) {
        const CoupleStepOutcome out = maximal_couple_draw(poi, la, lb, rng.next_uniform());
        counts_a[static_cast<std::size_t>(std::min<double>(out.y, kmax))] += 1.0;
        counts_b[static_cast<std::size_t>(std::min<double>(out.y_prime, kmax))] += 1.0;
    }
    std::vector<double> expect_a, expect_b;
    for (int k = 0; k <= kmax; ++k) {
        expect_a.push_back(poi.density(la, k) * n);
        expect_b.push_back(poi.density(lb, k) * n);
    }
    expect_a.back() += (1.0 - poi.cdf(la, kmax)) * n;
    expect_b.back() += (1.0 - poi.cdf(lb, kmax)) * n;
    CHECK(chi_square_gof_pvalue(counts_a, expect_a) > 0.01);
    CHECK(chi_square_gof_pvalue(counts_b, expect_b) > 0.01);
}

TEST_CASE("gaussian coupled draws preserve both marginals") {
    const SeedFamily g = SeedFamily::gaussian_with_floor(0.5);
    const double va = 1.0, vb = 2.0;
    RngStream rng = derive_stream(902, 0);
    const long n = 20000;
    std::vector<double> cdf_a, cdf_b;
    for (long i = 0; i < n; ++i) {
        const CoupleStepOutcome out = maximal_couple_draw(g, va, vb, rng.next_uniform());
        cdf_a.push_back(g.cdf(va, out.y));
        cdf_b.push_back(g.cdf(vb, out.y_prime));
    }
    CHECK(ks_test_pvalue(cdf_a) > 0.01);
    CHECK(ks_test_pvalue(cdf_b) > 0.01);
}

TEST_CASE("maximality and marginals hold across every family kind") {
    struct Case {
        SeedFamily family;
        double la, lb;
    };
    const std::vector<Case> cases{
        {SeedFamily::zero_inflated_poisson(0.7), 1.0, 2.0},
        {SeedFamily::compound_poisson({0.2, 0.5, 0.3}), 0.8, 1.6},
        {SeedFamily::gaussian_with_floor(0.5), 0.8, 1.5},
    };
    int case_idx = 0;
    for (const Case& c : cases) {
        RngStream rng = derive_stream(890, static_cast<std::uint64_t>(case_idx++));
        const double overlap = c.family.tv_overlap(c.la, c.lb).overlap();
        const double delta = c.family.similarity_delta().delta;
        const long n = 30000;
        long hits = 0;
        std::vector<double> cdf_a, cdf_b;
        for (long i = 0; i < n; ++i) {
            const CoupleStepOutcome out =
                maximal_couple_draw(c.family, c.la, c.lb, rng.next_uniform());
            if (out.hit) ++hits;
            // the probability-integral transform works for both supports if
            // discrete points get half-open smoothing skipped; a location test
            // on means is used for the discrete members instead
            if (!c.family.is_discrete()) {
                cdf_a.push_back(c.family.cdf(c.la, out.y));
                cdf_b.push_back(c.family.cdf(c.lb, out.y_prime));
            }
        }
        const double freq = static_cast<double>(hits) / static_cast<double>(n);
        CHECK(std::fabs(freq - overlap) <= 3.0 * wilson_se(hits, n));
        CHECK(freq >= std::exp(-delta * std::fabs(c.la - c.lb)) - 3.0 * wilson_se(hits, n));
        if (!c.family.is_discrete()) {
            CHECK(ks_test_pvalue(cdf_a) > 0.01);
            CHECK(ks_test_pvalue(cdf_b) > 0.01);
        }
    }
    // discrete members: chi-square of each side at the 1% level
    for (int which = 0; which < 2; ++which) {
        const Case& c = cases[static_cast<std::size_t>(which)];
        RngStream rng = derive_stream(891, static_cast<std::uint64_t>(which));
        const long n = 60000;
        const int kmax = 20;
        std::vector<double> counts_a(kmax + 1, 0.0), counts_b(kmax + 1, 0.0);
        for (long i = 0; i < n; ++i) {
            const CoupleStepOutcome out =
                maximal_couple_draw(c.family, c.la, c.lb, rng.next_uniform());
            counts_a[static_cast<std::size_t>(std::min<double>(out.y, kmax))] += 1.0;
            counts_b[static_cast<std::size_t>(std::min<double>(out.y_prime, kmax))] += 1.0;
        }
        std::vector<double> ea, eb;
        for (int k = 0; k <= kmax; ++k) {
            ea.push_back(c.family.density(c.la, k) * n);
            eb.push_back(c.family.density(c.lb, k) * n);
        }
        ea.back() += (1.0 - c.family.cdf(c.la, kmax)) * n;
        eb.back() += (1.0 - c.family.cdf(c.lb, kmax)) * n;
        CHECK(chi_square_gof_pvalue(counts_a, ea) > 0.01);
        CHECK(chi_square_gof_pvalue(counts_b, eb) > 0.01);
    }
}

TEST_CASE("shared-uniform domain is validated") {
    const SeedFamily poi = SeedFamily::poisson();
    CHECK_THROWS_AS((void)maximal_couple_draw(poi, 1.0, 2.0, -0.1), std::domain_error);
    CHECK_THROWS_AS((void)maximal_couple_draw(poi, 1.0, 2.0, 1.5), std::domain_error);
}

TEST_CASE("identical states stay identical forever") {
    const IntensitySpec spec = IntensitySpec::linear({1, 1}, 1.0, {0.3}, {0.5});
    const SeedFamily poi = SeedFamily::poisson();
    RngStream rng = derive_stream(903, 0);
    ChainState s = zero_state(spec.order());
    s.lambda_lags[0] = 2.0;
    CoupledState st = make_coupled(s, s);
    for (int t = 0; t < 200; ++t) {
        const CoupledStepRecord rec = coupled_step(st, spec, poi, rng.next_uniform());
        CHECK(rec.hit);
        CHECK(rec.y == rec.y_prime);
        CHECK(rec.gap == 0.0);
    }
    CHECK(st.states_identical());
}

TEST_CASE("a hit contracts the first-order gap by the declared constant") {
    const IntensitySpec spec = IntensitySpec::linear({1, 1}, 1.0, {0.3}, {0.5});
    const SeedFamily poi = SeedFamily::poisson();
    RngStream rng = derive_stream(904, 0);
    for (int rep = 0; rep < 500; ++rep) {
        ChainState a = zero_state(spec.order());
        ChainState b = zero_state(spec.order());
        a.y_lags[0] = b.y_lags[0] = 2.0;
        a.lambda_lags[0] = 1.0;
        b.lambda_lags[0] = 1.0 + rng.next_uniform();
        const double gap0 = b.lambda_lags[0] - a.lambda_lags[0];
        CoupledState st = make_coupled(a, b);
        const CoupledStepRecord rec = coupled_step(st, spec, poi, rng.next_uniform());
        if (rec.hit) CHECK(st.gap <= 0.5 * gap0 + 1e-12);
    }
}

TEST_CASE("absorption after full alignment is exact for discrete families") {
    const IntensitySpec spec = IntensitySpec::linear({2, 2}, 1.0, {0.2, 0.1}, {0.2, 0.3});
    const SeedFamily poi = SeedFamily::poisson();
    RngStream rng = derive_stream(905, 0);
    long coalesced_runs = 0;
    for (int rep = 0; rep < 50 && coalesced_runs < 20; ++rep) {
        RngStream burn_a = derive_stream(906, static_cast<std::uint64_t>(rep)).split(0);
        RngStream burn_b = derive_stream(906, static_cast<std::uint64_t>(rep)).split(1);
        ChainState a = stationary_draw(spec, poi, 500, burn_a);
        ChainState b = stationary_draw(spec, poi, 500, burn_b);
        CoupledState st = make_coupled(std::move(a), std::move(b));
        bool locked = false;
        for (int t = 0; t < 400; ++t) {
            const CoupledStepRecord rec = coupled_step(st, spec, poi, rng.next_uniform());
            if (locked) {
                CHECK(rec.hit);
                CHECK(st.gap == 0.0);
            }
            if (!locked && st.states_identical() && st.gap == 0.0) {
                locked = true;
                ++coalesced_runs;
            }
        }
    }
    CHECK(coalesced_runs >= 20);
}

TEST_CASE("gap along a run of hits never exceeds the table bound") {
    const IntensitySpec spec = IntensitySpec::linear({1, 2}, 1.0, {0.3}, {0.25, 0.3});
    const SeedFamily poi = SeedFamily::poisson();
    const ContractionTable table = contraction_coeffs(spec.contraction(), 50);
    RngStream rng = derive_stream(907, 0);
    for (int rep = 0; rep < 200; ++rep) {
        ChainState a = zero_state(spec.order());
        ChainState b = a;
        a.y_lags[0] = b.y_lags[0] = 1.0;
        a.lambda_lags = {1.0, 1.5};
        b.lambda_lags = {1.4, 1.7};
        // initial components as the hit-run bound counts them: the next-step
        // intensity difference first, then the newest q-1 lag gaps
        std::vector<double> init_gaps(2);
        init_gaps[0] = std::fabs(spec.evaluate(a.y_lags, a.lambda_lags) -
                                 spec.evaluate(b.y_lags, b.lambda_lags));
        init_gaps[1] = std::fabs(a.lambda_lags[0] - b.lambda_lags[0]);
        CoupledState st = make_coupled(a, b);
        for (int k = 1; k <= 50; ++k) {
            const CoupledStepRecord rec = coupled_step(st, spec, poi, rng.next_uniform());
            // the step-k intensity gap only needs hits at steps 1..k-1
            const double lambda_gap = std::fabs(rec.lambda - rec.lambda_prime);
            CHECK(lambda_gap <= table.gap_bound(k, init_gaps) + 1e-12);
            if (!rec.hit) break;
        }
    }
}

TEST_CASE("run_coupled trivial cases") {
    const SeedFamily poi = SeedFamily::poisson();

    const IntensitySpec constant = IntensitySpec::linear({1, 1}, 1.0, {0.0}, {0.0});
    RngStream rng = derive_stream(908, 0);
    ChainState a = zero_state(constant.order());
    ChainState b = zero_state(constant.order());
    b.lambda_lags[0] = 9.0; // different start, same next intensity
    const CoupledTrajectory traj = run_coupled(a, b, constant, poi, 50, rng);
    CHECK(traj.first_coalescence == 1);

    const IntensitySpec spec = IntensitySpec::linear({1, 1}, 1.0, {0.3}, {0.5});
    ChainState s = zero_state(spec.order());
    s.lambda_lags[0] = 3.0;
    RngStream rng2 = derive_stream(908, 1);
    const CoupledTrajectory same = run_coupled(s, s, spec, poi, 50, rng2);
    CHECK(same.first_coalescence == 1);
}

TEST_CASE("independent stationary starts usually coalesce within 200 steps") {
    const IntensitySpec spec = IntensitySpec::linear({1, 1}, 1.0, {0.3}, {0.5});
    const SeedFamily poi = SeedFamily::poisson();
    const long reps = 1000;
    long coalesced = 0;
    for (long r = 0; r < reps; ++r) {
        RngStream rep = derive_stream(909, static_cast<std::uint64_t>(r));
        RngStream burn_a = rep.split(1), burn_b = rep.split(2), run = rep.split(3);
        ChainState a = stationary_draw(spec, poi, 2000, burn_a);
        ChainState b = stationary_draw(spec, poi, 2000, burn_b);
        const CoupledTrajectory traj = run_coupled(a, b, spec, poi, 200, run);
        if (traj.first_coalescence >= 0) ++coalesced;
    }
    CHECK(static_cast<double>(coalesced) / static_cast<double>(reps) > 0.99);
}

TEST_CASE("continuous chains lock once the gap is negligible") {
    const IntensitySpec spec =
        IntensitySpec::linear({1, 1}, 0.5, {0.2}, {0.3}, ProcessMode::Garch);
    const SeedFamily g = SeedFamily::gaussian_with_floor(0.5);
    long locked = 0;
    for (int rep = 0; rep < 50; ++rep) {
        RngStream r = derive_stream(910, static_cast<std::uint64_t>(rep));
        RngStream burn_a = r.split(1), burn_b = r.split(2), run = r.split(3);
        ChainState a = stationary_draw(spec, g, 1000, burn_a);
        ChainState b = stationary_draw(spec, g, 1000, burn_b);
        CoupledState st = make_coupled(std::move(a), std::move(b));
        for (int t = 0; t < 400 && !st.coalesced; ++t)
            coupled_step(st, spec, g, run.next_uniform());
        if (st.coalesced) {
            ++locked;
            const CoupledStepRecord rec = coupled_step(st, spec, g, run.next_uniform());
            CHECK(rec.hit);
            CHECK(rec.y == rec.y_prime);
        }
    }
    CHECK(locked >= 40);
}

TEST_CASE("both coupled chains follow the uncoupled path law") {
    const IntensitySpec spec = IntensitySpec::linear({1, 1}, 1.0, {0.3}, {0.5});
    const SeedFamily poi = SeedFamily::poisson();
    const long n = 100000;
    const int kmax = 25;

    RngStream rep = derive_stream(911, 0);
    RngStream burn_a = rep.split(1), burn_b = rep.split(2), run = rep.split(3);
    ChainState a = stationary_draw(spec, poi, 2000, burn_a);
    ChainState b = stationary_draw(spec, poi, 2000, burn_b);
    CoupledState st = make_coupled(std::move(a), std::move(b));
    std::vector<double> counts_a(kmax + 1, 0.0), counts_b(kmax + 1, 0.0);
    for (long t = 0; t < n; ++t) {
        const CoupledStepRecord rec = coupled_step(st, spec, poi, run.next_uniform());
        counts_a[static_cast<std::size_t>(std::min<double>(rec.y, kmax))] += 1.0;
        counts_b[static_cast<std::size_t>(std::min<double>(rec.y_prime, kmax))] += 1.0;
    }

    RngStream plain = derive_stream(912, 0);
    ChainState init = stationary_draw(spec, poi, 2000, plain);
    const auto path = simulate_path(spec, poi, n, init, plain);
    std::vector<double> plain_counts(kmax + 1, 0.0);
    for (const PathPoint& pt : path)
        plain_counts[static_cast<std::size_t>(std::min<double>(pt.y, kmax))] += 1.0;

    CHECK(chi_square_two_sample_pvalue(counts_a, plain_counts) > 0.01);
    CHECK(chi_square_two_sample_pvalue(counts_b, plain_counts) > 0.01);
}
