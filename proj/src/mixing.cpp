#include "semigarch/mixing.hpp"

#include "semigarch/coupling.hpp"
#include "semigarch/errors.hpp"
#include "semigarch/parallel.hpp"
#include "semigarch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semigarch {

double coalescence_bound(double delta, double c_total, double gap) {
    if (!(delta > 0.0)) throw std::invalid_argument("coalescence_bound: delta must be positive");
    if (!(c_total >= 0.0 && c_total < 1.0))
        throw std::invalid_argument("coalescence_bound: c must lie in [0,1)");
    if (!(gap >= 0.0)) throw std::invalid_argument("coalescence_bound: gap must be non-negative");
    return std::exp(-delta * gap / (1.0 - c_total));
}

StoppingConstants stopping_constants(const DriftConstants& drift) {
    return {2.0 / (1.0 + drift.kappa), (2.0 * drift.a0 + 2.0) / (1.0 - drift.kappa)};
}

bool CoalescenceReport::all_ok() const {
    for (const CoalescenceGridPoint& pt : points)
        if (!pt.frequency_ok || !pt.gap_sum_ok) return false;
    return true;
}

CoalescenceReport verify_coalescence_lemma(const IntensitySpec& spec,
                                           const SeedFamily& family,
                                           std::span<const double> gap_grid,
                                           long replicates, long horizon,
                                           const RngStream& base, int workers,
                                           long burn_in) {
    if (replicates < 2) throw std::invalid_argument("verify_coalescence_lemma: need replicates >= 2");
    if (horizon < 1) throw std::invalid_argument("verify_coalescence_lemma: horizon must be >= 1");
    const double delta = family.similarity_delta().delta;
    const double c_total = spec.contraction_total();
    const double c1 = spec.contraction()[0];
    const int q = spec.order().q;
    if (burn_in < 0) burn_in = default_burn_in(spec.order());

    CoalescenceReport report;
    report.delta = delta;
    report.c_total = c_total;
    report.points.resize(gap_grid.size());

    for (std::size_t g = 0; g < gap_grid.size(); ++g) {
        const double target = gap_grid[g];
        if (!(target >= 0.0))
            throw std::invalid_argument("verify_coalescence_lemma: gaps must be non-negative");
        // Offset of the newest intensity lag: the conditional initial gap is
        // |f(y;l) - f(y;l+offset)| (plus the lag gap itself when q > 1), so
        // scaling by the worst-case slope keeps it at or below the target.
        double offset;
        if (q == 1) {
            offset = c1 > 0.0 ? target / c1 : 0.0;
        } else {
            offset = target / (1.0 + c1);
        }

        const RngStream point_stream = base.split(1000 + static_cast<std::uint64_t>(g));
        std::vector<std::uint8_t> success(static_cast<std::size_t>(replicates), 0);
        std::vector<double> realized(static_cast<std::size_t>(replicates), 0.0);
        std::vector<double> gap_sums(static_cast<std::size_t>(replicates), 0.0);

        parallel_replicates(replicates, workers, [&](long r) {
            RngStream rep = point_stream.split(static_cast<std::uint64_t>(r));
            RngStream burn = rep.split(0);
            RngStream run = rep.split(1);

            ChainState a = stationary_draw(spec, family, burn_in, burn);
            ChainState b = a;
            b.lambda_lags[0] += offset;

            // Conditional initial gap as the coalescence lemma measures it:
            // next-step intensity difference plus the newest q-1 lag gaps.
            double k_realized =
                std::fabs(spec.evaluate(a.y_lags, a.lambda_lags) -
                          spec.evaluate(b.y_lags, b.lambda_lags));
            for (int i = 2; i <= q; ++i)
                k_realized += std::fabs(a.lambda_lags[i - 2] - b.lambda_lags[i - 2]);
            realized[static_cast<std::size_t>(r)] = k_realized;

            CoupledState st = make_coupled(std::move(a), std::move(b));
            bool all_hit = true;
            double gap_sum = 0.0;
            for (long t = 1; t <= horizon; ++t) {
                const CoupledStepRecord rec = coupled_step(st, spec, family, run.next_uniform());
                gap_sum += std::fabs(rec.lambda - rec.lambda_prime);
                if (!rec.hit) {
                    all_hit = false;
                    break;
                }
                if (st.states_identical()) break; // exact absorption; later gaps are zero
            }
            success[static_cast<std::size_t>(r)] = all_hit ? 1 : 0;
            gap_sums[static_cast<std::size_t>(r)] = gap_sum;
        });

        CoalescenceGridPoint& pt = report.points[g];
        pt.target_gap = target;
        pt.replicates = replicates;
        for (long r = 0; r < replicates; ++r) {
            pt.realized_gap = std::max(pt.realized_gap, realized[static_cast<std::size_t>(r)]);
            if (success[static_cast<std::size_t>(r)]) {
                pt.successes += 1;
                pt.max_gap_sum = std::max(pt.max_gap_sum, gap_sums[static_cast<std::size_t>(r)]);
                const double limit = realized[static_cast<std::size_t>(r)] / (1.0 - c_total);
                if (gap_sums[static_cast<std::size_t>(r)] > limit + 1e-9 * (1.0 + limit))
                    pt.gap_sum_ok = false;
            }
        }
        pt.bound = coalescence_bound(delta, c_total, target);
        pt.empirical = static_cast<double>(pt.successes) / static_cast<double>(replicates);
        pt.se = wilson_se(pt.successes, replicates);
        pt.frequency_ok = pt.empirical >= pt.bound - 3.0 * pt.se;
    }
    return report;
}

TrialSchedule run_trial_schedule(const IntensitySpec& spec, const SeedFamily& family,
                                 const DriftConstants& drift, long trial_length,
                                 double gap_target, long horizon, RngStream& rng,
                                 std::optional<std::pair<ChainState, ChainState>> init,
                                 long burn_in) {
    const int p = spec.order().p;
    if (trial_length < p)
        throw std::invalid_argument("run_trial_schedule: trial length must be >= p");
    if (horizon < 1) throw std::invalid_argument("run_trial_schedule: horizon must be >= 1");
    if (burn_in < 0) burn_in = default_burn_in(spec.order());

    ChainState a, b;
    if (init) {
        a = std::move(init->first);
        b = std::move(init->second);
    } else {
        RngStream burn_a = rng.split(11);
        RngStream burn_b = rng.split(12);
        a = stationary_draw(spec, family, burn_in, burn_a);
        b = stationary_draw(spec, family, burn_in, burn_b);
    }

    const StoppingConstants sc = stopping_constants(drift);
    TrialSchedule sched;
    sched.level = sc.level;
    sched.trial_length = trial_length;
    sched.gap_target = gap_target;

    CoupledState st = make_coupled(std::move(a), std::move(b));
    long pending_tau = -1; // trial awaiting evaluation at pending_tau + trial_length
    long search_from = 0;  // earliest time eligible as the next return

    double w = drift.coupled_level(st.chain_a, st.chain_b);
    if (w <= sc.level) {
        sched.taus.push_back(0);
        pending_tau = 0;
        search_from = 0 + trial_length + 1;
    }

    for (long t = 1; t <= horizon; ++t) {
        coupled_step(st, spec, family, rng.next_uniform());
        w = drift.coupled_level(st.chain_a, st.chain_b);

        if (pending_tau >= 0 && t == pending_tau + trial_length) {
            bool hits_ok = true;
            for (int l = 1; l < p; ++l) {
                const long step = pending_tau + trial_length - l;
                if (step < 1 || !st.hits[static_cast<std::size_t>(step - 1)]) {
                    hits_ok = false;
                    break;
                }
            }
            sched.success.push_back(hits_ok && st.gap <= gap_target ? 1 : 0);
            bool window_hit = true;
            for (long s = std::max<long>(pending_tau, 1); s <= pending_tau + trial_length - 1; ++s)
                if (!st.hits[static_cast<std::size_t>(s - 1)]) {
                    window_hit = false;
                    break;
                }
            sched.all_hits.push_back(window_hit ? 1 : 0);
            pending_tau = -1;
        }

        if (pending_tau < 0 && t >= search_from && w <= sc.level) {
            sched.taus.push_back(t);
            pending_tau = t;
            search_from = t + trial_length + 1;
        }
    }
    sched.truncated = pending_tau >= 0;
    if (sched.truncated) {
        // Drop the unfinished trial start so taus and outcomes stay aligned.
        sched.taus.pop_back();
    }
    return sched;
}

long default_trial_length(long n, double rho_target, double c_total, double level, int p) {
    if (n < 1) throw std::invalid_argument("default_trial_length: n must be >= 1");
    if (!(rho_target > 0.0 && rho_target < 1.0))
        throw std::invalid_argument("default_trial_length: rho_target must lie in (0,1)");
    if (!(level > 0.0)) throw std::invalid_argument("default_trial_length: level must be positive");
    if (!(c_total >= 0.0 && c_total < 1.0))
        throw std::invalid_argument("default_trial_length: c must lie in [0,1)");
    if (c_total == 0.0) return p; // one aligned step suffices
    const double needed =
        (std::sqrt(static_cast<double>(n)) * std::log(rho_target) - std::log(level)) /
        std::log(c_total);
    const long length = static_cast<long>(p - 1) + static_cast<long>(std::ceil(needed));
    return std::max<long>(length, p);
}

MixingEstimate estimate_beta(const IntensitySpec& spec, const SeedFamily& family,
                             std::span<const long> n_grid, long replicates, long horizon,
                             long burn_in, const RngStream& base, int workers) {
    if (n_grid.empty()) throw ConfigError("estimate_beta: empty n grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw ConfigError("estimate_beta: grid values must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw ConfigError("estimate_beta: grid must be strictly increasing");
    }
    if (replicates < 100) throw ConfigError("estimate_beta: need at least 100 replicates");
    const long max_n = n_grid.back();
    if (horizon < max_n) throw ConfigError("estimate_beta: horizon smaller than the largest n");
    if (burn_in < 0) burn_in = default_burn_in(spec.order());

    std::vector<long> last_miss(static_cast<std::size_t>(replicates), 0);
    parallel_replicates(replicates, workers, [&](long r) {
        RngStream rep = base.split(static_cast<std::uint64_t>(r));
        RngStream burn_a = rep.split(1);
        RngStream burn_b = rep.split(2);
        RngStream run = rep.split(3);
        ChainState a = stationary_draw(spec, family, burn_in, burn_a);
        ChainState b = stationary_draw(spec, family, burn_in, burn_b);
        CoupledState st = make_coupled(std::move(a), std::move(b));
        long miss = 0;
        for (long t = 1; t <= horizon; ++t) {
            const CoupledStepRecord rec = coupled_step(st, spec, family, run.next_uniform());
            if (!rec.hit) miss = t;
            if (st.states_identical()) break; // no later miss is possible
        }
        last_miss[static_cast<std::size_t>(r)] = miss;
    });

    MixingEstimate est;
    est.n_grid.assign(n_grid.begin(), n_grid.end());
    est.replicates = replicates;
    est.horizon = horizon;
    const double half_window = 0.5 * static_cast<double>(horizon + max_n);
    long tail_count = 0;
    for (long m : last_miss)
        if (static_cast<double>(m) > half_window) ++tail_count;
    est.tail_discrepancy_rate = static_cast<double>(tail_count) / static_cast<double>(replicates);

    const double z = z99();
    for (long n : n_grid) {
        long count = 0;
        for (long m : last_miss)
            if (m >= n) ++count;
        const WilsonInterval w = wilson_interval(count, replicates, z);
        est.beta_hat.push_back(w.point);
        est.ci_lo.push_back(w.lo);
        est.ci_hi.push_back(w.hi);
    }
    return est;
}

SubgeometricFit fit_subgeometric_rate(const MixingEstimate& estimate) {
    std::vector<double> x_sqrt, x_lin, ylog;
    for (std::size_t i = 0; i < estimate.n_grid.size(); ++i) {
        if (estimate.beta_hat[i] > 0.0) {
            x_sqrt.push_back(std::sqrt(static_cast<double>(estimate.n_grid[i])));
            x_lin.push_back(static_cast<double>(estimate.n_grid[i]));
            ylog.push_back(std::log(estimate.beta_hat[i]));
        }
    }
    if (x_sqrt.size() < 3)
        throw InsufficientDataError(
            "fit_subgeometric_rate: fewer than 3 positive mixing estimates");

    const LinearFit fit = least_squares(x_sqrt, ylog);
    const LinearFit geo = least_squares(x_lin, ylog);

    SubgeometricFit out;
    out.scale = std::exp(fit.intercept);
    out.rho = std::exp(fit.slope);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
    out.r_squared = fit.r_squared;
    out.residuals = fit.residuals;
    out.rho_geometric = std::exp(geo.slope);
    out.r_squared_geometric = geo.r_squared;
    out.points_used = static_cast<long>(x_sqrt.size());
    return out;
}

StoppingTimeCheck verify_stopping_return(const IntensitySpec& spec,
                                         const SeedFamily& family,
                                         const DriftConstants& drift, double w0,
                                         long replicates, long horizon_cap,
                                         const RngStream& base, int workers) {
    if (replicates < 2) throw std::invalid_argument("verify_stopping_return: need replicates >= 2");
    if (horizon_cap < 1) throw std::invalid_argument("verify_stopping_return: horizon cap must be >= 1");
    const StoppingConstants sc = stopping_constants(drift);
    if (!(w0 > sc.level))
        throw std::invalid_argument("verify_stopping_return: w0 must exceed the return level");

    std::vector<double> values(static_cast<std::size_t>(replicates), 0.0);
    std::vector<std::uint8_t> truncated(static_cast<std::size_t>(replicates), 0);
    parallel_replicates(replicates, workers, [&](long r) {
        RngStream run = base.split(static_cast<std::uint64_t>(r));
        ChainState s = zero_state(spec.order());
        s.lambda_lags[0] = w0; // V weights the newest intensity by b0 = 1
        // The newest observation lag does not enter V, so drawing it at the
        // starting level keeps W_0 = w0 exact while the first transition
        // stays distributionally faithful (and the return time non-trivial).
        const double y0 = family.sample(w0, run.next_uniform());
        s.y_lags[0] = spec.mode() == ProcessMode::Garch ? y0 * y0 : y0;
        CoupledState st = make_coupled(s, s);
        long tau = -1;
        for (long t = 1; t <= horizon_cap; ++t) {
            coupled_step(st, spec, family, run.next_uniform());
            if (drift.coupled_level(st.chain_a, st.chain_b) <= sc.level) {
                tau = t;
                break;
            }
        }
        if (tau < 0) {
            truncated[static_cast<std::size_t>(r)] = 1;
            tau = horizon_cap;
        }
        values[static_cast<std::size_t>(r)] = std::pow(sc.eta, static_cast<double>(tau));
    });

    const MeanSe ms = mean_and_se(values);
    StoppingTimeCheck out;
    out.w0 = w0;
    out.eta = sc.eta;
    out.level = sc.level;
    out.mean = ms.mean;
    out.se = ms.se;
    out.replicates = replicates;
    for (std::uint8_t f : truncated) out.truncated += f;
    out.ok = ms.mean <= w0 + 3.0 * ms.se;
    return out;
}

} // namespace semigarch
