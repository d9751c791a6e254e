#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hawkesdt/chain.hpp"
#include "hawkesdt/exact.hpp"
#include "hawkesdt/moments.hpp"
#include "hawkesdt/params.hpp"
#include "hawkesdt/stats.hpp"

namespace hawkesdt {

// Statistical verification of weak convergence: fixed-time marginals of the
// chain path against the exact simulators, per grid size.

// Runs body(i) for i in [0, n); with jobs > 1 the index range is split into
// contiguous blocks, one thread each. Results must be written by index, so
// the outcome does not depend on the thread count.
template <class F>
void parallel_for(long n, int jobs, F&& body) {
    if (jobs <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(std::min<long>(jobs, n));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const long lo = n * w / workers;
        const long hi = n * (w + 1) / workers;
        threads.emplace_back([lo, hi, &body] {
            for (long i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : threads) t.join();
}

struct MarginalSamples {
    std::vector<double> lambda;
    std::vector<double> xi;
};

// n_paths independent chain marginals at time t, grid of n_steps over [0, t].
// Path i uses the stream child_seed(seed, i).
inline MarginalSamples sample_dthp_marginal(const HawkesParams& params, double t,
                                            long n_steps, long n_paths,
                                            std::uint64_t seed, int jobs = 1) {
    require_valid(params);
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    const GridSpec grid(t, n_steps);
    const double times[1] = {t};
    MarginalSamples out;
    out.lambda.resize(static_cast<std::size_t>(n_paths));
    out.xi.resize(static_cast<std::size_t>(n_paths));
    parallel_for(n_paths, jobs, [&](long i) {
        const auto rec = simulate_chain_sparse(params, grid, child_seed(seed, static_cast<std::uint64_t>(i)),
                                               std::span<const double>(times, 1));
        out.lambda[static_cast<std::size_t>(i)] = rec.sample_states[0].l;
        out.xi[static_cast<std::size_t>(i)] = rec.sample_states[0].a;
    });
    return out;
}

// n_paths independent exact-simulator marginals at time t (the event
// records are simulated on [0, t] and evaluated at t).
inline MarginalSamples sample_exact_marginal(const HawkesParams& params, double t,
                                             long n_paths, std::uint64_t seed,
                                             int jobs = 1) {
    require_valid(params);
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    const bool erlang = params.kernel.kind == KernelKind::Erlang;
    MarginalSamples out;
    out.lambda.resize(static_cast<std::size_t>(n_paths));
    out.xi.resize(static_cast<std::size_t>(n_paths));
    parallel_for(n_paths, jobs, [&](long i) {
        const std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(i));
        const EventRecord rec =
            erlang ? thinning_erlang(params, t, s) : exact_exponential(params, t, s);
        const ProcessState st = state_at(rec, params, t);
        out.lambda[static_cast<std::size_t>(i)] = st.lambda;
        out.xi[static_cast<std::size_t>(i)] = st.xi;
    });
    return out;
}

struct ConvergenceRow {
    long n_steps = 0;
    double ks_statistic = 0.0;
    double ks_pvalue = 0.0;
    double wasserstein1 = 0.0;
    double mean_dthp = 0.0;
    double mean_exact = 0.0;
    double mean_analytic = 0.0;
};

struct ConvergenceReport {
    std::string coordinate; // "lambda" or "xi"
    double t = 0.0;
    long paths_per_arm = 0;
    std::vector<ConvergenceRow> rows; // sorted by increasing n_steps
};

struct MarginalExperimentResult {
    ConvergenceReport lambda;
    std::optional<ConvergenceReport> xi; // Erlang kernel only
};

// For each N in n_list: paths_per_n chain paths and paths_per_n exact-oracle
// paths, compared at time t (KS, 1-Wasserstein, means). The analytic mean
// column comes from the moment oracle. `oracle_params`, when given, replaces
// the parameters of the exact arm (negative-control hook).
inline MarginalExperimentResult marginal_convergence_experiment(
    const HawkesParams& params, double t, std::span<const long> n_list,
    long paths_per_n, std::uint64_t seed, int jobs = 1,
    const HawkesParams* oracle_params = nullptr) {
    require_valid(params);
    const HawkesParams& oracle = oracle_params ? *oracle_params : params;
    require_valid(oracle);
    if (paths_per_n < 100)
        throw std::invalid_argument("need at least 100 paths per arm");
    for (long n : n_list)
        if (n < 10) throw std::invalid_argument("every N must be >= 10");

    std::vector<long> ns(n_list.begin(), n_list.end());
    std::sort(ns.begin(), ns.end());

    const bool erlang = params.kernel.kind == KernelKind::Erlang;
    const MomentState analytic = moment_state(params, t);

    MarginalExperimentResult result;
    result.lambda = {"lambda", t, paths_per_n, {}};
    if (erlang) result.xi = ConvergenceReport{"xi", t, paths_per_n, {}};

    for (std::size_t r = 0; r < ns.size(); ++r) {
        const std::uint64_t row_seed = child_seed(seed, static_cast<std::uint64_t>(r));
        const MarginalSamples dthp =
            sample_dthp_marginal(params, t, ns[r], paths_per_n, child_seed(row_seed, 0), jobs);
        const MarginalSamples ex =
            sample_exact_marginal(oracle, t, paths_per_n, child_seed(row_seed, 1), jobs);

        auto fill = [&](const std::vector<double>& da, const std::vector<double>& ea,
                        double mean_analytic_value, const char* tag) {
            const SampleSet sa = make_sample_set(da, std::string("dthp_") + tag,
                                                 {"", std::to_string(ns[r]), t, seed});
            const SampleSet sb =
                make_sample_set(ea, std::string("exact_") + tag, {"", "exact", t, seed});
            const KsResult ks = ks_two_sample(sa, sb);
            ConvergenceRow row;
            row.n_steps = ns[r];
            row.ks_statistic = ks.statistic;
            row.ks_pvalue = ks.pvalue;
            row.wasserstein1 = wasserstein1(sa, sb);
            row.mean_dthp = sample_mean(da);
            row.mean_exact = sample_mean(ea);
            row.mean_analytic = mean_analytic_value;
            return row;
        };
        result.lambda.rows.push_back(fill(dthp.lambda, ex.lambda, analytic.lambda_mean, "lambda"));
        if (erlang)
            result.xi->rows.push_back(fill(dthp.xi, ex.xi, analytic.xi_mean, "xi"));
    }
    return result;
}

// Least-squares slope of log(wasserstein1) against log(h); an exploratory
// estimate of the weak-convergence order.
inline double empirical_rate(const ConvergenceReport& report, double horizon) {
    if (report.rows.size() < 3)
        throw std::invalid_argument("empirical_rate: need at least 3 rows");
    std::vector<double> lx, ly;
    for (const auto& row : report.rows) {
        if (!(row.wasserstein1 > 0.0))
            throw std::invalid_argument("empirical_rate: degenerate fit, "
                                        "nonpositive wasserstein value");
        lx.push_back(std::log(horizon / static_cast<double>(row.n_steps)));
        ly.push_back(std::log(row.wasserstein1));
    }
    const auto n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hawkesdt
