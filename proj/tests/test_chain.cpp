#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hawkesdt/chain.hpp"
#include "hawkesdt/moments.hpp"
#include "hawkesdt/params.hpp"
#include "hawkesdt/stats.hpp"

using namespace hawkesdt;

namespace {

HawkesParams fig4_params() {
    HawkesParams p;
    p.kernel = {KernelKind::Exponential, 2.0, 5.0};
    p.lambda_inf = 3.0;
    p.x0 = 4.0;
    p.marks = MarkDistribution::exponential_rate(1.0);
    return p;
}

HawkesParams erlang_params() {
    HawkesParams p;
    p.kernel = {KernelKind::Erlang, 2.0, 5.0};
    p.lambda_inf = 3.0;
    p.x0 = 4.0;
    p.marks = MarkDistribution::constant(1.0);
    return p;
}

} // namespace

TEST_CASE("step_exponential reproduces the frozen transition values") {
    const HawkesParams p = fig4_params();
    const ChainState s{4.0, 0.0, 0};

    // no jump: u >= l*h = 0.04
    const ChainState no_jump = step_exponential(s, 0.5, 1.0, 0.01, p);
    CHECK_THAT(no_jump.l, Catch::Matchers::WithinAbs(3.9512294245007140, 1e-12));
    CHECK(no_jump.a == 0.0);
    CHECK(no_jump.k == 1);

    // jump: u < 0.04, zeta = 1
    const ChainState jump = step_exponential(s, 0.01, 1.0, 0.01, p);
    CHECK_THAT(jump.l, Catch::Matchers::WithinAbs(5.8536882735021420, 1e-12));
}

TEST_CASE("step_exponential fixed point at alpha = 0, x = lambda_inf") {
    HawkesParams p = fig4_params();
    p.kernel.alpha = 0.0;
    p.x0 = 3.0;
    for (double u : {0.0, 0.01, 0.9}) {
        const ChainState next = step_exponential({3.0, 0.0, 0}, u, 2.0, 0.01, p);
        CHECK_THAT(next.l, Catch::Matchers::WithinAbs(3.0, 1e-15));
    }
}

TEST_CASE("step_erlang reproduces the frozen transition values") {
    const HawkesParams p = erlang_params();
    const ChainState s{4.0, 0.0, 0};

    const ChainState no_jump = step_erlang(s, 0.5, 1.0, 0.01, p);
    CHECK_THAT(no_jump.l, Catch::Matchers::WithinAbs(3.9512294245007140, 1e-12));
    CHECK(no_jump.a == 0.0);

    const ChainState jump = step_erlang(s, 0.01, 1.0, 0.01, p);
    CHECK_THAT(jump.a, Catch::Matchers::WithinAbs(1.9024588490014280, 1e-12));
    CHECK_THAT(jump.l, Catch::Matchers::WithinAbs(3.9702540129907283, 1e-12));
}

TEST_CASE("step_erlang decays the auxiliary value when alpha = 0") {
    HawkesParams p = erlang_params();
    p.kernel.alpha = 0.0;
    const double h = 0.02;
    const ChainState s{2.0, 1.5, 3};
    for (double u : {0.0, 0.5}) {
        const ChainState next = step_erlang(s, u, 1.0, h, p);
        CHECK_THAT(next.a,
                   Catch::Matchers::WithinAbs(1.5 * std::exp(-5.0 * h), 1e-15));
    }
}

TEST_CASE("alpha = 0 chain is the deterministic geometric relaxation") {
    HawkesParams p = fig4_params();
    p.kernel.alpha = 0.0;
    const GridSpec grid(1.0, 100);
    const ChainPath path = simulate_chain(p, grid, 99);
    for (long k = 0; k <= 100; ++k) {
        const double expected = 3.0 + std::exp(-5.0 * grid.step() * k);
        CHECK_THAT(path.l_values[static_cast<std::size_t>(k)],
                   Catch::Matchers::WithinAbs(expected, 1e-12));
    }
}

TEST_CASE("chain values respect positivity and the relaxation lower bound") {
    for (const HawkesParams& p : {fig4_params(), erlang_params()}) {
        const GridSpec grid(2.0, 200000);
        const ChainPath path = simulate_chain(p, grid, 1234);
        const double lower = p.lambda_inf * (1.0 - std::exp(-p.kernel.beta * grid.step()));
        for (std::size_t k = 1; k < path.l_values.size(); ++k) {
            REQUIRE(path.l_values[k] > 0.0);
            REQUIRE(path.l_values[k] >= lower);
            REQUIRE(path.a_values[k] >= 0.0);
        }
    }
}

TEST_CASE("jump is certain once l*h >= 1") {
    const HawkesParams p = fig4_params();
    // h = 0.5 and l = 4 gives l*h = 2 >= 1; u arbitrarily close to 1 still jumps
    const ChainState next = step_exponential({4.0, 0.0, 0}, 0.999999, 1.0, 0.5, p);
    const double no_jump_value =
        3.0 * (1.0 - std::exp(-2.5)) + 4.0 * std::exp(-2.5);
    CHECK(next.l > no_jump_value); // the mark was added

    const GridSpec grid(10.0, 4); // h = 2.5, l*h >= 1 throughout
    const ChainPath path = simulate_chain(p, grid, 7);
    for (std::uint8_t f : path.jump_flags) CHECK(f == 1);
}

TEST_CASE("jump update is strictly increasing in zeta and alpha") {
    const double h = 0.01, u = 0.0;
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double zeta = 0.3 * i;
        const double l = step_exponential({4.0, 0.0, 0}, u, zeta, h, fig4_params()).l;
        if (i > 1) CHECK(l > prev);
        prev = l;
    }
    prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        HawkesParams p = fig4_params();
        p.kernel.alpha = 0.2 * i;
        const double l = step_exponential({4.0, 0.0, 0}, u, 1.0, h, p).l;
        if (i > 1) CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("replaying stored flags and marks reproduces the path bit for bit") {
    for (const HawkesParams& p : {fig4_params(), erlang_params()}) {
        const GridSpec grid(1.0, 5000);
        const ChainPath path = simulate_chain(p, grid, 20240607);
        CHECK(replay_matches(path, p));

        ChainPath corrupted = path;
        corrupted.l_values[2500] += 1e-15;
        CHECK_FALSE(replay_matches(corrupted, p));
    }
}

TEST_CASE("identical seeds give identical paths, different seeds differ") {
    const HawkesParams p = fig4_params();
    const GridSpec grid(1.0, 2000);
    const ChainPath a = simulate_chain(p, grid, 555);
    const ChainPath b = simulate_chain(p, grid, 555);
    CHECK(a.l_values == b.l_values);
    CHECK(a.a_values == b.a_values);
    CHECK(a.jump_flags == b.jump_flags);
    CHECK(a.marks == b.marks);

    const ChainPath c = simulate_chain(p, grid, 556);
    CHECK(a.l_values != c.l_values);
}

TEST_CASE("sparse simulation matches the full path at sample times") {
    for (const HawkesParams& p : {fig4_params(), erlang_params()}) {
        const GridSpec grid(2.0, 4000);
        const ChainPath full = simulate_chain(p, grid, 31337);
        const std::vector<double> times = {0.0, 0.5, 1.0, 1.9990, 2.0};
        const SparseChainRecord sparse =
            simulate_chain_sparse(p, grid, 31337, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto [l, a] = path_value(full, times[i]);
            CHECK(sparse.sample_states[i].l == l);
            CHECK(sparse.sample_states[i].a == a);
        }
        const LossPath loss = reconstruct_loss(full);
        CHECK(sparse.jump_steps == loss.event_steps);
        CHECK(sparse.jump_marks == loss.event_marks);
    }
}

TEST_CASE("path_value floors to the grid index") {
    const HawkesParams p = fig4_params();
    const GridSpec grid(2.0, 10);
    const ChainPath path = simulate_chain(p, grid, 42);

    for (long i = 0; i <= 10; ++i) {
        const auto [l, a] = path_value(path, grid.time_at(i));
        CHECK(l == path.l_values[static_cast<std::size_t>(i)]);
        CHECK(a == path.a_values[static_cast<std::size_t>(i)]);
    }
    // interior of a step: same value as at the left grid point
    CHECK(path_value(path, 0.75).first == path.l_values[3]);
    // t = horizon maps to the final state
    CHECK(path_value(path, 2.0).first == path.l_values[10]);

    CHECK_THROWS_AS(path_value(path, -0.1), std::out_of_range);
    CHECK_THROWS_AS(path_value(path, 2.1), std::out_of_range);
}

TEST_CASE("reconstruct_loss rebuilds the compound loss from the skeleton") {
    const HawkesParams p = fig4_params();
    GridSpec grid(1.0, 50);

    ChainPath no_jumps = simulate_chain(p, grid, 1);
    std::fill(no_jumps.jump_flags.begin(), no_jumps.jump_flags.end(), 0);
    const LossPath empty = reconstruct_loss(no_jumps);
    for (double c : empty.cumulative) CHECK(c == 0.0);
    CHECK(empty.event_steps.empty());

    ChainPath one = no_jumps;
    one.jump_flags[17] = 1;
    one.marks[17] = 2.5;
    const LossPath single = reconstruct_loss(one);
    for (std::size_t k = 0; k <= 17; ++k) CHECK(single.cumulative[k] == 0.0);
    for (std::size_t k = 18; k <= 50; ++k) CHECK(single.cumulative[k] == 2.5);
    REQUIRE(single.event_steps.size() == 1);
    CHECK(single.event_steps[0] == 17);
    CHECK(single.event_marks[0] == 2.5);
}

TEST_CASE("constant unit marks make the loss equal the event count") {
    HawkesParams p = fig4_params();
    p.marks = MarkDistribution::constant(1.0);
    const GridSpec grid(1.0, 20000);
    const ChainPath path = simulate_chain(p, grid, 2718);
    const LossPath loss = reconstruct_loss(path);
    long flagged = 0;
    for (std::uint8_t f : path.jump_flags) flagged += f;
    CHECK(loss.cumulative.back() == static_cast<double>(flagged));

    double acc = 0.0;
    for (std::size_t k = 0; k < path.jump_flags.size(); ++k) {
        REQUIRE(loss.cumulative[k + 1] >= loss.cumulative[k]);
        if (path.jump_flags[k]) acc += path.marks[k];
        REQUIRE(loss.cumulative[k + 1] == acc);
    }
}

TEST_CASE("chain marginal mean tracks the moment oracle") {
    // 1e4 paths on a N = 1000 grid; empirical mean of the path value within
    // four standard errors of the analytic first moment.
    const long n_paths = 10000;
    const std::vector<double> times = {0.25, 0.5, 1.0};

    for (const HawkesParams& p : {fig4_params(), erlang_params()}) {
        const GridSpec grid(1.0, 1000);
        std::vector<std::vector<double>> values(times.size());
        for (long i = 0; i < n_paths; ++i) {
            const SparseChainRecord rec = simulate_chain_sparse(
                p, grid, child_seed(888, static_cast<std::uint64_t>(i)), times);
            for (std::size_t j = 0; j < times.size(); ++j)
                values[j].push_back(rec.sample_states[j].l);
        }
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double oracle = mean_intensity(p, times[j]);
            const double mean = sample_mean(values[j]);
            const double se = standard_error(values[j]);
            INFO((p.kernel.kind == KernelKind::Erlang ? "erlang" : "exp"));
            INFO("t=" << times[j] << " mean=" << mean << " oracle=" << oracle
                      << " se=" << se);
            CHECK(std::abs(mean - oracle) < 4.0 * se);
        }
    }
}

TEST_CASE("long canonical trajectory shows clustering and relaxation") {
    const HawkesParams p = fig4_params();
    const GridSpec grid(5.0, 100000);
    const ChainPath path = simulate_chain(p, grid, 20240101);
    const LossPath loss = reconstruct_loss(path);

    // events happen at roughly rate E[lambda] ~ 5
    CHECK(loss.event_steps.size() > 5);
    CHECK(loss.event_steps.size() < 200);
    // excursions above the initial level and relaxation back near lambda_inf
    double max_l = 0.0, min_l_late = 1e300;
    for (std::size_t k = 0; k < path.l_values.size(); ++k) {
        max_l = std::max(max_l, path.l_values[k]);
        if (k > path.l_values.size() / 4) min_l_late = std::min(min_l_late, path.l_values[k]);
    }
    CHECK(max_l > 5.0);
    CHECK(min_l_late < 3.5);
}
