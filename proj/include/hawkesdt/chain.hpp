#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hawkesdt/params.hpp"
#include "hawkesdt/rng.hpp"

namespace hawkesdt {

// The discrete-time Hawkes intensity chain and its piecewise-constant path.
//
// One step with grid spacing h, from intensity l (and auxiliary value a for
// the Erlang kernel), driven by a uniform u in [0,1) and a mark zeta > 0:
//
//   jump        <- u < l*h                      (certain once l*h >= 1)
//   exponential: l' = lambda_inf*(1 - E) + (l + alpha*zeta*jump) * E
//   erlang:      a' = (a + alpha*zeta*jump) * E
//                l' = lambda_inf*(1 - E) + l*E + a'*h
//
// with E = exp(-beta*h). Every step consumes exactly one uniform and one
// mark whether or not it jumps, so the random stream layout is a function
// of (params, grid, seed) alone.

struct ChainState {
    double l = 0.0; // intensity value
    double a = 0.0; // Erlang auxiliary value; fixed 0 for the exponential kernel
    long k = 0;     // step index
};

struct ChainPath {
    GridSpec grid;
    std::vector<double> l_values;     // size steps+1
    std::vector<double> a_values;     // size steps+1 (all zero for exponential)
    std::vector<std::uint8_t> jump_flags; // size steps; flag for step k -> k+1
    std::vector<double> marks;            // size steps; mark consumed at step k
};

struct LossPath {
    GridSpec grid;
    std::vector<double> cumulative; // size steps+1, nondecreasing, starts at 0
    std::vector<long> event_steps;
    std::vector<double> event_marks;
};

namespace detail {

struct StepConstants {
    double decay;  // exp(-beta*h)
    double relax;  // lambda_inf*(1 - decay)
    double h;
    double alpha;

    StepConstants(const HawkesParams& params, double h_)
        : decay(std::exp(-params.kernel.beta * h_)),
          relax(params.lambda_inf * (1.0 - decay)),
          h(h_),
          alpha(params.kernel.alpha) {}
};

// The two transition maps. Simulation and replay share these so that a
// replayed path reproduces the stored values bit for bit.
inline double advance_exponential(double l, bool jump, double zeta,
                                  const StepConstants& c) {
    const double kick = jump ? c.alpha * zeta : 0.0;
    return c.relax + (l + kick) * c.decay;
}

inline void advance_erlang(double& l, double& a, bool jump, double zeta,
                           const StepConstants& c) {
    const double kick = jump ? c.alpha * zeta : 0.0;
    a = (a + kick) * c.decay; // updated a enters l' below
    l = c.relax + l * c.decay + a * c.h;
}

} // namespace detail

inline ChainState step_exponential(const ChainState& state, double u, double zeta,
                                   double h, const HawkesParams& params) {
    require_valid(params);
    require_kernel(params, KernelKind::Exponential);
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must be in [0,1)");
    if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");

    const detail::StepConstants c(params, h);
    const bool jump = u < state.l * h;
    return {detail::advance_exponential(state.l, jump, zeta, c), 0.0, state.k + 1};
}

inline ChainState step_erlang(const ChainState& state, double u, double zeta,
                              double h, const HawkesParams& params) {
    require_valid(params);
    require_kernel(params, KernelKind::Erlang);
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must be in [0,1)");
    if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");

    const detail::StepConstants c(params, h);
    const bool jump = u < state.l * h;
    double l = state.l, a = state.a;
    detail::advance_erlang(l, a, jump, zeta, c);
    return {l, a, state.k + 1};
}

// Full chain path for a fixed seed. Deterministic: identical
// (params, grid, seed) produce identical paths.
inline ChainPath simulate_chain(const HawkesParams& params, const GridSpec& grid,
                                std::uint64_t seed) {
    require_valid(params);
    const bool erlang = params.kernel.kind == KernelKind::Erlang;
    const long n = grid.steps;
    const detail::StepConstants c(params, grid.step());

    ChainPath path;
    path.grid = grid;
    path.l_values.resize(static_cast<std::size_t>(n) + 1);
    path.a_values.assign(static_cast<std::size_t>(n) + 1, 0.0);
    path.jump_flags.resize(static_cast<std::size_t>(n));
    path.marks.resize(static_cast<std::size_t>(n));

    SplitMix64 rng(seed);
    double l = params.x0, a = 0.0;
    path.l_values[0] = l;
    for (long k = 0; k < n; ++k) {
        const double u = rng.next_double();
        const double zeta = params.marks.sample(rng);
        const bool jump = u < l * c.h;
        if (erlang)
            detail::advance_erlang(l, a, jump, zeta, c);
        else
            l = detail::advance_exponential(l, jump, zeta, c);
        path.l_values[static_cast<std::size_t>(k) + 1] = l;
        path.a_values[static_cast<std::size_t>(k) + 1] = a;
        path.jump_flags[static_cast<std::size_t>(k)] = jump ? 1 : 0;
        path.marks[static_cast<std::size_t>(k)] = zeta;
    }
    return path;
}

// Streaming record for long grids: keeps the jump skeleton and the chain
// state at requested sample times instead of full arrays. Consumes the
// random stream exactly as simulate_chain does.
struct SparseChainRecord {
    GridSpec grid;
    std::vector<long> jump_steps;
    std::vector<double> jump_marks;
    std::vector<double> sample_times;               // as requested, sorted
    std::vector<ChainState> sample_states;          // chain state at floor(N*t/T)
};

namespace detail {

// Grid index of the piecewise-constant path at time t: floor(steps*t/T),
// snapped to the nearest integer when t is within relative 1e-12 of a grid
// point (so canonical grid times i*T/steps map to index i despite rounding).
inline long path_index(const GridSpec& grid, double t) {
    if (!(t >= 0.0 && t <= grid.horizon))
        throw std::out_of_range("time outside [0, horizon]");
    const double r = static_cast<double>(grid.steps) * t / grid.horizon;
    const double nearest = std::round(r);
    long idx;
    if (std::abs(r - nearest) <= 1e-12 * (1.0 + std::abs(nearest)))
        idx = static_cast<long>(nearest);
    else
        idx = static_cast<long>(std::floor(r));
    if (idx < 0) idx = 0;
    if (idx > grid.steps) idx = grid.steps;
    return idx;
}

} // namespace detail

inline SparseChainRecord simulate_chain_sparse(const HawkesParams& params,
                                               const GridSpec& grid,
                                               std::uint64_t seed,
                                               std::span<const double> sample_times) {
    require_valid(params);
    const bool erlang = params.kernel.kind == KernelKind::Erlang;
    const long n = grid.steps;
    const detail::StepConstants c(params, grid.step());

    SparseChainRecord rec;
    rec.grid = grid;
    rec.sample_times.assign(sample_times.begin(), sample_times.end());
    std::vector<long> wanted;
    wanted.reserve(rec.sample_times.size());
    for (double t : rec.sample_times) wanted.push_back(detail::path_index(grid, t));
    rec.sample_states.resize(rec.sample_times.size());

    SplitMix64 rng(seed);
    double l = params.x0, a = 0.0;
    for (std::size_t i = 0; i < wanted.size(); ++i)
        if (wanted[i] == 0) rec.sample_states[i] = {l, a, 0};
    for (long k = 0; k < n; ++k) {
        const double u = rng.next_double();
        const double zeta = params.marks.sample(rng);
        const bool jump = u < l * c.h;
        if (erlang)
            detail::advance_erlang(l, a, jump, zeta, c);
        else
            l = detail::advance_exponential(l, jump, zeta, c);
        if (jump) {
            rec.jump_steps.push_back(k);
            rec.jump_marks.push_back(zeta);
        }
        for (std::size_t i = 0; i < wanted.size(); ++i)
            if (wanted[i] == k + 1) rec.sample_states[i] = {l, a, k + 1};
    }
    return rec;
}

// Value of the piecewise-constant path at time t: (lambda, xi) at grid
// index floor(steps*t/T). Right-continuous by construction.
inline std::pair<double, double> path_value(const ChainPath& path, double t) {
    const long idx = detail::path_index(path.grid, t);
    return {path.l_values[static_cast<std::size_t>(idx)],
            path.a_values[static_cast<std::size_t>(idx)]};
}

// Cumulative loss path: the intensity chain's jump skeleton is all that is
// needed to rebuild the compound loss.
inline LossPath reconstruct_loss(const ChainPath& path) {
    LossPath loss;
    loss.grid = path.grid;
    loss.cumulative.resize(path.l_values.size());
    loss.cumulative[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < path.jump_flags.size(); ++k) {
        if (path.jump_flags[k]) {
            acc += path.marks[k];
            loss.event_steps.push_back(static_cast<long>(k));
            loss.event_marks.push_back(path.marks[k]);
        }
        loss.cumulative[k + 1] = acc;
    }
    return loss;
}

// Replays the recursion from the stored flags and marks; true iff every
// stored value is reproduced bit for bit.
inline bool replay_matches(const ChainPath& path, const HawkesParams& params) {
    const bool erlang = params.kernel.kind == KernelKind::Erlang;
    const detail::StepConstants c(params, path.grid.step());
    double l = path.l_values[0], a = path.a_values[0];
    for (std::size_t k = 0; k < path.jump_flags.size(); ++k) {
        const bool jump = path.jump_flags[k] != 0;
        if (erlang)
            detail::advance_erlang(l, a, jump, path.marks[k], c);
        else
            l = detail::advance_exponential(l, jump, path.marks[k], c);
        if (l != path.l_values[k + 1] || a != path.a_values[k + 1]) return false;
    }
    return true;
}

} // namespace hawkesdt
