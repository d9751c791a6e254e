#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hawkesdt/params.hpp"
#include "hawkesdt/quadrature.hpp"
#include "hawkesdt/rng.hpp"
#include "hawkesdt/test_functions.hpp"

namespace hawkesdt {

// Numerical realization of the transition machinery: the infinitesimal
// generators of the limiting intensity process, the one-step transition
// operators of the chain, and the sup-norm distance between the two that
// the convergence experiments track.

// Expectation against the mark distribution, as a fixed node/weight rule:
//  - Constant marks: a single point mass (exact).
//  - ExponentialRate marks: composite Gauss-Legendre after the CDF
//    substitution u = 1 - exp(-r z), so the expectation becomes
//    int_0^1 g(-log(1-u)/r) du. Plain Gauss-Laguerre stalls at percent-level
//    error here: the test functions are compactly supported near the origin
//    while the Laguerre nodes spread out to z ~ 4n. The transformed rule's
//    weights sum to 1 exactly, which keeps the operators conservative to
//    machine precision.
//  - Empirical marks: the sample average (nu is the empirical measure).
//  - Monte Carlo: fixed-seed draws, available for any distribution.
class MarkIntegrator {
  public:
    static MarkIntegrator for_marks(const MarkDistribution& marks, int n_nodes = 512) {
        MarkIntegrator mi;
        switch (marks.kind()) {
        case MarkDistribution::Kind::Constant:
            mi.nodes_ = {marks.param()};
            mi.weights_ = {1.0};
            break;
        case MarkDistribution::Kind::ExponentialRate: {
            const int panels = std::max(1, n_nodes / 16);
            const double rate = marks.param();
            for (int p = 0; p < panels; ++p) {
                const double a = static_cast<double>(p) / panels;
                const double b = static_cast<double>(p + 1) / panels;
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                for (std::size_t i = 0; i < detail::kGl16Nodes.size(); ++i) {
                    for (double sign : {-1.0, 1.0}) {
                        const double u = mid + sign * half * detail::kGl16Nodes[i];
                        mi.nodes_.push_back(-std::log1p(-u) / rate);
                        mi.weights_.push_back(half * detail::kGl16Weights[i]);
                    }
                }
            }
            break;
        }
        case MarkDistribution::Kind::Empirical: {
            mi.nodes_ = marks.samples();
            mi.weights_.assign(mi.nodes_.size(), 1.0 / static_cast<double>(mi.nodes_.size()));
            break;
        }
        }
        return mi;
    }

    static MarkIntegrator monte_carlo(const MarkDistribution& marks, int n_samples,
                                      std::uint64_t seed) {
        if (n_samples < 1) throw std::invalid_argument("monte_carlo: n_samples < 1");
        MarkIntegrator mi;
        SplitMix64 rng(seed);
        mi.nodes_.reserve(static_cast<std::size_t>(n_samples));
        for (int i = 0; i < n_samples; ++i) mi.nodes_.push_back(marks.sample(rng));
        mi.weights_.assign(mi.nodes_.size(), 1.0 / static_cast<double>(n_samples));
        return mi;
    }

    template <class G>
    double expect(G&& g) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * g(nodes_[i]);
        return sum;
    }

    double largest_node() const {
        double m = 0.0;
        for (double x : nodes_) m = std::max(m, x);
        return m;
    }

  private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

struct OperatorConfig {
    MarkIntegrator marks = MarkIntegrator::for_marks(MarkDistribution::constant(1.0));
    double y_max = 10.0;   // sup-grid upper bound (before branch extension)
    int grid_points = 10000;
};

// Default config for a test-function support bound: the grid must cover
// every state from which the no-jump or jump image can land inside the
// support, hence bound + alpha*(largest mark node) + lambda_inf + 1.
inline OperatorConfig make_operator_config(const HawkesParams& params,
                                           double support_bound, int n_nodes = 512,
                                           int grid_points = 10000) {
    OperatorConfig cfg;
    cfg.marks = MarkIntegrator::for_marks(params.marks, n_nodes);
    cfg.y_max = support_bound + params.kernel.alpha * cfg.marks.largest_node() +
                params.lambda_inf + 1.0;
    cfg.grid_points = grid_points;
    return cfg;
}

// Generator of the exponential-kernel intensity:
//   A f(y) = beta*(lambda_inf - y) f'(y) + y * int (f(y + alpha z) - f(y)) dnu(z)
inline double generator_exp(const TestFunction1& f, double y, const HawkesParams& params,
                            const OperatorConfig& cfg) {
    require_valid(params);
    require_kernel(params, KernelKind::Exponential);
    if (!(y >= 0.0)) throw std::invalid_argument("state must be >= 0");
    const double alpha = params.kernel.alpha;
    const double fy = f.f(y);
    const double drift = params.kernel.beta * (params.lambda_inf - y) * f.d1(y);
    const double jump = y * cfg.marks.expect([&](double z) { return f.f(y + alpha * z) - fy; });
    return drift + jump;
}

// Generator of the Erlang-kernel pair (lambda, xi):
//   A f(y,v) = (v + beta*(lambda_inf - y)) df/dlambda - beta*v df/dxi
//              + y * int (f(y, v + alpha z) - f(y, v)) dnu(z)
inline double generator_erlang(const TestFunction2& f, double y, double v,
                               const HawkesParams& params, const OperatorConfig& cfg) {
    require_valid(params);
    require_kernel(params, KernelKind::Erlang);
    if (!(y >= 0.0 && v >= 0.0)) throw std::invalid_argument("state must be >= 0");
    const double alpha = params.kernel.alpha;
    const double fyv = f.f(y, v);
    const double drift = (v + params.kernel.beta * (params.lambda_inf - y)) * f.dx(y, v) -
                         params.kernel.beta * v * f.dy(y, v);
    const double jump =
        y * cfg.marks.expect([&](double z) { return f.f(y, v + alpha * z) - fyv; });
    return drift + jump;
}

// One-step transition operator of the exponential chain, in closed form:
//   T f(y) = f(relax + y E) (1 - yh) 1{yh<1}
//          + [int f(relax + (y + alpha z) E) dnu(z)] (yh 1{yh<1} + 1{yh>=1})
// with E = exp(-beta h), relax = lambda_inf (1 - E).
inline double one_step_exp(const TestFunction1& f, double y, double h,
                           const HawkesParams& params, const OperatorConfig& cfg) {
    require_valid(params);
    require_kernel(params, KernelKind::Exponential);
    if (!(y >= 0.0)) throw std::invalid_argument("state must be >= 0");
    if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
    const double alpha = params.kernel.alpha;
    const double decay = std::exp(-params.kernel.beta * h);
    const double relax = params.lambda_inf * (1.0 - decay);
    const double jump_term =
        cfg.marks.expect([&](double z) { return f.f(relax + (y + alpha * z) * decay); });
    const double yh = y * h;
    if (yh >= 1.0) return jump_term;
    return f.f(relax + y * decay) * (1.0 - yh) + jump_term * yh;
}

// Erlang analogue; the jump lands in the auxiliary coordinate and feeds the
// intensity through the a'*h term:
//   no-jump image: (relax + yE + vhE, vE)
//   jump image:    (relax + yE + h(v + alpha z)E, (v + alpha z)E)
inline double one_step_erlang(const TestFunction2& f, double y, double v, double h,
                              const HawkesParams& params, const OperatorConfig& cfg) {
    require_valid(params);
    require_kernel(params, KernelKind::Erlang);
    if (!(y >= 0.0 && v >= 0.0)) throw std::invalid_argument("state must be >= 0");
    if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
    const double alpha = params.kernel.alpha;
    const double decay = std::exp(-params.kernel.beta * h);
    const double relax = params.lambda_inf * (1.0 - decay);
    const double jump_term = cfg.marks.expect([&](double z) {
        const double a_next = (v + alpha * z) * decay;
        return f.f(relax + y * decay + h * a_next, a_next);
    });
    const double yh = y * h;
    if (yh >= 1.0) return jump_term;
    return f.f(relax + y * decay + v * h * decay, v * decay) * (1.0 - yh) + jump_term * yh;
}

struct SupNormResult {
    double value = 0.0;
    double arg_y = 0.0;
    double arg_v = 0.0; // Erlang only
};

namespace detail {

// The sup grid reaches past y_max only when the branch boundary y = 1/h
// falls inside the covered region; beyond max(y_max, 1/h + 1) both the
// scaled difference and the generator vanish for compactly supported f.
inline double sup_grid_max(double y_max, double h) {
    const double boundary = 1.0 / h;
    return boundary <= y_max ? std::max(y_max, boundary + 1.0) : y_max;
}

} // namespace detail

// max over the grid of |(T^N f - f)/h - A f| for the exponential kernel.
inline SupNormResult generator_convergence_norm(const TestFunction1& f,
                                                const HawkesParams& params, long n_steps,
                                                double horizon,
                                                const OperatorConfig& cfg) {
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    const double h = horizon / static_cast<double>(n_steps);
    const double g_max = detail::sup_grid_max(cfg.y_max, h);
    const int m = cfg.grid_points;
    SupNormResult best;
    for (int i = 0; i < m; ++i) {
        const double y = g_max * static_cast<double>(i) / static_cast<double>(m - 1);
        const double scaled = (one_step_exp(f, y, h, params, cfg) - f.f(y)) / h;
        const double err = std::abs(scaled - generator_exp(f, y, params, cfg));
        if (err > best.value) {
            best.value = err;
            best.arg_y = y;
        }
    }
    return best;
}

// Erlang version: the grid is the tensor square of ~sqrt(M) points per axis.
inline SupNormResult generator_convergence_norm(const TestFunction2& f,
                                                const HawkesParams& params, long n_steps,
                                                double horizon,
                                                const OperatorConfig& cfg) {
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    const double h = horizon / static_cast<double>(n_steps);
    const double g_max = detail::sup_grid_max(cfg.y_max, h);
    const int side = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(cfg.grid_points))));
    SupNormResult best;
    for (int i = 0; i < side; ++i) {
        const double y = g_max * static_cast<double>(i) / static_cast<double>(side - 1);
        for (int j = 0; j < side; ++j) {
            const double v = g_max * static_cast<double>(j) / static_cast<double>(side - 1);
            const double scaled = (one_step_erlang(f, y, v, h, params, cfg) - f.f(y, v)) / h;
            const double err = std::abs(scaled - generator_erlang(f, y, v, params, cfg));
            if (err > best.value) {
                best.value = err;
                best.arg_y = y;
                best.arg_v = v;
            }
        }
    }
    return best;
}

} // namespace hawkesdt
