#pragma once

#include <array>
#include <cmath>

#include "hawkesdt/params.hpp"

namespace hawkesdt {

// First-moment formulas for the intensity and the event count.
//
// Exponential kernel: E[lambda_t] solves the scalar linear ODE
//   d/dt E[lambda] = beta*(lambda_inf - E[lambda]) + alpha*m*E[lambda],
// (m = mean mark) giving the closed forms used below.
//
// Erlang kernel: taking expectations in the (lambda, xi) dynamics gives
//   d/dt E[lambda] = beta*(lambda_inf - E[lambda]) + E[xi],
//   d/dt E[xi]     = -beta*E[xi] + alpha*m*E[lambda],
// which is integrated numerically (fixed-step RK4).

struct MomentState {
    double lambda_mean = 0.0;
    double xi_mean = 0.0;    // zero for the exponential kernel
    double count_mean = 0.0; // E[H_t] = integral of E[lambda]
};

// Long-run mean intensity (exponential kernel): beta*lambda_inf/(beta - alpha*m).
inline double stationary_mean_intensity(const HawkesParams& params) {
    require_valid(params);
    require_kernel(params, KernelKind::Exponential);
    const double m = params.marks.mean();
    return params.kernel.beta * params.lambda_inf /
           (params.kernel.beta - params.kernel.alpha * m);
}

namespace detail {

// RK4 on the linear moment system, augmented with the running integral of
// E[lambda]. Step count fixed at 1e4 (step = 1e-4 * t).
inline MomentState erlang_moment_rk4(const HawkesParams& params, double t) {
    const double beta = params.kernel.beta;
    const double li = params.lambda_inf;
    const double am = params.kernel.alpha * params.marks.mean();

    using Vec = std::array<double, 3>; // (E[lambda], E[xi], E[H])
    auto rhs = [&](const Vec& y) -> Vec {
        return {beta * (li - y[0]) + y[1], -beta * y[1] + am * y[0], y[0]};
    };
    Vec y{params.x0, 0.0, 0.0};
    if (t == 0.0) return {y[0], y[1], y[2]};

    const long n = 10000;
    const double h = t / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
        const Vec k1 = rhs(y);
        Vec tmp;
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        const Vec k2 = rhs(tmp);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        const Vec k3 = rhs(tmp);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + h * k3[j];
        const Vec k4 = rhs(tmp);
        for (int j = 0; j < 3; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return {y[0], y[1], y[2]};
}

} // namespace detail

inline MomentState moment_state(const HawkesParams& params, double t) {
    require_valid(params);
    if (!(std::isfinite(t) && t >= 0.0))
        throw std::invalid_argument("time must be finite and >= 0");

    if (params.kernel.kind == KernelKind::Erlang)
        return detail::erlang_moment_rk4(params, t);

    const double m = params.marks.mean();
    const double kappa = params.kernel.beta - params.kernel.alpha * m;
    const double mu_star = params.kernel.beta * params.lambda_inf / kappa;
    const double dev = params.x0 - mu_star;
    MomentState s;
    s.lambda_mean = mu_star + dev * std::exp(-kappa * t);
    s.xi_mean = 0.0;
    s.count_mean = mu_star * t + dev * (1.0 - std::exp(-kappa * t)) / kappa;
    return s;
}

// E[lambda_t]
inline double mean_intensity(const HawkesParams& params, double t) {
    return moment_state(params, t).lambda_mean;
}

// E[H_t] (expected number of events in [0, t])
inline double mean_count(const HawkesParams& params, double t) {
    return moment_state(params, t).count_mean;
}

} // namespace hawkesdt
