#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hawkesdt/params.hpp"
#include "hawkesdt/rng.hpp"

namespace hawkesdt {

// Continuous-time samplers for the limiting Hawkes process. These draw the
// jump times themselves (no grid, no discretization error) and are the
// ground truth the discrete-time chain is tested against.

struct EventRecord {
    std::vector<double> times; // strictly increasing, in (0, horizon]
    std::vector<double> marks; // same length, all > 0
    double horizon = 0.0;
};

struct ProcessState {
    double lambda = 0.0;
    double xi = 0.0;   // Erlang auxiliary value; 0 for the exponential kernel
    double loss = 0.0; // cumulative loss
};

// Exponential kernel, exact inter-arrival sampling. Between events the
// intensity is lambda_inf + (lam - lambda_inf)*exp(-beta*u), and the next
// waiting time splits into a baseline part (rate lambda_inf) and an
// excess part whose survival function inverts in closed form:
//   D  = 1 + beta*log(U)/(lam - lambda_inf)
//   S1 = -log(D)/beta   if D > 0, else +inf.
// When the current intensity sits below the baseline (possible only while
// x0 < lambda_inf, before the first event) the split does not apply and the
// waiting time is drawn by thinning under the constant bound lambda_inf,
// which dominates the intensity on that stretch. Both routes are exact.
inline EventRecord exact_exponential(const HawkesParams& params, double horizon,
                                     std::uint64_t seed) {
    require_valid(params);
    require_kernel(params, KernelKind::Exponential);
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");

    const double beta = params.kernel.beta;
    const double li = params.lambda_inf;
    const double inf = std::numeric_limits<double>::infinity();

    EventRecord rec;
    rec.horizon = horizon;
    SplitMix64 rng(seed);
    double lam = params.x0; // intensity just after the last renewal point
    double s = 0.0;

    while (true) {
        double wait;
        if (lam > li) {
            const double d = 1.0 + beta * std::log(rng.next_double_open()) / (lam - li);
            const double s1 = d > 0.0 ? -std::log(d) / beta : inf;
            const double s2 = -std::log(rng.next_double_open()) / li;
            wait = std::min(s1, s2);
        } else if (lam == li) {
            wait = -std::log(rng.next_double_open()) / li;
        } else {
            double acc = 0.0;
            while (true) {
                acc += -std::log(rng.next_double_open()) / li;
                if (s + acc > horizon) break;
                const double cur = li + (lam - li) * std::exp(-beta * acc);
                if (rng.next_double() * li < cur) break;
            }
            wait = acc;
        }
        s += wait;
        if (s > horizon) break;
        const double zeta = params.marks.sample(rng);
        lam = li + (lam - li) * std::exp(-beta * wait) + params.kernel.alpha * zeta;
        rec.times.push_back(s);
        rec.marks.push_back(zeta);
    }
    return rec;
}

// Erlang kernel, Ogata-style thinning. Between events the pair flows as
//   xi_u     = xi * exp(-beta*u)
//   lambda_u = lambda_inf + (lam - lambda_inf)*exp(-beta*u) + xi*u*exp(-beta*u)
// and since sup_{u>=0} u*exp(-beta*u) = 1/(e*beta), the rate
//   B = lambda_inf + max(lam - lambda_inf, 0) + xi/(e*beta)
// dominates the whole future flow from the current state. The bound is
// refreshed after every proposal, accepted or rejected.
inline EventRecord thinning_erlang(const HawkesParams& params, double horizon,
                                   std::uint64_t seed) {
    require_valid(params);
    require_kernel(params, KernelKind::Erlang);
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");

    const double beta = params.kernel.beta;
    const double li = params.lambda_inf;
    const double inv_ebeta = 1.0 / (std::exp(1.0) * beta);

    EventRecord rec;
    rec.horizon = horizon;
    SplitMix64 rng(seed);
    double lam = params.x0, xi = 0.0, s = 0.0;

    while (true) {
        const double bound = li + std::max(lam - li, 0.0) + xi * inv_ebeta;
        const double wait = -std::log(rng.next_double_open()) / bound;
        if (s + wait > horizon) break;
        const double decay = std::exp(-beta * wait);
        const double lam_new = li + (lam - li) * decay + xi * wait * decay;
        const double ratio = lam_new / bound;
        if (!(ratio > 0.0 && ratio <= 1.0 + 1e-12))
            throw std::logic_error("thinning bound violated: acceptance ratio " +
                                   std::to_string(ratio));
        s += wait;
        lam = lam_new;
        xi *= decay;
        if (rng.next_double() < ratio) {
            const double zeta = params.marks.sample(rng);
            xi += params.kernel.alpha * zeta; // lambda itself does not jump
            rec.times.push_back(s);
            rec.marks.push_back(zeta);
        }
    }
    return rec;
}

// State of the limiting process at time t, recomputed from scratch from the
// event record. Cadlag convention: an event exactly at t is included.
inline ProcessState state_at(const EventRecord& rec, const HawkesParams& params,
                             double t) {
    require_valid(params);
    if (!(t >= 0.0 && t <= rec.horizon))
        throw std::out_of_range("time outside [0, horizon]");

    const double beta = params.kernel.beta;
    const double alpha = params.kernel.alpha;
    ProcessState st;
    st.lambda = params.lambda_inf + (params.x0 - params.lambda_inf) * std::exp(-beta * t);

    if (params.kernel.kind == KernelKind::Exponential) {
        for (std::size_t i = 0; i < rec.times.size() && rec.times[i] <= t; ++i) {
            st.lambda += alpha * std::exp(-beta * (t - rec.times[i])) * rec.marks[i];
            st.loss += rec.marks[i];
        }
    } else {
        for (std::size_t i = 0; i < rec.times.size() && rec.times[i] <= t; ++i) {
            const double age = t - rec.times[i];
            const double decayed = alpha * std::exp(-beta * age) * rec.marks[i];
            st.lambda += age * decayed;
            st.xi += decayed;
            st.loss += rec.marks[i];
        }
    }
    return st;
}

} // namespace hawkesdt
