#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hawkesdt/rng.hpp"

namespace hawkesdt {

enum class KernelKind { Exponential, Erlang };

// Decay kernel of the intensity: alpha*exp(-beta*u) (Exponential) or
// alpha*u*exp(-beta*u) (Erlang).
struct KernelSpec {
    KernelKind kind = KernelKind::Exponential;
    double alpha = 1.0; // excitation scale, > 0
    double beta = 1.0;  // decay rate, > 0
};

// Distribution of the marks (loss sizes) attached to events. Marks are
// i.i.d., strictly positive, with finite mean.
class MarkDistribution {
  public:
    enum class Kind { Constant, ExponentialRate, Empirical };

    static MarkDistribution constant(double value) {
        require(std::isfinite(value) && value > 0.0,
                "constant mark must be finite and > 0");
        MarkDistribution d;
        d.kind_ = Kind::Constant;
        d.param_ = value;
        return d;
    }

    static MarkDistribution exponential_rate(double rate) {
        require(std::isfinite(rate) && rate > 0.0,
                "exponential mark rate must be finite and > 0");
        MarkDistribution d;
        d.kind_ = Kind::ExponentialRate;
        d.param_ = rate;
        return d;
    }

    // Resamples uniformly with replacement from the given values; the mean
    // is the sample mean.
    static MarkDistribution empirical(std::vector<double> samples) {
        require(!samples.empty(), "empirical marks need at least one sample");
        for (double s : samples)
            require(std::isfinite(s) && s > 0.0,
                    "empirical mark samples must be finite and > 0");
        MarkDistribution d;
        d.kind_ = Kind::Empirical;
        d.samples_ = std::move(samples);
        return d;
    }

    Kind kind() const { return kind_; }

    double mean() const {
        switch (kind_) {
        case Kind::Constant:
            return param_;
        case Kind::ExponentialRate:
            return 1.0 / param_;
        case Kind::Empirical: {
            double s = 0.0;
            for (double v : samples_) s += v;
            return s / static_cast<double>(samples_.size());
        }
        }
        return 0.0; // unreachable
    }

    // Draws one mark; always strictly positive.
    double sample(SplitMix64& rng) const {
        switch (kind_) {
        case Kind::Constant:
            return param_;
        case Kind::ExponentialRate:
            return -std::log(rng.next_double_open()) / param_;
        case Kind::Empirical: {
            const auto n = samples_.size();
            auto idx = static_cast<std::size_t>(rng.next_double() *
                                                static_cast<double>(n));
            if (idx >= n) idx = n - 1;
            return samples_[idx];
        }
        }
        return 0.0; // unreachable
    }

    // Parameter of the Constant / ExponentialRate variants.
    double param() const { return param_; }
    const std::vector<double>& samples() const { return samples_; }

  private:
    static void require(bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(what);
    }

    Kind kind_ = Kind::Constant;
    double param_ = 1.0;
    std::vector<double> samples_;
};

struct HawkesParams {
    KernelSpec kernel;
    double lambda_inf = 1.0; // baseline intensity, > 0
    double x0 = 1.0;         // initial intensity, >= 0
    MarkDistribution marks = MarkDistribution::constant(1.0);
};

// Uniform time grid on [0, horizon] with `steps` intervals. The step size
// is always derived as horizon/steps so it cannot drift from the horizon.
struct GridSpec {
    double horizon = 1.0;
    long steps = 1;

    GridSpec() = default;
    GridSpec(double horizon_, long steps_) : horizon(horizon_), steps(steps_) {
        if (!(std::isfinite(horizon) && horizon > 0.0))
            throw std::invalid_argument("grid horizon must be finite and > 0");
        if (steps < 1)
            throw std::invalid_argument("grid needs at least one step");
    }

    double step() const { return horizon / static_cast<double>(steps); }
    double time_at(long i) const {
        return static_cast<double>(i) * horizon / static_cast<double>(steps);
    }
};

// Stability threshold on alpha*E[mark]: beta for the exponential kernel,
// beta^2 for the Erlang kernel.
inline double stability_bound(const KernelSpec& kernel) {
    return kernel.kind == KernelKind::Exponential ? kernel.beta
                                                  : kernel.beta * kernel.beta;
}

struct ValidationResult {
    enum class Error { None, NonPositiveParameter, Unstable };

    bool ok = true;
    Error error = Error::None;
    std::string message;
    std::vector<std::string> warnings;
};

inline ValidationResult validate(const HawkesParams& params) {
    ValidationResult r;
    auto fail = [&](ValidationResult::Error e, std::string msg) {
        r.ok = false;
        r.error = e;
        r.message = std::move(msg);
    };

    // alpha = 0 is accepted as the Poisson degenerate case (no excitation).
    if (!(std::isfinite(params.kernel.alpha) && params.kernel.alpha >= 0.0)) {
        fail(ValidationResult::Error::NonPositiveParameter,
             "alpha must be finite and >= 0");
        return r;
    }
    if (params.kernel.alpha == 0.0)
        r.warnings.push_back("alpha = 0: process degenerates to a "
                             "(in)homogeneous Poisson process");
    if (!(std::isfinite(params.kernel.beta) && params.kernel.beta > 0.0)) {
        fail(ValidationResult::Error::NonPositiveParameter,
             "beta must be finite and > 0");
        return r;
    }
    if (!(std::isfinite(params.lambda_inf) && params.lambda_inf > 0.0)) {
        fail(ValidationResult::Error::NonPositiveParameter,
             "lambda_inf must be finite and > 0");
        return r;
    }
    if (!(std::isfinite(params.x0) && params.x0 >= 0.0)) {
        fail(ValidationResult::Error::NonPositiveParameter,
             "x0 must be finite and >= 0");
        return r;
    }
    if (params.x0 == 0.0)
        r.warnings.push_back("x0 = 0: degenerate initial intensity");

    const double mean_mark = params.marks.mean();
    if (!(std::isfinite(mean_mark) && mean_mark > 0.0)) {
        fail(ValidationResult::Error::NonPositiveParameter,
             "mark distribution mean must be finite and > 0");
        return r;
    }

    const double load = params.kernel.alpha * mean_mark;
    const double bound = stability_bound(params.kernel);
    if (!(load < bound)) { // strict inequality; the boundary is unstable
        fail(ValidationResult::Error::Unstable,
             "stability violated: alpha*E[mark] = " + std::to_string(load) +
                 " must be < " + std::to_string(bound));
        return r;
    }
    return r;
}

inline void require_valid(const HawkesParams& params) {
    const ValidationResult r = validate(params);
    if (!r.ok) throw std::invalid_argument("invalid Hawkes parameters: " + r.message);
}

inline void require_kernel(const HawkesParams& params, KernelKind kind) {
    if (params.kernel.kind != kind)
        throw std::invalid_argument("operation requires the other kernel variant");
}

} // namespace hawkesdt
