#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkesdt {

struct SampleMeta {
    std::string params_digest;
    std::string source; // grid size as text, or "exact"
    double t = 0.0;
    std::uint64_t seed = 0;
};

struct SampleSet {
    std::vector<double> values;
    std::string label;
    SampleMeta meta;
};

inline SampleSet make_sample_set(std::vector<double> values, std::string label,
                                 SampleMeta meta = {}) {
    if (values.empty()) throw std::invalid_argument("sample set must be nonempty");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("sample set must be finite");
    return {std::move(values), std::move(label), std::move(meta)};
}

// Survival function of the Kolmogorov distribution,
// Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_survival(double x) {
    if (x < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 128; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double pvalue = 1.0;
};

// Two-sample Kolmogorov-Smirnov: sup distance between the empirical CDFs,
// asymptotic p-value with effective sample size n*m/(n+m). Values within
// relative 1e-9 of each other count as tied and both CDFs advance through
// them before comparing. The laws compared here share genuine atoms (e.g.
// the no-event path value), and the two samplers reach the same atom
// through different arithmetic; without the tolerance a 1e-12 rounding gap
// between the two representations would register as a full atom-sized
// separation.
inline KsResult ks_two_sample(const SampleSet& a, const SampleSet& b) {
    const std::size_t n = a.values.size(), m = b.values.size();
    if (n < 100 || m < 100)
        throw std::invalid_argument("ks_two_sample: need at least 100 samples per set");
    std::vector<double> x = a.values, y = b.values;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double v = std::min(x[i], y[j]);
        const double edge = v + 1e-9 * (1.0 + std::abs(v));
        while (i < n && x[i] <= edge) ++i;
        while (j < m && y[j] <= edge) ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(n);
        const double fb = static_cast<double>(j) / static_cast<double>(m);
        d = std::max(d, std::abs(fa - fb));
    }
    const double n_eff = static_cast<double>(n) * static_cast<double>(m) /
                         static_cast<double>(n + m);
    return {d, kolmogorov_survival(std::sqrt(n_eff) * d)};
}

// Empirical 1-Wasserstein distance: mean absolute difference of sorted
// samples. Unequal sizes are reduced to the smaller size by taking evenly
// spaced order statistics of the larger (deterministic, symmetric).
inline double wasserstein1(const SampleSet& a, const SampleSet& b) {
    if (a.values.size() < 100 || b.values.size() < 100)
        throw std::invalid_argument("wasserstein1: need at least 100 samples per set");
    std::vector<double> x = a.values, y = b.values;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x.size() > y.size()) x.swap(y);
    const std::size_t n = x.size(), m = y.size();
    double sum = 0.0;
    if (n == m) {
        for (std::size_t i = 0; i < n; ++i) sum += std::abs(x[i] - y[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto j = static_cast<std::size_t>((static_cast<double>(i) + 0.5) *
                                              static_cast<double>(m) /
                                              static_cast<double>(n));
            if (j >= m) j = m - 1;
            sum += std::abs(x[i] - y[j]);
        }
    }
    return sum / static_cast<double>(n);
}

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    const double mu = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

inline double standard_error(const std::vector<double>& v) {
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

} // namespace hawkesdt
