#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hawkesdt/chain.hpp"
#include "hawkesdt/exact.hpp"
#include "hawkesdt/experiment.hpp"
#include "hawkesdt/params.hpp"

namespace hawkesdt {

// JSON parameter schema (exact field names, unknown fields rejected):
//   {"kernel": "exp"|"erlang", "alpha": a, "beta": b,
//    "lambda_inf": l, "x0": x,
//    "marks": {"type": "constant", "value": c}
//           | {"type": "exponential", "rate": r}
//           | {"type": "empirical", "samples": [..]}}

namespace detail {

inline void reject_unknown_fields(const nlohmann::json& j,
                                  const std::vector<std::string>& allowed,
                                  const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& key : allowed)
            if (it.key() == key) ok = true;
        if (!ok)
            throw std::invalid_argument(where + ": unknown field \"" + it.key() + "\"");
    }
}

inline double get_number(const nlohmann::json& j, const std::string& key,
                         const std::string& where) {
    if (!j.contains(key))
        throw std::invalid_argument(where + ": missing field \"" + key + "\"");
    if (!j.at(key).is_number())
        throw std::invalid_argument(where + ": field \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

} // namespace detail

inline MarkDistribution marks_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw std::invalid_argument("marks: expected an object with a \"type\" string");
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        detail::reject_unknown_fields(j, {"type", "value"}, "marks");
        return MarkDistribution::constant(detail::get_number(j, "value", "marks"));
    }
    if (type == "exponential") {
        detail::reject_unknown_fields(j, {"type", "rate"}, "marks");
        return MarkDistribution::exponential_rate(detail::get_number(j, "rate", "marks"));
    }
    if (type == "empirical") {
        detail::reject_unknown_fields(j, {"type", "samples"}, "marks");
        if (!j.contains("samples") || !j.at("samples").is_array())
            throw std::invalid_argument("marks: \"samples\" must be an array");
        std::vector<double> samples;
        for (const auto& v : j.at("samples")) {
            if (!v.is_number())
                throw std::invalid_argument("marks: samples must be numbers");
            samples.push_back(v.get<double>());
        }
        return MarkDistribution::empirical(std::move(samples));
    }
    throw std::invalid_argument("marks: unknown type \"" + type + "\"");
}

inline HawkesParams params_from_json(const nlohmann::json& j) {
    detail::reject_unknown_fields(
        j, {"kernel", "alpha", "beta", "lambda_inf", "x0", "marks"}, "params");
    if (!j.contains("kernel") || !j.at("kernel").is_string())
        throw std::invalid_argument("params: missing \"kernel\" string");
    const std::string kernel = j.at("kernel").get<std::string>();
    HawkesParams p;
    if (kernel == "exp")
        p.kernel.kind = KernelKind::Exponential;
    else if (kernel == "erlang")
        p.kernel.kind = KernelKind::Erlang;
    else
        throw std::invalid_argument("params: kernel must be \"exp\" or \"erlang\"");
    p.kernel.alpha = detail::get_number(j, "alpha", "params");
    p.kernel.beta = detail::get_number(j, "beta", "params");
    p.lambda_inf = detail::get_number(j, "lambda_inf", "params");
    p.x0 = detail::get_number(j, "x0", "params");
    if (!j.contains("marks"))
        throw std::invalid_argument("params: missing field \"marks\"");
    p.marks = marks_from_json(j.at("marks"));
    return p;
}

inline nlohmann::json marks_to_json(const MarkDistribution& marks) {
    switch (marks.kind()) {
    case MarkDistribution::Kind::Constant:
        return {{"type", "constant"}, {"value", marks.param()}};
    case MarkDistribution::Kind::ExponentialRate:
        return {{"type", "exponential"}, {"rate", marks.param()}};
    case MarkDistribution::Kind::Empirical:
        return {{"type", "empirical"}, {"samples", marks.samples()}};
    }
    return {};
}

inline nlohmann::json params_to_json(const HawkesParams& p) {
    return {{"kernel", p.kernel.kind == KernelKind::Exponential ? "exp" : "erlang"},
            {"alpha", p.kernel.alpha},
            {"beta", p.kernel.beta},
            {"lambda_inf", p.lambda_inf},
            {"x0", p.x0},
            {"marks", marks_to_json(p.marks)}};
}

// FNV-1a 64-bit hash, hex-encoded; used as a short config digest.
inline std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string params_digest(const HawkesParams& p) {
    return fnv1a_hex(params_to_json(p).dump());
}

// Shortest-round-trip style float text: 17 significant digits.
inline std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Trajectory CSV, one row per grid point. The jump column flags the step
// that begins at the row's time (always 0 on the last row).
inline void write_trajectory_csv(std::ostream& os, const ChainPath& path,
                                 const LossPath& loss, const std::string& header_note) {
    if (!header_note.empty()) os << "# " << header_note << "\n";
    os << "t,lambda,xi,L,jump\n";
    const long n = path.grid.steps;
    for (long i = 0; i <= n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const int jump = i < n ? (path.jump_flags[k] ? 1 : 0) : 0;
        os << format_g17(path.grid.time_at(i)) << ',' << format_g17(path.l_values[k])
           << ',' << format_g17(path.a_values[k]) << ',' << format_g17(loss.cumulative[k])
           << ',' << jump << '\n';
    }
}

inline void write_events_csv(std::ostream& os, const EventRecord& rec,
                             const std::string& header_note) {
    if (!header_note.empty()) os << "# " << header_note << "\n";
    os << "theta,mark\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        os << format_g17(rec.times[i]) << ',' << format_g17(rec.marks[i]) << '\n';
}

// Exact-simulator state sampled on a caller grid, in the trajectory schema.
// The jump column flags steps [t_i, t_{i+1}) containing at least one event.
inline void write_sampled_state_csv(std::ostream& os, const EventRecord& rec,
                                    const HawkesParams& params, const GridSpec& grid,
                                    const std::string& header_note) {
    if (!header_note.empty()) os << "# " << header_note << "\n";
    os << "t,lambda,xi,L,jump\n";
    for (long i = 0; i <= grid.steps; ++i) {
        const double t = grid.time_at(i);
        const ProcessState st = state_at(rec, params, std::min(t, rec.horizon));
        int jump = 0;
        if (i < grid.steps) {
            const double t_next = grid.time_at(i + 1);
            for (double theta : rec.times)
                if (theta > t && theta <= t_next) {
                    jump = 1;
                    break;
                }
        }
        os << format_g17(t) << ',' << format_g17(st.lambda) << ',' << format_g17(st.xi)
           << ',' << format_g17(st.loss) << ',' << jump << '\n';
    }
}

inline nlohmann::json report_to_json(const ConvergenceReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"N", r.n_steps},
                        {"ks_statistic", r.ks_statistic},
                        {"ks_pvalue", r.ks_pvalue},
                        {"wasserstein1", r.wasserstein1},
                        {"mean_dthp", r.mean_dthp},
                        {"mean_exact", r.mean_exact},
                        {"mean_analytic", r.mean_analytic}});
    return {{"coordinate", report.coordinate},
            {"t", report.t},
            {"paths_per_arm", report.paths_per_arm},
            {"rows", rows}};
}

inline void report_to_csv(std::ostream& os, const ConvergenceReport& report,
                          const std::string& header_note) {
    if (!header_note.empty()) os << "# " << header_note << "\n";
    os << "coordinate,N,ks_statistic,ks_pvalue,wasserstein1,mean_dthp,mean_exact,"
          "mean_analytic\n";
    for (const auto& r : report.rows)
        os << report.coordinate << ',' << r.n_steps << ',' << format_g17(r.ks_statistic)
           << ',' << format_g17(r.ks_pvalue) << ',' << format_g17(r.wasserstein1) << ','
           << format_g17(r.mean_dthp) << ',' << format_g17(r.mean_exact) << ','
           << format_g17(r.mean_analytic) << '\n';
}

} // namespace hawkesdt
