#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ferglab/certify.hpp"
#include "ferglab/simulate.hpp"

namespace ferglab {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a over the raw config bytes.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::string timestamp;           // kept out of the deterministic CSV payloads
    std::vector<std::string> notes;  // e.g. "atom cap exceeded, fell back to monte-carlo"

    nlohmann::json to_json(bool with_timestamp = true) const {
        nlohmann::json j{{"command", command},
                         {"config_hash", config_hash},
                         {"seed", seed},
                         {"tool_version", tool_version},
                         {"notes", notes}};
        if (with_timestamp) j["timestamp"] = timestamp;
        return j;
    }

    /// Comment header for CSV files; deterministic (no timestamp).
    std::string csv_header() const {
        std::string h = "# command=" + command + " config_hash=" + config_hash +
                        " seed=" + std::to_string(seed) + " tool_version=" + tool_version + "\n";
        for (const auto& n : notes) h += "# note=" + n + "\n";
        return h;
    }
};

inline nlohmann::json to_json(const CertificationReport& r) {
    nlohmann::json j{{"alpha", r.alpha},
                     {"alpha_grid", r.alpha_grid},
                     {"D", r.D},
                     {"delta_T", r.delta_T},
                     {"delta_Q", r.delta_Q},
                     {"beta", r.beta},
                     {"assumption1_pass", r.assumption1_pass},
                     {"corollary_finite_pass", r.corollary_finite_pass},
                     {"metric_is_discrete", r.metric_is_discrete},
                     {"nondegenerate", r.nondegenerate},
                     {"notes", r.notes}};
    if (r.alpha_analytic) j["alpha_analytic"] = *r.alpha_analytic;
    if (r.mixing)
        j["mixing"] = {{"epsilon_T", r.mixing->epsilon_T},
                       {"lambda", r.mixing->lambda.weights}};
    if (r.obs_floor)
        j["obs_floor"] = {{"y_prime", r.obs_floor->y_prime}, {"epsilon", r.obs_floor->epsilon}};
    if (r.constant_column)
        j["constant_column"] = {{"y_bar", r.constant_column->y_bar},
                                {"epsilon", r.constant_column->epsilon}};
    if (r.clm_rate_c) j["clm_rate_c"] = *r.clm_rate_c;
    if (r.kr_rank1)
        j["kr_rank1"] = {{"observation_string", r.kr_rank1->observation_string},
                         {"second_singular_value", r.kr_rank1->second_singular_value}};
    return j;
}

inline nlohmann::json to_json(const ContractionResult& r) {
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& v : r.violations)
        viol.push_back({{"pair", v.pair_index}, {"n", v.n}, {"ratio", v.ratio}});
    return {{"pairs_tested", r.pairs_tested},
            {"max_ratio", r.max_ratio},
            {"bound", r.bound},
            {"violations", viol}};
}

inline nlohmann::json to_json(const DecayCurve& c) {
    return {{"n", c.n_values},
            {"distance", c.distances},
            {"bound", c.bounds},
            {"stderr", c.stderrs},
            {"mode", c.mode == DecayMode::Exact ? "exact" : "monte-carlo"},
            {"fitted_rate", c.fitted_rate}};
}

inline nlohmann::json to_json(const ReachabilityTrace& t) {
    return {{"iterations", t.hilbert_gaps.size()},
            {"hilbert_gaps", t.hilbert_gaps},
            {"limit", t.limit.weights},
            {"rate_bound", t.rate_bound},
            {"converged", t.converged},
            {"max_gap_ratio", t.max_gap_ratio}};
}

inline std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Fixed column layout: n, distance, bound, stderr.
inline void write_decay_csv(const std::string& path, const RunManifest& m, const DecayCurve& c) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << m.csv_header() << "n,distance,bound,stderr\n";
    for (std::size_t i = 0; i < c.n_values.size(); ++i)
        out << c.n_values[i] << ',' << csv_number(c.distances[i]) << ','
            << csv_number(c.bounds[i]) << ',' << csv_number(c.stderrs[i]) << '\n';
}

/// Fixed column layout: iteration, hilbert_gap, tv_to_limit.
inline void write_trace_csv(const std::string& path, const RunManifest& m,
                            const ReachabilityTrace& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << m.csv_header() << "iteration,hilbert_gap,tv_to_limit\n";
    for (std::size_t k = 0; k < t.hilbert_gaps.size(); ++k)
        out << (k + 1) << ',' << csv_number(t.hilbert_gaps[k]) << ','
            << csv_number(tv_distance(t.iterates[k + 1], t.limit)) << '\n';
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace ferglab
