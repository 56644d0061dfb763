// Command-line front end: model ingestion, experiment orchestration, and
// bit-stable report emission.
//
// Exit codes: 0 = pass, 1 = bound/gate violation, 2 = config error,
// 3 = precondition unmet.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ferglab/ferglab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct LoadedModel {
    ferglab::HmmModel model;
    std::string config_bytes;
    std::string config_hash;
};

LoadedModel load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ferglab::InvalidModel("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    LoadedModel out;
    out.config_bytes = buf.str();
    out.config_hash = ferglab::fnv1a_hex(out.config_bytes);
    json doc;
    try {
        doc = json::parse(out.config_bytes);
    } catch (const json::exception& e) {
        throw ferglab::InvalidModel(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        out.model = ferglab::load_model(doc);
    } catch (const json::exception& e) {
        throw ferglab::InvalidModel(std::string("config field error: ") + e.what());
    }
    return out;
}

ferglab::RunManifest make_manifest(const std::string& command, const LoadedModel& lm,
                                   std::uint64_t seed) {
    ferglab::RunManifest m;
    m.command = command;
    m.config_hash = lm.config_hash;
    m.seed = seed;
    m.timestamp = iso_timestamp();
    return m;
}

ferglab::ProbVector parse_prior(const std::string& spec, std::size_t n) {
    if (spec == "uniform") return ferglab::ProbVector::uniform(n);
    if (spec.rfind("point:", 0) == 0) {
        const std::size_t at = std::stoul(spec.substr(6));
        if (at >= n) throw ferglab::InvalidModel("prior point index out of range: " + spec);
        return ferglab::ProbVector::point_mass(n, at);
    }
    ferglab::ProbVector z;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) z.weights.push_back(std::stod(tok));
    if (z.size() != n)
        throw ferglab::InvalidModel("prior has " + std::to_string(z.size()) +
                                    " weights, model has " + std::to_string(n) + " states");
    z.validate(1e-9);
    return z;
}

std::size_t parse_obs(const std::string& spec, const ferglab::HmmModel& model) {
    for (std::size_t y = 0; y < model.n_obs(); ++y)
        if (model.obs_labels[y] == spec) return y;
    try {
        const std::size_t y = std::stoul(spec);
        if (y < model.n_obs()) return y;
    } catch (...) {
    }
    throw ferglab::InvalidModel("unknown observation: " + spec);
}

/// Hash of the limit rounded to 1e-6, so limits that agree within the
/// convergence tolerance hash identically regardless of the starting prior.
std::string prob_vector_hash(const ferglab::ProbVector& z) {
    std::string bytes;
    for (double w : z.weights)
        bytes += std::to_string(std::llround(w * 1e6)) + ",";
    return ferglab::fnv1a_hex(bytes);
}

// ---------------------------------------------------------------- certify --

int run_certify(const std::string& config_path, bool as_json, const std::string& out_path,
                const std::string& gate) {
    const LoadedModel lm = load_config(config_path);
    const ferglab::CertificationReport rep = ferglab::certify(lm.model);
    ferglab::RunManifest manifest = make_manifest("certify " + config_path, lm, 0);

    json j = ferglab::to_json(rep);
    j["manifest"] = manifest.to_json();
    if (!out_path.empty()) ferglab::write_json(out_path, j);

    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("alpha          %.12g  (grid %.12g%s)\n", rep.alpha, rep.alpha_grid,
                    rep.alpha_analytic ? ", analytic bound used for the gate" : "");
        std::printf("D              %.12g\n", rep.D);
        std::printf("delta(T)       %.12g\n", rep.delta_T);
        std::printf("delta(Q)       %.12g\n", rep.delta_Q);
        std::printf("beta           %.12g  -> one-step contraction %s\n", rep.beta,
                    rep.assumption1_pass ? "PASS (beta < 1)" : "FAIL (beta >= 1)");
        if (rep.metric_is_discrete)
            std::printf("finite check   (1-dT)(3-2dQ) = %.12g -> %s\n",
                        (1.0 - rep.delta_T) * (3.0 - 2.0 * rep.delta_Q),
                        rep.corollary_finite_pass ? "PASS (< 1)" : "FAIL");
        std::printf("nondegenerate  %s\n", rep.nondegenerate ? "yes" : "no");
        if (rep.mixing) std::printf("mixing         eps_T = %.12g\n", rep.mixing->epsilon_T);
        if (rep.obs_floor)
            std::printf("obs floor      y' = %s, eps = %.12g\n",
                        lm.model.obs_labels[rep.obs_floor->y_prime].c_str(),
                        rep.obs_floor->epsilon);
        if (rep.constant_column)
            std::printf("constant col   ybar = %s, eps = %.12g\n",
                        lm.model.obs_labels[rep.constant_column->y_bar].c_str(),
                        rep.constant_column->epsilon);
        if (rep.clm_rate_c) std::printf("hilbert rate c %.12g\n", *rep.clm_rate_c);
        for (const auto& n : rep.notes) std::printf("note           %s\n", n.c_str());
    }

    const bool pass = gate == "corollary" ? rep.corollary_finite_pass : rep.assumption1_pass;
    return pass ? kExitPass : kExitViolation;
}

// --------------------------------------------------------------- contract --

int run_contract(const std::string& config_path, std::size_t pairs, std::size_t nmax,
                 std::size_t reg_pairs, std::uint64_t seed, std::size_t mc_paths,
                 const std::string& out_dir) {
    const LoadedModel lm = load_config(config_path);
    const ferglab::HmmModel& model = lm.model;
    const std::size_t n_threads = ferglab::thread_budget();
    ferglab::RunManifest manifest = make_manifest("contract " + config_path, lm, seed);

    const ferglab::CertificationReport cert = ferglab::certify(model);
    const ferglab::ContractionResult one_step =
        ferglab::one_step_contraction_test(model, pairs, seed, ferglab::kDefaultTol, n_threads);

    const ferglab::ProbVector z0 = ferglab::ProbVector::point_mass(model.n_states(), 0);
    const ferglab::ProbVector z1 =
        ferglab::ProbVector::point_mass(model.n_states(), model.n_states() - 1);
    ferglab::DecayCurve decay;
    try {
        decay = ferglab::n_step_decay(model, z0, z1, nmax, ferglab::kDefaultAtomCap, cert.beta);
    } catch (const ferglab::AtomCapExceeded& e) {
        manifest.notes.push_back(std::string("exact decay unavailable (") + e.what() +
                                 "); fell back to monte-carlo with " +
                                 std::to_string(mc_paths) + " paths");
        decay = ferglab::mc_decay(model, z0, z1, nmax, mc_paths, seed, cert.beta, 20, n_threads);
    }

    const std::size_t reg_nmax = std::min<std::size_t>(nmax, 4);
    const ferglab::ContractionResult regularity =
        ferglab::bl_regularity_test(model, reg_nmax, reg_pairs, seed);

    fs::create_directories(out_dir);
    json j{{"manifest", manifest.to_json()},
           {"beta", cert.beta},
           {"one_step", ferglab::to_json(one_step)},
           {"decay", ferglab::to_json(decay)},
           {"regularity", ferglab::to_json(regularity)}};
    ferglab::write_json(out_dir + "/contract.json", j);
    ferglab::write_decay_csv(out_dir + "/decay.csv", manifest, decay);

    const std::size_t decay_viol =
        decay.mode == ferglab::DecayMode::Exact ? decay.count_violations() : 0;
    std::printf("one-step: %zu pairs, max ratio %.6g vs bound %.6g, %zu violations\n",
                one_step.pairs_tested, one_step.max_ratio, one_step.bound,
                one_step.violations.size());
    std::printf("decay (%s): %zu exact-bound violations, fitted rate %.6g\n",
                decay.mode == ferglab::DecayMode::Exact ? "exact" : "monte-carlo", decay_viol,
                decay.fitted_rate);
    std::printf("regularity: %zu pairs, max ratio %.6g vs bound %.6g, %zu violations\n",
                regularity.pairs_tested, regularity.max_ratio, regularity.bound,
                regularity.violations.size());

    const bool ok = one_step.violations.empty() && regularity.violations.empty() &&
                    decay_viol == 0;
    return ok ? kExitPass : kExitViolation;
}

// ------------------------------------------------------------------ reach --

int run_reach(const std::string& config_path, const std::string& obs,
              const std::vector<std::string>& prior_specs, std::size_t max_iter,
              const std::string& out_dir) {
    const LoadedModel lm = load_config(config_path);
    const ferglab::HmmModel& model = lm.model;
    const std::size_t y = parse_obs(obs, model);
    std::vector<std::string> specs = prior_specs;
    if (specs.empty()) specs = {"uniform"};

    ferglab::RunManifest manifest = make_manifest("reach " + config_path + " --obs " + obs,
                                                  lm, 0);
    fs::create_directories(out_dir);
    json traces = json::array();
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const ferglab::ProbVector mu = parse_prior(specs[k], model.n_states());
        const ferglab::ReachabilityTrace trace =
            ferglab::reachable_state_trace(model, mu, y, max_iter);
        json jt = ferglab::to_json(trace);
        jt["prior"] = specs[k];
        jt["limit_hash"] = prob_vector_hash(trace.limit);
        traces.push_back(jt);
        ferglab::write_trace_csv(out_dir + "/reach_trace_" + std::to_string(k) + ".csv",
                                 manifest, trace);
        std::printf("prior %-12s iterations %3zu converged %s limit_hash %s\n",
                    specs[k].c_str(), trace.hilbert_gaps.size(),
                    trace.converged ? "yes" : "no", prob_vector_hash(trace.limit).c_str());
    }
    json j{{"manifest", manifest.to_json()}, {"observation", obs}, {"traces", traces}};
    ferglab::write_json(out_dir + "/reach.json", j);

    for (const auto& t : traces)
        if (!t["converged"].get<bool>()) return kExitViolation;
    return kExitPass;
}

// -------------------------------------------------------------- reproduce --

int run_reproduce(const std::string& example_id, const std::string& config_dir,
                  const std::string& out_dir) {
    fs::create_directories(out_dir);
    int worst = kExitPass;
    auto track = [&](int rc) { worst = std::max(worst, rc); };

    if (example_id == "ex1") {
        const std::string cfg = config_dir + "/ex1.json";
        track(run_certify(cfg, true, out_dir + "/certify.json", "assumption1"));
        track(run_contract(cfg, 200, 5, 50, 42, 200, out_dir));
        track(run_reach(cfg, "0", {"uniform", "point:3"}, 10000, out_dir));
        const LoadedModel lm = load_config(cfg);
        const ferglab::CertificationReport rep = ferglab::certify(lm.model);
        json summary{{"example", "ex1"},
                     {"delta_T", rep.delta_T},
                     {"delta_Q", rep.delta_Q},
                     {"corollary_condition_value",
                      (1.0 - rep.delta_T) * (3.0 - 2.0 * rep.delta_Q)},
                     {"beta", rep.beta}};
        ferglab::write_json(out_dir + "/summary.json", summary);
    } else if (example_id == "gaussian") {
        const std::string cfg = config_dir + "/gaussian_sigma1.3.json";
        track(run_certify(cfg, true, out_dir + "/certify.json", "assumption1"));
        track(run_contract(cfg, 50, 4, 10, 42, 200, out_dir));
        track(run_reach(cfg, "low", {"uniform", "point:0"}, 10000, out_dir));
        const LoadedModel lm = load_config(cfg);
        const ferglab::CertificationReport rep = ferglab::certify(lm.model);
        json summary{{"example", "gaussian"},
                     {"sigma", 1.3},
                     {"alpha_analytic", rep.alpha_analytic ? *rep.alpha_analytic : 0.0},
                     {"alpha_grid", rep.alpha_grid},
                     {"beta", rep.beta}};
        ferglab::write_json(out_dir + "/summary.json", summary);
    } else {
        throw ferglab::InvalidModel("unknown example id: " + example_id +
                                    " (expected ex1 or gaussian)");
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayes-filter ergodicity certification and simulation"};
    app.require_subcommand(1);

    std::string config_path, out_path, out_dir = "out", gate = "assumption1";
    bool as_json = false;

    auto* certify = app.add_subcommand("certify", "Evaluate model constants and hypotheses");
    certify->add_option("config", config_path, "Model config JSON")->required();
    certify->add_flag("--json", as_json, "Emit the JSON report to stdout");
    certify->add_option("--out", out_path, "Also write the JSON report to this file");
    certify->add_option("--gate", gate, "Pass/fail gate: assumption1 | corollary")
        ->check(CLI::IsMember({"assumption1", "corollary"}));

    std::size_t pairs = 200, nmax = 5, reg_pairs = 50, max_iter = 10000, mc_paths = 200;
    std::uint64_t seed = 42;
    auto* contract = app.add_subcommand("contract", "Contraction, decay, and regularity tests");
    contract->add_option("config", config_path, "Model config JSON")->required();
    contract->add_option("--pairs", pairs, "Dirichlet prior pairs for the one-step test");
    contract->add_option("--nmax", nmax, "Decay horizon");
    contract->add_option("--reg-pairs", reg_pairs, "Pairs for the BL regularity test");
    contract->add_option("--seed", seed, "Master seed");
    contract->add_option("--mc-paths", mc_paths, "Paths for the monte-carlo fallback");
    contract->add_option("--out", out_dir, "Output directory");

    std::string obs;
    std::vector<std::string> priors;
    auto* reach = app.add_subcommand("reach", "Constant-observation reachability trace");
    reach->add_option("config", config_path, "Model config JSON")->required();
    reach->add_option("--obs", obs, "Observation label or index")->required();
    reach->add_option("--prior", priors, "Prior: uniform | point:K | comma-separated weights");
    reach->add_option("--max-iter", max_iter, "Iteration cap");
    reach->add_option("--out", out_dir, "Output directory");

    std::string example_id, config_dir = "configs";
    auto* reproduce = app.add_subcommand("reproduce", "Run a pinned-seed example bundle");
    reproduce->add_option("example", example_id, "ex1 | gaussian")->required();
    reproduce->add_option("--config-dir", config_dir, "Directory holding the model configs");
    reproduce->add_option("--out", out_dir, "Bundle output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*certify) return run_certify(config_path, as_json, out_path, gate);
        if (*contract)
            return run_contract(config_path, pairs, nmax, reg_pairs, seed, mc_paths, out_dir);
        if (*reach) return run_reach(config_path, obs, priors, max_iter, out_dir);
        if (*reproduce) return run_reproduce(example_id, config_dir, out_dir);
    } catch (const ferglab::PreconditionUnmet& e) {
        std::cerr << "precondition unmet: " << e.what()
                  << " (offending value " << e.offending_value << ")\n";
        return kExitPrecondition;
    } catch (const ferglab::InvalidModel& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ferglab::DimensionMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
