#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ferglab/common.hpp"
#include "ferglab/metrics.hpp"
#include "ferglab/types.hpp"

namespace ferglab {

/// Finite hidden Markov model: metric state space X, finite observation
/// alphabet Y, transition kernel T (|X| x |X|) and channel Q (|X| x |Y|).
struct HmmModel {
    MetricSpace space;
    std::vector<std::string> obs_labels;
    StochasticKernel T;
    StochasticKernel Q;
    /// Set when T came from the truncated-Gaussian generator; enables the
    /// analytic Lipschitz bound during certification.
    std::optional<double> gaussian_sigma;

    std::size_t n_states() const { return space.size(); }
    std::size_t n_obs() const { return obs_labels.size(); }

    void validate() {
        space.validate();
        if (T.n_from() != n_states() || T.n_to() != n_states())
            throw InvalidModel("T must be |X| x |X|");
        if (Q.n_from() != n_states() || Q.n_to() != n_obs())
            throw InvalidModel("Q must be |X| x |Y|");
        T.validate();
        Q.validate();
    }
};

/// Least Lipschitz constant of x -> T(.|x) in TV over the finite space,
/// together with the pair attaining it.
struct AlphaEstimate {
    double alpha = 0.0;
    std::pair<std::size_t, std::size_t> witness_pair{0, 0};
};

inline AlphaEstimate estimate_alpha(const StochasticKernel& T, const MetricSpace& space) {
    if (T.n_from() != space.size()) throw DimensionMismatch("estimate_alpha: size mismatch");
    AlphaEstimate est;
    const std::size_t n = space.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = space.dist(i, j);
            if (d <= 0.0) continue;
            const double tv = tv_distance(ProbVector{T.rows.row(i)}, ProbVector{T.rows.row(j)});
            if (tv / d > est.alpha) {
                est.alpha = tv / d;
                est.witness_pair = {i, j};
            }
        }
    }
    return est;
}

inline double norm_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }
inline double norm_cdf(double t) { return 0.5 * (1.0 + std::erf(t / std::sqrt(2.0))); }

/// Gaussian kernel N(x, sigma^2) truncated to [0,1], discretized on a uniform
/// n-point grid: density at the grid point times the (constant) cell width,
/// then exact row renormalization. Discretization bias is O(1/n).
inline std::pair<StochasticKernel, MetricSpace> build_truncated_gaussian(std::size_t n_points,
                                                                         double sigma) {
    if (n_points < 2) throw InvalidModel("truncated Gaussian grid needs at least 2 points");
    if (!(sigma > 0.0)) throw InvalidModel("sigma must be positive");
    MetricSpace space = MetricSpace::grid1d(n_points, 0.0, 1.0);
    StochasticKernel T;
    T.rows = Matrix(n_points, n_points);
    const auto grid = [&](std::size_t i) {
        return static_cast<double>(i) / static_cast<double>(n_points - 1);
    };
    for (std::size_t i = 0; i < n_points; ++i) {
        const double mu = grid(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < n_points; ++j) {
            const double w = norm_pdf((grid(j) - mu) / sigma);
            T.rows(i, j) = w;
            sum += w;
        }
        for (std::size_t j = 0; j < n_points; ++j) T.rows(i, j) /= sum;
    }
    return {std::move(T), std::move(space)};
}

/// Analytic Lipschitz bound for the truncated-Gaussian kernel in TV:
/// shifting the location by d changes the density by at most
/// (2/sigma) * phi(0) * d = sqrt(2/pi)/sigma * d in total variation, and
/// truncation to [0,1] with renormalization does not increase the constant.
inline double truncated_gaussian_alpha_bound(double sigma) {
    return std::sqrt(2.0 / M_PI) / sigma;
}

/// Invariant distribution of a row-stochastic kernel by power iteration.
inline ProbVector stationary_distribution(const StochasticKernel& T, double tol = 1e-14,
                                          std::size_t max_iter = 200000) {
    ProbVector z = ProbVector::uniform(T.n_from());
    for (std::size_t k = 0; k < max_iter; ++k) {
        ProbVector next = apply_kernel(z, T);
        if (tv_distance(z, next) < tol) return next;
        z = std::move(next);
    }
    throw SolverFailure("power iteration for the stationary distribution did not converge");
}

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array() || j.empty())
        throw InvalidModel(name + " must be a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
    try {
        return Matrix::from_rows(rows);
    } catch (const DimensionMismatch&) {
        throw InvalidModel(name + " has ragged rows");
    }
}

inline StochasticKernel kernel_from_json(const nlohmann::json& j, const std::string& name) {
    StochasticKernel K{matrix_from_json(j, name)};
    for (std::size_t i = 0; i < K.n_from(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < K.n_to(); ++c) {
            if (K(i, c) < 0.0)
                throw InvalidModel(name + " row " + std::to_string(i) + " has a negative entry");
            sum += K(i, c);
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
            throw InvalidModel(name + " row " + std::to_string(i) + " sums to " +
                               std::to_string(sum) + ", expected 1");
    }
    return K;
}

}  // namespace detail

/// Loads and validates a model from its canonical JSON document:
///   { schema_version, metric: {type: discrete|grid-1d|explicit, ...},
///     T: rows | {generator: ...}, Q: rows | {generator: ...},
///     obs_labels, params }
inline HmmModel load_model(const nlohmann::json& config) {
    if (!config.is_object()) throw InvalidModel("config must be a JSON object");
    if (!config.contains("schema_version") || config["schema_version"].get<int>() != 1)
        throw InvalidModel("config must declare schema_version 1");
    for (const char* key : {"metric", "T", "Q", "obs_labels"})
        if (!config.contains(key)) throw InvalidModel(std::string("config missing field ") + key);

    HmmModel model;
    model.obs_labels = config["obs_labels"].get<std::vector<std::string>>();
    if (model.obs_labels.empty()) throw InvalidModel("obs_labels must be non-empty");

    const auto& metric = config["metric"];
    const std::string type = metric.at("type").get<std::string>();
    bool t_from_generator = false;
    if (type == "grid-1d") {
        const std::size_t n = metric.at("n").get<std::size_t>();
        const double a = metric.value("a", 0.0), b = metric.value("b", 1.0);
        if (config["T"].is_object()) {
            const auto& gen = config["T"];
            if (gen.at("generator").get<std::string>() != "truncated-gaussian")
                throw InvalidModel("unknown T generator");
            if (a != 0.0 || b != 1.0)
                throw InvalidModel("truncated-gaussian generator requires the [0,1] grid");
            auto [T, space] = build_truncated_gaussian(n, gen.at("sigma").get<double>());
            model.T = std::move(T);
            model.space = std::move(space);
            model.gaussian_sigma = gen.at("sigma").get<double>();
            t_from_generator = true;
        } else {
            model.space = MetricSpace::grid1d(n, a, b);
        }
    } else if (type == "discrete") {
        // size inferred from T below
    } else if (type == "explicit") {
        model.space.points = metric.at("points").get<std::vector<std::string>>();
        model.space.dist = detail::matrix_from_json(metric.at("dist"), "metric.dist");
    } else {
        throw InvalidModel("metric.type must be discrete, grid-1d or explicit");
    }

    if (!t_from_generator) {
        model.T = detail::kernel_from_json(config["T"], "T");
        if (type == "discrete") model.space = MetricSpace::discrete(model.T.n_from());
    }

    const std::size_t n = model.T.n_from();
    if (config["Q"].is_object()) {
        const auto& gen = config["Q"];
        const std::string g = gen.at("generator").get<std::string>();
        model.Q.rows = Matrix(n, model.obs_labels.size());
        if (g == "constant-column") {
            const auto p = gen.at("p").get<std::vector<double>>();
            if (p.size() != model.obs_labels.size())
                throw InvalidModel("constant-column generator needs one weight per observation");
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t y = 0; y < p.size(); ++y) model.Q.rows(i, y) = p[y];
        } else if (g == "ramp") {
            if (model.obs_labels.size() != 2)
                throw InvalidModel("ramp generator needs exactly 2 observations");
            const double lo = gen.at("lo").get<double>(), hi = gen.at("hi").get<double>();
            for (std::size_t i = 0; i < n; ++i) {
                const double t = n == 1 ? 0.0
                                        : static_cast<double>(i) / static_cast<double>(n - 1);
                model.Q.rows(i, 0) = lo + (hi - lo) * t;
                model.Q.rows(i, 1) = 1.0 - model.Q.rows(i, 0);
            }
        } else {
            throw InvalidModel("unknown Q generator");
        }
    } else {
        model.Q = detail::kernel_from_json(config["Q"], "Q");
    }

    model.validate();
    return model;
}

}  // namespace ferglab
