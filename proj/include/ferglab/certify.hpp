#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ferglab/common.hpp"
#include "ferglab/hmm.hpp"
#include "ferglab/metrics.hpp"
#include "ferglab/svd.hpp"
#include "ferglab/types.hpp"

namespace ferglab {

/// A normalized product M(y_1)...M(y_n) that is numerically rank 1.
struct KrWitness {
    std::vector<std::size_t> observation_string;
    double second_singular_value = 0.0;
    Matrix matrix;
};

struct ObsFloor {
    std::size_t y_prime = 0;
    double epsilon = 0.0;  // max over y of min_x Q(y|x), attained at y_prime
};

struct ConstantColumn {
    std::size_t y_bar = 0;
    double epsilon = 0.0;
};

struct MixingInfo {
    double epsilon_T = 0.0;
    NonnegVector lambda;
};

struct CertificationReport {
    double alpha = 0.0;           // constant used for the pass/fail gate
    double alpha_grid = 0.0;      // least Lipschitz constant on the finite space
    std::optional<double> alpha_analytic;  // closed-form bound, when available
    double D = 0.0;
    double delta_T = 0.0;
    double delta_Q = 0.0;
    double beta = 0.0;  // alpha * D * (3 - 2*delta_Q) / 2
    bool assumption1_pass = false;       // beta < 1
    bool corollary_finite_pass = false;  // discrete metric: (1-dT)(3-2dQ) < 1
    bool metric_is_discrete = false;
    bool nondegenerate = false;  // all Q entries strictly positive
    std::optional<MixingInfo> mixing;
    std::optional<ObsFloor> obs_floor;
    std::optional<ConstantColumn> constant_column;
    std::optional<double> clm_rate_c;  // (1 - eps_T^2 * eps) / (1 + eps_T^2 * eps)
    std::optional<KrWitness> kr_rank1;
    std::vector<std::string> notes;
};

inline bool is_discrete_metric(const MetricSpace& space, double tol = kStochasticTol) {
    for (std::size_t i = 0; i < space.size(); ++i)
        for (std::size_t j = 0; j < space.size(); ++j) {
            const double want = i == j ? 0.0 : 1.0;
            if (std::abs(space.dist(i, j) - want) > tol) return false;
        }
    return true;
}

/// Evaluates every checkable constant and hypothesis for a model. Sub-checks
/// never throw; anything not applicable degrades to a recorded note.
inline CertificationReport certify(const HmmModel& model) {
    CertificationReport r;
    const AlphaEstimate est = estimate_alpha(model.T, model.space);
    r.alpha_grid = est.alpha;
    if (model.gaussian_sigma) {
        r.alpha_analytic = truncated_gaussian_alpha_bound(*model.gaussian_sigma);
        r.alpha = *r.alpha_analytic;
        r.notes.push_back("alpha gate uses the analytic truncated-Gaussian bound; the grid "
                          "value is a lower bound with O(1/n) discretization bias");
    } else {
        r.alpha = r.alpha_grid;
    }
    r.D = model.space.diameter;
    r.delta_T = dobrushin_coefficient(model.T);
    r.delta_Q = dobrushin_coefficient(model.Q);
    r.beta = r.alpha * r.D * (3.0 - 2.0 * r.delta_Q) / 2.0;
    r.assumption1_pass = r.beta < 1.0;
    r.notes.push_back("one-step contraction margin 1 - beta = " + std::to_string(1.0 - r.beta));

    r.metric_is_discrete = is_discrete_metric(model.space);
    if (r.metric_is_discrete) {
        r.corollary_finite_pass = (1.0 - r.delta_T) * (3.0 - 2.0 * r.delta_Q) < 1.0;
    } else {
        r.notes.push_back("finite-space corollary skipped: metric is not discrete");
    }

    double q_min = kInf;
    for (std::size_t i = 0; i < model.n_states(); ++i)
        for (std::size_t y = 0; y < model.n_obs(); ++y) q_min = std::min(q_min, model.Q(i, y));
    r.nondegenerate = q_min > 0.0;
    if (!r.nondegenerate) r.notes.push_back("channel has zero entries: nondegeneracy fails");

    for (std::size_t y = 0; y < model.n_obs(); ++y) {
        double lo = kInf, hi = 0.0;
        for (std::size_t i = 0; i < model.n_states(); ++i) {
            lo = std::min(lo, model.Q(i, y));
            hi = std::max(hi, model.Q(i, y));
        }
        if (lo > 0.0 && (!r.obs_floor || lo > r.obs_floor->epsilon)) r.obs_floor = {y, lo};
        if (lo > 0.0 && hi - lo <= kStochasticTol && !r.constant_column)
            r.constant_column = {y, lo};
    }
    if (!r.obs_floor)
        r.notes.push_back("no observation has a uniform positive likelihood floor");

    if (auto mix = mixing_constant(model.T)) {
        r.mixing = MixingInfo{mix->epsilon, mix->lambda};
    } else {
        r.notes.push_back("transition kernel is not mixing (some column mixes zero and "
                          "positive entries)");
    }
    if (r.mixing && r.obs_floor) {
        const double e2 = r.mixing->epsilon_T * r.mixing->epsilon_T * r.obs_floor->epsilon;
        r.clm_rate_c = (1.0 - e2) / (1.0 + e2);
    }
    return r;
}

/// Observation-masked transition matrix M(y)_ij = T(j|i) * Q(y|j).
inline Matrix obs_masked_matrix(const HmmModel& model, std::size_t y) {
    const std::size_t n = model.n_states();
    Matrix M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = model.T(i, j) * model.Q(j, y);
    return M;
}

namespace detail {

inline Matrix normalized_product(const Matrix& A, const Matrix& B) {
    const std::size_t n = A.rows();
    Matrix C(n, n);
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += A(i, k) * B(k, j);
            C(i, j) = s;
            mx = std::max(mx, s);
        }
    if (mx > 0.0)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) C(i, j) /= mx;
    return C;
}

}  // namespace detail

/// Breadth-first heuristic search for a numerically rank-1 product of
/// observation-masked matrices, normalized by max entry at every step.
/// The first witness in lexicographic observation-string order is returned;
/// absence of a witness does not refute the rank-1 condition.
inline std::optional<KrWitness> kr_rank1_search(const HmmModel& model, std::size_t max_depth,
                                                double tol = 1e-8,
                                                std::size_t frontier_cap = 1 << 16) {
    std::vector<Matrix> masks;
    for (std::size_t y = 0; y < model.n_obs(); ++y) masks.push_back(obs_masked_matrix(model, y));

    struct Node {
        std::vector<std::size_t> str;
        Matrix prod;
    };
    std::vector<Node> frontier;
    {
        Matrix eye(model.n_states(), model.n_states());
        for (std::size_t i = 0; i < model.n_states(); ++i) eye(i, i) = 1.0;
        frontier.push_back({{}, std::move(eye)});
    }
    for (std::size_t depth = 1; depth <= max_depth; ++depth) {
        std::vector<Node> next;
        next.reserve(frontier.size() * model.n_obs());
        for (const auto& node : frontier) {
            for (std::size_t y = 0; y < model.n_obs(); ++y) {
                Node child{node.str, detail::normalized_product(node.prod, masks[y])};
                child.str.push_back(y);
                const auto sv = singular_values(child.prod);
                if (sv.size() >= 2 && sv[1] < tol && sv[0] > 0.0)
                    return KrWitness{child.str, sv[1], child.prod};
                next.push_back(std::move(child));
            }
        }
        if (next.size() > frontier_cap) return std::nullopt;
        frontier = std::move(next);
    }
    return std::nullopt;
}

}  // namespace ferglab
