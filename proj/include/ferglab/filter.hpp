#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ferglab/common.hpp"
#include "ferglab/hmm.hpp"
#include "ferglab/types.hpp"

namespace ferglab {

/// One atom of the filter kernel eta(.|z): the posterior reached by
/// observation y together with its predictive weight.
struct FilterBranch {
    std::size_t observation = 0;
    double weight = 0.0;
    ProbVector posterior;
};

/// Finite-support probability measure on Z = P(X).
struct AtomicMeasureOnZ {
    std::vector<ProbVector> atoms;
    std::vector<double> weights;

    std::size_t size() const { return atoms.size(); }

    void validate(double tol = kDefaultTol) const {
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw InvalidModel("atomic measure has a negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > tol)
            throw InvalidModel("atomic measure weights sum to " + std::to_string(sum));
        for (const auto& a : atoms) a.validate(1e-9);
    }

    /// Barycenter sum_i w_i * atom_i, the predictive marginal on X.
    ProbVector mean() const {
        if (atoms.empty()) throw InvalidModel("empty atomic measure");
        ProbVector out;
        out.weights.assign(atoms.front().size(), 0.0);
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = 0; j < out.size(); ++j)
                out.weights[j] += weights[i] * atoms[i][j];
        return out;
    }
};

/// Law of the next observation given filter state z: y -> sum_x Q(y|x) (zT)_x.
inline ProbVector predictive_obs(const HmmModel& model, const ProbVector& z) {
    if (z.size() != model.n_states()) throw DimensionMismatch("predictive_obs: size mismatch");
    const ProbVector pred = apply_kernel(z, model.T);
    ProbVector out;
    out.weights = apply_kernel(pred.weights, model.Q.rows);
    return out;
}

/// One Bayes step F(z, y): posterior_j proportional to Q(y|j) * (zT)_j.
inline ProbVector bayes_update(const HmmModel& model, const ProbVector& z, std::size_t y,
                               double underflow = kPruneThreshold) {
    if (z.size() != model.n_states()) throw DimensionMismatch("bayes_update: size mismatch");
    if (y >= model.n_obs()) throw DimensionMismatch("bayes_update: unknown observation index");
    const ProbVector pred = apply_kernel(z, model.T);
    ProbVector post;
    post.weights.resize(pred.size());
    double norm = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        post.weights[j] = model.Q(j, y) * pred[j];
        norm += post.weights[j];
    }
    if (norm <= underflow)
        throw ZeroLikelihood("observation " + model.obs_labels[y] +
                             " has zero predictive probability");
    for (double& w : post.weights) w /= norm;
    return post;
}

/// Exact representation of eta(.|z): one branch per observation with positive
/// predictive weight, in observation order.
inline std::vector<FilterBranch> filter_branch_list(const HmmModel& model, const ProbVector& z,
                                                    double prune = kPruneThreshold) {
    const ProbVector pw = predictive_obs(model, z);
    std::vector<FilterBranch> out;
    out.reserve(model.n_obs());
    for (std::size_t y = 0; y < model.n_obs(); ++y) {
        if (pw[y] <= prune) continue;
        out.push_back({y, pw[y], bayes_update(model, z, y)});
    }
    return out;
}

inline AtomicMeasureOnZ filter_branches(const HmmModel& model, const ProbVector& z,
                                        double prune = kPruneThreshold) {
    AtomicMeasureOnZ eta;
    for (auto& b : filter_branch_list(model, z, prune)) {
        eta.atoms.push_back(std::move(b.posterior));
        eta.weights.push_back(b.weight);
    }
    return eta;
}

inline constexpr std::size_t kDefaultAtomCap = 4096;

/// Exact law of Z_n given Z_0 = z: atoms indexed by observation strings in
/// lexicographic order, zero-weight branches pruned.
inline AtomicMeasureOnZ iterate_eta(const HmmModel& model, const ProbVector& z, std::size_t n,
                                    std::size_t atom_cap = kDefaultAtomCap,
                                    double prune = kPruneThreshold) {
    if (n < 1) throw InvalidModel("iterate_eta requires n >= 1");
    AtomicMeasureOnZ cur;
    cur.atoms = {z};
    cur.weights = {1.0};
    for (std::size_t step = 0; step < n; ++step) {
        if (cur.size() * model.n_obs() > atom_cap)
            throw AtomCapExceeded("exact branch count would exceed the atom cap of " +
                                  std::to_string(atom_cap));
        AtomicMeasureOnZ next;
        next.atoms.reserve(cur.size() * model.n_obs());
        next.weights.reserve(cur.size() * model.n_obs());
        for (std::size_t a = 0; a < cur.size(); ++a) {
            for (auto& b : filter_branch_list(model, cur.atoms[a], prune)) {
                next.atoms.push_back(std::move(b.posterior));
                next.weights.push_back(cur.weights[a] * b.weight);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

/// Filter trajectory z_0, z_1, ..., z_N under a given observation sequence.
/// Path log-likelihood accumulates in log space for diagnostics.
struct FilterPath {
    std::vector<ProbVector> states;
    double log_likelihood = 0.0;
};

inline FilterPath filter_path(const HmmModel& model, const ProbVector& z0,
                              const std::vector<std::size_t>& observations) {
    FilterPath out;
    out.states.reserve(observations.size() + 1);
    out.states.push_back(z0);
    for (std::size_t k = 0; k < observations.size(); ++k) {
        const ProbVector pw = predictive_obs(model, out.states.back());
        const std::size_t y = observations[k];
        if (y >= model.n_obs() || pw[y] <= kPruneThreshold)
            throw ZeroLikelihood("zero-likelihood observation at step " + std::to_string(k),
                                 static_cast<int>(k));
        out.log_likelihood += std::log(pw[y]);
        out.states.push_back(bayes_update(model, out.states.back(), y));
    }
    return out;
}

}  // namespace ferglab
