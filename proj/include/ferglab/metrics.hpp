#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ferglab/common.hpp"
#include "ferglab/simplex.hpp"
#include "ferglab/transport.hpp"
#include "ferglab/types.hpp"

namespace ferglab {

/// Total variation in the functional (mass-2) convention: sum_i |p_i - q_i|.
/// Point masses at distinct points are at distance 2. The setwise convention
/// (half of this) is never used in this library.
inline double tv_distance(const ProbVector& p, const ProbVector& q) {
    if (p.size() != q.size()) throw DimensionMismatch("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    return tv_distance(ProbVector{p}, ProbVector{q});
}

/// Wasserstein-1 via the primal transport LP with ground cost = dist.
inline double w1_distance(const ProbVector& p, const ProbVector& q, const MetricSpace& space) {
    if (p.size() != q.size() || p.size() != space.size())
        throw DimensionMismatch("w1_distance: size mismatch");
    return solve_transport(p.weights, q.weights, space.dist).cost;
}

/// Bounded-Lipschitz distance: sup f.(p-q) over ||f||_inf + ||f||_Lip <= 1.
/// Solved through the LP dual, a flow problem with mass creation/annihilation:
///   min s  s.t.  div(gamma) + a - b = p - q,  sum(a+b) <= s,  sum(gamma*d) <= s.
/// Always <= min(tv_distance, w1_distance).
inline double bl_distance(const ProbVector& p, const ProbVector& q, const MetricSpace& space) {
    const std::size_t m = p.size();
    if (q.size() != m || space.size() != m)
        throw DimensionMismatch("bl_distance: size mismatch");
    if (m == 0) return 0.0;

    // Merge points at zero distance: a BL test function cannot separate them.
    std::vector<std::size_t> rep(m);
    std::vector<std::size_t> uniq;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t r = uniq.size();
        for (std::size_t k = 0; k < uniq.size(); ++k)
            if (space.dist(uniq[k], i) <= 0.0) {
                r = k;
                break;
            }
        if (r == uniq.size()) uniq.push_back(i);
        rep[i] = r;
    }
    const std::size_t u = uniq.size();
    std::vector<double> r(u, 0.0);
    for (std::size_t i = 0; i < m; ++i) r[rep[i]] += p[i] - q[i];

    // Variables: gamma_{kl} (ordered pairs, k != l), a_k, b_k, s.
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    arcs.reserve(u * (u - 1));
    for (std::size_t k = 0; k < u; ++k)
        for (std::size_t l = 0; l < u; ++l)
            if (k != l) arcs.emplace_back(k, l);
    const std::size_t ng = arcs.size();
    const std::size_t idx_a = ng, idx_b = ng + u, idx_s = ng + 2 * u;

    lp::Problem lpp;
    lpp.n_vars = ng + 2 * u + 1;
    lpp.maximize = false;
    lpp.objective.assign(lpp.n_vars, 0.0);
    lpp.objective[idx_s] = 1.0;
    for (std::size_t k = 0; k < u; ++k) {
        std::vector<double> row(lpp.n_vars, 0.0);
        for (std::size_t e = 0; e < ng; ++e) {
            if (arcs[e].first == k) row[e] += 1.0;
            if (arcs[e].second == k) row[e] -= 1.0;
        }
        row[idx_a + k] = 1.0;
        row[idx_b + k] = -1.0;
        lpp.A.push_back(std::move(row));
        lpp.rel.push_back(lp::Rel::EQ);
        lpp.rhs.push_back(r[k]);
    }
    {
        std::vector<double> row(lpp.n_vars, 0.0);
        for (std::size_t k = 0; k < u; ++k) row[idx_a + k] = row[idx_b + k] = 1.0;
        row[idx_s] = -1.0;
        lpp.A.push_back(std::move(row));
        lpp.rel.push_back(lp::Rel::LE);
        lpp.rhs.push_back(0.0);
    }
    {
        std::vector<double> row(lpp.n_vars, 0.0);
        for (std::size_t e = 0; e < ng; ++e)
            row[e] = space.dist(uniq[arcs[e].first], uniq[arcs[e].second]);
        row[idx_s] = -1.0;
        lpp.A.push_back(std::move(row));
        lpp.rel.push_back(lp::Rel::LE);
        lpp.rhs.push_back(0.0);
    }
    lp::Solution sol = lp::solve(lpp);
    if (sol.status != lp::Status::Optimal)
        throw SolverFailure("BL LP did not reach an optimum");
    return std::max(0.0, sol.objective);
}

/// Hilbert projective metric on finite nonnegative vectors. Comparable means
/// identical supports; then h = log(max ratio) - log(min ratio). Invariant
/// under positive scaling of either argument.
inline double hilbert_metric(const NonnegVector& mu, const NonnegVector& nu) {
    if (mu.size() != nu.size()) throw DimensionMismatch("hilbert_metric: size mismatch");
    double rmax = 0.0, rmin = kInf;
    bool any = false;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double a = mu.weights[i], b = nu.weights[i];
        if (a < 0.0 || b < 0.0) throw InvalidModel("hilbert_metric: negative entry");
        if (a == 0.0 && b == 0.0) continue;
        if (a == 0.0 || b == 0.0) return kInf;  // supports differ
        any = true;
        const double r = a / b;
        rmax = std::max(rmax, r);
        rmin = std::min(rmin, r);
    }
    if (!any) return 0.0;  // both zero measures
    return std::log(rmax) - std::log(rmin);
}

inline double hilbert_metric(const std::vector<double>& mu, const std::vector<double>& nu) {
    return hilbert_metric(NonnegVector{mu}, NonnegVector{nu});
}

/// Dobrushin ergodicity coefficient: min over row pairs of the overlap
/// sum_j min(K_xj, K_yj). On a finite target space the partition infimum is
/// attained by singletons, so this equals the definition's infimum.
inline double dobrushin_coefficient(const StochasticKernel& K) {
    K.validate();
    const std::size_t m = K.n_from(), n = K.n_to();
    if (m < 2) return 1.0;
    double best = kInf;
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x + 1; y < m; ++y) {
            double overlap = 0.0;
            for (std::size_t j = 0; j < n; ++j) overlap += std::min(K(x, j), K(y, j));
            best = std::min(best, overlap);
        }
    return best;
}

struct BirkhoffCoefficients {
    double H = 0.0;   // projective diameter of the image cone; may be +inf
    double tau = 0.0; // tanh(H/4); 1 when H is infinite
};

/// Birkhoff contraction data for a nonnegative kernel acting on measures from
/// the right, (mu K)_j = sum_i mu_i K_ij. The image cone is spanned by the
/// rows, so H(K) is the max pairwise Hilbert distance between rows, which
/// coincides with the cross-ratio formula
/// max log(K_ik K_jl / (K_jk K_il)) over positive quadruples.
inline BirkhoffCoefficients birkhoff_coefficients(const Matrix& K) {
    for (double v : K.data())
        if (v < 0.0) throw InvalidModel("birkhoff_coefficients: negative entry");
    const std::size_t m = K.rows();
    double H = 0.0;
    for (std::size_t i = 0; i < m && H < kInf; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double h = hilbert_metric(K.row(i), K.row(j));
            if (h > H) H = h;
            if (H == kInf) break;
        }
    BirkhoffCoefficients out;
    out.H = H;
    out.tau = std::isinf(H) ? 1.0 : std::tanh(H / 4.0);
    return out;
}

inline BirkhoffCoefficients birkhoff_coefficients(const StochasticKernel& K) {
    return birkhoff_coefficients(K.rows);
}

struct MixingConstant {
    double epsilon = 0.0;
    NonnegVector lambda;
};

/// Exhibits (epsilon, lambda) with eps*lambda_j <= K_ij <= lambda_j/eps, or
/// nullopt when some column mixes zero and positive entries. lambda is the
/// per-column geometric mean of the entrywise min and max, which maximizes
/// epsilon among per-column box certificates.
inline std::optional<MixingConstant> mixing_constant(const StochasticKernel& K) {
    K.validate();
    const std::size_t m = K.n_from(), n = K.n_to();
    MixingConstant out;
    out.epsilon = 1.0;
    out.lambda.weights.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double lo = kInf, hi = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lo = std::min(lo, K(i, j));
            hi = std::max(hi, K(i, j));
        }
        if (hi == 0.0) continue;  // empty column contributes nothing
        if (lo == 0.0) return std::nullopt;
        out.lambda.weights[j] = std::sqrt(lo * hi);
        out.epsilon = std::min(out.epsilon, std::sqrt(lo / hi));
    }
    return out;
}

}  // namespace ferglab
