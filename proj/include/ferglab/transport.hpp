#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ferglab/common.hpp"
#include "ferglab/simplex.hpp"
#include "ferglab/types.hpp"

namespace ferglab {

/// Optimal coupling between two discrete measures of equal total mass.
/// The returned plan is certified optimal by a complementary-slackness check
/// against the duals recovered from the simplex basis.
inline TransportPlan solve_transport(const std::vector<double>& source,
                                     const std::vector<double>& target, const Matrix& cost,
                                     double tol = kDefaultTol) {
    const std::size_t m = source.size(), n = target.size();
    if (cost.rows() != m || cost.cols() != n)
        throw DimensionMismatch("cost matrix shape does not match marginals");
    double ms = 0.0, mt = 0.0;
    for (double v : source) {
        if (v < 0.0) throw InvalidModel("negative source mass");
        ms += v;
    }
    for (double v : target) {
        if (v < 0.0) throw InvalidModel("negative target mass");
        mt += v;
    }
    if (std::abs(ms - mt) > 1e-9) throw InvalidModel("transport marginals have unequal mass");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (cost(i, j) < 0.0) throw InvalidModel("negative transport cost");

    lp::Problem p;
    p.n_vars = m * n;
    p.maximize = false;
    p.objective.assign(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) p.objective[i * n + j] = cost(i, j);
    p.A.reserve(m + n);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(m * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) row[i * n + j] = 1.0;
        p.A.push_back(std::move(row));
        p.rel.push_back(lp::Rel::EQ);
        p.rhs.push_back(source[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(m * n, 0.0);
        for (std::size_t i = 0; i < m; ++i) row[i * n + j] = 1.0;
        p.A.push_back(std::move(row));
        p.rel.push_back(lp::Rel::EQ);
        p.rhs.push_back(target[j]);
    }

    lp::Solution sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal)
        throw SolverFailure("transport LP did not reach an optimum");

    // Complementary slackness: u_i + v_j <= c_ij everywhere, equality on the
    // support of the plan.
    const double cs_tol = std::max(tol, 1e-7);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double slack = cost(i, j) - sol.duals[i] - sol.duals[m + j];
            if (slack < -cs_tol)
                throw SolverFailure("transport duals violate feasibility");
            if (sol.x[i * n + j] > cs_tol && std::abs(slack) > cs_tol)
                throw SolverFailure("transport plan fails complementary slackness");
        }
    }

    TransportPlan out;
    out.plan = Matrix(m, n);
    out.cost = sol.objective;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.plan(i, j) = std::max(0.0, sol.x[i * n + j]);
    return out;
}

/// Transport optimum by successive shortest augmenting paths (min-cost flow
/// with dense Dijkstra over Johnson-reduced costs). Independent of the
/// simplex route and scales to a few thousand atoms per side; returns the
/// optimal cost only.
inline double transport_cost_flow(const std::vector<double>& source,
                                  const std::vector<double>& target, const Matrix& cost) {
    const std::size_t m = source.size(), n = target.size();
    if (cost.rows() != m || cost.cols() != n)
        throw DimensionMismatch("cost matrix shape does not match marginals");
    double ms = 0.0, mt = 0.0;
    for (double v : source) ms += v;
    for (double v : target) mt += v;
    if (std::abs(ms - mt) > 1e-9) throw InvalidModel("transport marginals have unequal mass");

    std::vector<double> rem_s = source, rem_t = target;
    Matrix flow(m, n, 0.0);
    // Reduced cost of the forward arc i->j is cost(i,j) + pi_s[i] - pi_t[j];
    // it stays nonnegative across augmentations (Johnson potentials).
    std::vector<double> pi_s(m, 0.0), pi_t(n, 0.0);
    const double mass_eps = 1e-13;

    while (true) {
        std::vector<double> ds(m, kInf), dt(n, kInf);
        std::vector<char> vs(m, 0), vt(n, 0);
        std::vector<int> prev_t(n, -1), prev_s(m, -1);
        bool have_source = false;
        for (std::size_t i = 0; i < m; ++i)
            if (rem_s[i] > mass_eps) {
                ds[i] = 0.0;
                have_source = true;
            }
        if (!have_source) break;

        while (true) {
            double best = kInf;
            int node = -1;
            bool is_src = true;
            for (std::size_t i = 0; i < m; ++i)
                if (!vs[i] && ds[i] < best) {
                    best = ds[i];
                    node = static_cast<int>(i);
                    is_src = true;
                }
            for (std::size_t j = 0; j < n; ++j)
                if (!vt[j] && dt[j] < best) {
                    best = dt[j];
                    node = static_cast<int>(j);
                    is_src = false;
                }
            if (node < 0) break;
            if (is_src) {
                const auto i = static_cast<std::size_t>(node);
                vs[i] = 1;
                for (std::size_t j = 0; j < n; ++j) {
                    if (vt[j]) continue;
                    const double rc = cost(i, j) + pi_s[i] - pi_t[j];
                    if (ds[i] + rc < dt[j]) {
                        dt[j] = ds[i] + rc;
                        prev_t[j] = static_cast<int>(i);
                    }
                }
            } else {
                const auto j = static_cast<std::size_t>(node);
                vt[j] = 1;
                for (std::size_t i = 0; i < m; ++i) {
                    if (vs[i] || flow(i, j) <= mass_eps) continue;
                    const double rc = -(cost(i, j) + pi_s[i] - pi_t[j]);
                    if (dt[j] + rc < ds[i]) {
                        ds[i] = dt[j] + rc;
                        prev_s[i] = static_cast<int>(j);
                    }
                }
            }
        }

        int sink = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (rem_t[j] > mass_eps && dt[j] < kInf && (sink < 0 || dt[j] < dt[sink]))
                sink = static_cast<int>(j);
        if (sink < 0)
            throw SolverFailure("transport flow: residual graph disconnected");
        const double cap = dt[sink];

        // Bottleneck of the alternating path sink <- i <- j' <- i' ... <- src.
        double push = rem_t[sink];
        for (int j = sink;;) {
            const int i = prev_t[j];
            const int pj = prev_s[i];
            if (pj < 0) {
                push = std::min(push, rem_s[i]);
                break;
            }
            push = std::min(push, flow(i, pj));
            j = pj;
        }
        rem_t[sink] -= push;
        for (int j = sink;;) {
            const int i = prev_t[j];
            flow(i, j) += push;
            const int pj = prev_s[i];
            if (pj < 0) {
                rem_s[i] -= push;
                break;
            }
            flow(i, pj) -= push;
            j = pj;
        }

        for (std::size_t i = 0; i < m; ++i) pi_s[i] += std::min(ds[i], cap);
        for (std::size_t j = 0; j < n; ++j) pi_t[j] += std::min(dt[j], cap);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) total += flow(i, j) * cost(i, j);
    return total;
}

/// Minimum-cost perfect matching on a square cost matrix (Jonker-Volgenant
/// style Hungarian, O(n^3)). Returns total cost; `match[i]` is the column
/// assigned to row i.
inline double solve_assignment(const Matrix& cost, std::vector<std::size_t>* match = nullptr) {
    if (cost.rows() != cost.cols()) throw DimensionMismatch("assignment matrix must be square");
    const std::size_t n = cost.rows();
    if (n == 0) return 0.0;
    const double inf = kInf;
    // 1-based potentials over rows (u) and columns (v); way[j] = predecessor.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    if (match) match->assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] == 0) continue;
        total += cost(p[j] - 1, j - 1);
        if (match) (*match)[p[j] - 1] = j - 1;
    }
    return total;
}

}  // namespace ferglab
