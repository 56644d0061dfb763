#pragma once

#include <cstddef>
#include <vector>

#include "ferglab/common.hpp"

namespace ferglab::lp {

enum class Rel { LE, GE, EQ };

/// min/max c.x  s.t.  A x {<=,==,>=} b,  x >= 0.
struct Problem {
    std::size_t n_vars = 0;
    std::vector<double> objective;
    bool maximize = false;
    std::vector<std::vector<double>> A;
    std::vector<Rel> rel;
    std::vector<double> rhs;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// One multiplier per constraint, in the sign convention of the stated
    /// problem (max: c_j - y.A_j <= 0 after negation; for min problems the
    /// reduced costs c_j - y.A_j are >= 0 at the optimum).
    std::vector<double> duals;
};

struct Options {
    std::size_t max_vars = 5000;
    std::size_t max_iters = 200000;
    double eps = 1e-10;
};

namespace detail {

class Tableau {
  public:
    Tableau(const Problem& p, const Options& opt) : opt_(opt) {
        const std::size_t m = p.A.size();
        n_ = p.n_vars;
        m_ = m;
        flip_.assign(m, false);

        // Column layout: structural | slack/surplus | one artificial per row.
        n_slack_ = 0;
        for (Rel r : p.rel)
            if (r != Rel::EQ) ++n_slack_;
        ncols_ = n_ + n_slack_ + m_;
        art0_ = n_ + n_slack_;
        blocked_.assign(ncols_, false);
        for (std::size_t i = 0; i < m_; ++i) blocked_[art0_ + i] = true;

        tab_.assign(m_, std::vector<double>(ncols_ + 1, 0.0));
        basis_.assign(m_, 0);
        std::size_t slack_idx = n_;
        for (std::size_t i = 0; i < m_; ++i) {
            double sign = 1.0;
            if (p.rhs[i] < 0.0) {
                sign = -1.0;
                flip_[i] = true;
            }
            for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sign * p.A[i][j];
            tab_[i][ncols_] = sign * p.rhs[i];
            Rel r = p.rel[i];
            if (r != Rel::EQ) {
                // <= with a flipped row behaves like >=, and vice versa
                const bool le = (r == Rel::LE) != flip_[i];
                tab_[i][slack_idx] = le ? 1.0 : -1.0;
                if (le) {
                    basis_[i] = slack_idx;
                } else {
                    basis_[i] = art0_ + i;
                }
                ++slack_idx;
            } else {
                basis_[i] = art0_ + i;
            }
            tab_[i][art0_ + i] = 1.0;
        }
    }

    Status run_two_phase(const std::vector<double>& cost_min) {
        // Phase 1: minimize the sum of basic artificials.
        bool need_phase1 = false;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= art0_) need_phase1 = true;
        if (need_phase1) {
            std::vector<double> c1(ncols_, 0.0);
            for (std::size_t i = 0; i < m_; ++i) c1[art0_ + i] = 1.0;
            reset_objective(c1);
            Status s = iterate(c1);
            // The phase-1 objective is bounded below by zero, so an
            // "unbounded" verdict can only be a noise-driven entering column
            // taken after feasibility was already reached.
            if (s == Status::Unbounded && objective_value(c1) <= 1e-7) s = Status::Optimal;
            if (s != Status::Optimal) return Status::Infeasible;
            if (objective_value(c1) > 1e-7) return Status::Infeasible;
            purge_artificials();
        }
        cost_.assign(ncols_, 0.0);
        for (std::size_t j = 0; j < n_ && j < cost_min.size(); ++j) cost_[j] = cost_min[j];
        reset_objective(cost_);
        return iterate(cost_);
    }

    std::vector<double> primal() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = tab_[i][ncols_];
        return x;
    }

    double objective_value(const std::vector<double>& c) const {
        double v = 0.0;
        for (std::size_t i = 0; i < m_; ++i) v += c[basis_[i]] * tab_[i][ncols_];
        return v;
    }

    /// y = c_B B^{-1}, read through the artificial columns, unflipped.
    std::vector<double> duals() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < m_; ++k) v += cost_[basis_[k]] * tab_[k][art0_ + i];
            y[i] = flip_[i] ? -v : v;
        }
        return y;
    }

  private:
    void reset_objective(const std::vector<double>& c) {
        obj_.assign(ncols_ + 1, 0.0);
        for (std::size_t j = 0; j < ncols_; ++j) {
            double z = 0.0;
            for (std::size_t i = 0; i < m_; ++i) z += c[basis_[i]] * tab_[i][j];
            obj_[j] = c[j] - z;
        }
        obj_[ncols_] = -objective_value(c);
    }

    Status iterate(const std::vector<double>& c) {
        std::size_t stall = 0;
        bool bland = false;
        double last = objective_value(c);
        for (std::size_t it = 0; it < opt_.max_iters; ++it) {
            const std::size_t enter = pick_entering(bland);
            if (enter == ncols_) return Status::Optimal;
            const std::size_t leave = pick_leaving(enter);
            if (leave == m_) return Status::Unbounded;
            pivot(leave, enter);
            const double now = objective_value(c);
            if (now < last - opt_.eps) {
                last = now;
                stall = 0;
            } else if (++stall > 64) {
                bland = true;  // degenerate plateau: switch to Bland's rule
            }
        }
        throw SolverFailure("simplex iteration limit exceeded");
    }

    std::size_t pick_entering(bool bland) const {
        std::size_t best = ncols_;
        double best_val = -opt_.eps;
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (blocked_[j]) continue;
            if (obj_[j] < best_val) {
                if (bland) return j;
                best_val = obj_[j];
                best = j;
            }
        }
        return best;
    }

    std::size_t pick_leaving(std::size_t enter) const {
        std::size_t best = ratio_test(enter, opt_.eps);
        if (best == m_) {
            // Data spanning many decades can leave every positive entry of the
            // column under eps; retry relative to the column maximum before
            // concluding the direction is unbounded.
            double col_max = 0.0;
            for (std::size_t i = 0; i < m_; ++i) col_max = std::max(col_max, tab_[i][enter]);
            if (col_max > 1e-13) best = ratio_test(enter, std::max(1e-13, col_max * 1e-3));
        }
        return best;
    }

    std::size_t ratio_test(std::size_t enter, double pivot_floor) const {
        std::size_t best = m_;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = tab_[i][enter];
            if (a <= pivot_floor) continue;
            const double ratio = tab_[i][ncols_] / a;
            if (best == m_ || ratio < best_ratio - opt_.eps ||
                (ratio < best_ratio + opt_.eps && basis_[i] < basis_[best])) {
                best = i;
                best_ratio = ratio;
            }
        }
        return best;
    }

    void pivot(std::size_t row, std::size_t col) {
        auto& pr = tab_[row];
        const double pv = pr[col];
        for (double& v : pr) v /= pv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = tab_[i][col];
            if (f == 0.0) continue;
            auto& ri = tab_[i];
            for (std::size_t j = 0; j <= ncols_; ++j) ri[j] -= f * pr[j];
        }
        const double f = obj_[col];
        if (f != 0.0)
            for (std::size_t j = 0; j <= ncols_; ++j) obj_[j] -= f * pr[j];
        basis_[row] = col;
    }

    /// After phase 1, pivot basic artificials out where a nonzero unblocked
    /// column exists; a fully zero row is a redundant constraint and its
    /// artificial may stay basic at level zero.
    void purge_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < art0_) continue;
            for (std::size_t j = 0; j < art0_; ++j) {
                if (std::abs(tab_[i][j]) > opt_.eps) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    Options opt_;
    std::size_t n_ = 0, m_ = 0, n_slack_ = 0, ncols_ = 0, art0_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<double> obj_;
    std::vector<double> cost_;
    std::vector<std::size_t> basis_;
    std::vector<bool> flip_, blocked_;
};

}  // namespace detail

inline Solution solve(const Problem& p, const Options& opt = {}) {
    if (p.n_vars > opt.max_vars)
        throw SolverFailure("LP exceeds the dense-solver variable cap");
    if (p.A.size() != p.rel.size() || p.A.size() != p.rhs.size() ||
        p.objective.size() != p.n_vars)
        throw DimensionMismatch("inconsistent LP dimensions");
    for (const auto& row : p.A)
        if (row.size() != p.n_vars) throw DimensionMismatch("ragged LP constraint row");

    std::vector<double> c = p.objective;
    if (p.maximize)
        for (double& v : c) v = -v;

    detail::Tableau t(p, opt);
    Solution sol;
    sol.status = t.run_two_phase(c);
    if (sol.status != Status::Optimal) return sol;
    sol.x = t.primal();
    sol.duals = t.duals();
    sol.objective = 0.0;
    for (std::size_t j = 0; j < p.n_vars; ++j) sol.objective += c[j] * sol.x[j];
    if (p.maximize) {
        sol.objective = -sol.objective;
        for (double& y : sol.duals) y = -y;
    }
    return sol;
}

}  // namespace ferglab::lp
