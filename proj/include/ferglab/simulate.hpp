#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ferglab/certify.hpp"
#include "ferglab/common.hpp"
#include "ferglab/filter.hpp"
#include "ferglab/hmm.hpp"
#include "ferglab/metrics.hpp"
#include "ferglab/parallel.hpp"
#include "ferglab/rng.hpp"
#include "ferglab/transport.hpp"
#include "ferglab/types.hpp"

namespace ferglab {

/// Ground Wasserstein-1 on X, with closed forms for spaces where the
/// transport optimum is known (scaled discrete metric: TV/2; points on a
/// line: the CDF formula). Both identities are cross-validated against the
/// LP route in the test suite; anything else falls back to the LP.
class GroundW1 {
  public:
    explicit GroundW1(const MetricSpace& space) : space_(&space) { classify(); }

    double operator()(const ProbVector& a, const ProbVector& b) const {
        switch (kind_) {
            case Kind::Scaled_discrete:
                return 0.5 * kappa_ * tv_distance(a, b);
            case Kind::Line: {
                double acc = 0.0, total = 0.0;
                for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
                    acc += a[order_[k]] - b[order_[k]];
                    total += std::abs(acc) * (xs_[k + 1] - xs_[k]);
                }
                return total;
            }
            case Kind::General:
                return w1_distance(a, b, *space_);
        }
        return 0.0;
    }

  private:
    enum class Kind { Scaled_discrete, Line, General };

    void classify() {
        const std::size_t n = space_->size();
        kind_ = Kind::General;
        if (n < 2) {
            kind_ = Kind::Scaled_discrete;
            kappa_ = 0.0;
            return;
        }
        const double kappa = space_->dist(0, 1);
        bool discrete = kappa > 0.0;
        for (std::size_t i = 0; i < n && discrete; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double want = i == j ? 0.0 : kappa;
                if (std::abs(space_->dist(i, j) - want) > 1e-12) {
                    discrete = false;
                    break;
                }
            }
        if (discrete) {
            kind_ = Kind::Scaled_discrete;
            kappa_ = kappa;
            return;
        }
        // Line embedding test: coordinates from distances to point 0, with the
        // farthest point as the anchor to fix orientation.
        std::size_t anchor = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (space_->dist(0, i) > space_->dist(0, anchor)) anchor = i;
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = space_->dist(anchor, i);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(space_->dist(i, j) - std::abs(x[i] - x[j])) > 1e-12) return;
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(),
                  [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
        xs_.resize(n);
        for (std::size_t k = 0; k < n; ++k) xs_[k] = x[order_[k]];
        kind_ = Kind::Line;
    }

    const MetricSpace* space_;
    Kind kind_ = Kind::General;
    double kappa_ = 1.0;
    std::vector<std::size_t> order_;
    std::vector<double> xs_;
};

inline constexpr std::size_t kDefaultCostCap = std::size_t{1} << 20;

/// Exact W1 between two finite-support measures on Z: ground cost is the W1
/// distance between atoms, the outer problem is a transport LP (or an
/// assignment when both sides are equal-size, equal-weight clouds).
inline double w1_on_PZ(const AtomicMeasureOnZ& A, const AtomicMeasureOnZ& B,
                       const MetricSpace& space, std::size_t cost_cap = kDefaultCostCap) {
    if (A.size() == 0 || B.size() == 0) throw InvalidModel("w1_on_PZ: empty measure");
    if (A.size() * B.size() > cost_cap)
        throw AtomCapExceeded("w1_on_PZ: atom-count product exceeds the cost-entry cap");
    const GroundW1 ground(space);

    bool uniform = A.size() == B.size();
    for (std::size_t i = 0; uniform && i < A.size(); ++i)
        uniform = std::abs(A.weights[i] - 1.0 / A.size()) < 1e-12 &&
                  std::abs(B.weights[i] - 1.0 / B.size()) < 1e-12;

    Matrix cost(A.size(), B.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < B.size(); ++j) cost(i, j) = ground(A.atoms[i], B.atoms[j]);

    if (uniform) return solve_assignment(cost) / static_cast<double>(A.size());
    // Instances beyond the dense simplex's variable budget go through the
    // min-cost-flow route (same optimum, no complementary-slackness witness).
    if (A.size() * B.size() > 5000) return transport_cost_flow(A.weights, B.weights, cost);
    return solve_transport(A.weights, B.weights, cost).cost;
}

/// Bounded-Lipschitz distance between finite-support measures on Z, with the
/// W1 distance between atoms as the ground metric on Z.
inline double bl_on_PZ(const AtomicMeasureOnZ& A, const AtomicMeasureOnZ& B,
                       const MetricSpace& space) {
    const std::size_t na = A.size(), nb = B.size();
    if (na == 0 || nb == 0) throw InvalidModel("bl_on_PZ: empty measure");
    const GroundW1 ground(space);
    const std::size_t n = na + nb;
    MetricSpace lifted;
    lifted.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) lifted.points[i] = "z" + std::to_string(i);
    lifted.dist = Matrix(n, n);
    auto atom = [&](std::size_t k) -> const ProbVector& {
        return k < na ? A.atoms[k] : B.atoms[k - na];
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            lifted.dist(i, j) = lifted.dist(j, i) = ground(atom(i), atom(j));
    lifted.diameter = *std::max_element(lifted.dist.data().begin(), lifted.dist.data().end());

    ProbVector p, q;
    p.weights.assign(n, 0.0);
    q.weights.assign(n, 0.0);
    for (std::size_t i = 0; i < na; ++i) p.weights[i] = A.weights[i];
    for (std::size_t j = 0; j < nb; ++j) q.weights[na + j] = B.weights[j];
    return bl_distance(p, q, lifted);
}

struct Violation {
    std::size_t pair_index = 0;
    std::size_t n = 0;
    double ratio = 0.0;
};

struct ContractionResult {
    std::size_t pairs_tested = 0;
    double max_ratio = 0.0;
    double bound = 0.0;
    std::vector<Violation> violations;
};

/// Samples Dirichlet prior pairs and measures the exact one-step ratio
/// W1(eta(.|z0), eta(.|z0')) / W1(z0, z0') against the certified bound beta.
inline ContractionResult one_step_contraction_test(const HmmModel& model, std::size_t n_pairs,
                                                   std::uint64_t seed, double tol = kDefaultTol,
                                                   std::size_t n_threads = 1) {
    const CertificationReport cert = certify(model);
    ContractionResult res;
    res.bound = cert.beta;
    const std::size_t n = model.n_states();
    // Per-pair ratios are written by index and reduced sequentially, so the
    // result is identical for any worker count.
    std::vector<double> ratios(n_pairs, -1.0);
    parallel_for(n_pairs, n_threads, [&](std::size_t k) {
        auto rng = make_rng(seed, k);
        const ProbVector z0 = sample_dirichlet(rng, n);
        const ProbVector z1 = sample_dirichlet(rng, n);
        const double denom = w1_distance(z0, z1, model.space);
        if (denom < 1e-8) return;  // degenerate pair, skipped by design
        const double num = w1_on_PZ(filter_branches(model, z0), filter_branches(model, z1),
                                    model.space);
        ratios[k] = num / denom;
    });
    for (std::size_t k = 0; k < n_pairs; ++k) {
        if (ratios[k] < 0.0) continue;
        res.max_ratio = std::max(res.max_ratio, ratios[k]);
        if (ratios[k] > res.bound + tol) res.violations.push_back({k, 1, ratios[k]});
        ++res.pairs_tested;
    }
    return res;
}

enum class DecayMode { Exact, MonteCarlo };

struct DecayCurve {
    std::vector<std::size_t> n_values;
    std::vector<double> distances;
    std::vector<double> bounds;   // beta^n * W1(z0, z0'); zero when no beta given
    std::vector<double> stderrs;  // bootstrap; zero in exact mode
    DecayMode mode = DecayMode::Exact;
    double fitted_rate = 0.0;  // least-squares slope of log(distance) vs n

    std::size_t count_violations(double tol = kDefaultTol) const {
        std::size_t v = 0;
        for (std::size_t i = 0; i < distances.size(); ++i)
            if (bounds[i] > 0.0 && distances[i] > bounds[i] + tol) ++v;
        return v;
    }
};

namespace detail {

/// Slope of log(d) against n, restricted to points above the noise floor.
inline double fit_log_slope(const std::vector<std::size_t>& ns, const std::vector<double>& ds,
                            double floor = 1e-7) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds[i] > floor) {
            xs.push_back(static_cast<double>(ns[i]));
            ys.push_back(std::log(ds[i]));
        }
    }
    if (xs.size() < 2) return 0.0;
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace detail

/// Exact n-step decay of W1(eta^n(.|z0), eta^n(.|z0')) for n = 0..n_max.
inline DecayCurve n_step_decay(const HmmModel& model, const ProbVector& z0, const ProbVector& z1,
                               std::size_t n_max, std::size_t atom_cap = kDefaultAtomCap,
                               std::optional<double> beta = std::nullopt) {
    DecayCurve curve;
    curve.mode = DecayMode::Exact;
    // Upfront guard on the worst-case branch count |Y|^n_max so callers can
    // fall back to monte-carlo without paying for the partial expansion.
    double worst = 1.0;
    for (std::size_t k = 0; k < n_max; ++k) {
        worst *= static_cast<double>(model.n_obs());
        if (worst > static_cast<double>(atom_cap))
            throw AtomCapExceeded("n_step_decay: |Y|^n_max exceeds the atom cap");
    }
    const double d0 = w1_distance(z0, z1, model.space);
    AtomicMeasureOnZ A{{z0}, {1.0}}, B{{z1}, {1.0}};
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            auto grow = [&](AtomicMeasureOnZ& M) {
                if (M.size() * model.n_obs() > atom_cap)
                    throw AtomCapExceeded("n_step_decay: atom cap exceeded at n = " +
                                          std::to_string(n));
                AtomicMeasureOnZ next;
                for (std::size_t a = 0; a < M.size(); ++a)
                    for (auto& b : filter_branch_list(model, M.atoms[a])) {
                        next.atoms.push_back(std::move(b.posterior));
                        next.weights.push_back(M.weights[a] * b.weight);
                    }
                M = std::move(next);
            };
            grow(A);
            grow(B);
        }
        curve.n_values.push_back(n);
        curve.distances.push_back(n == 0 ? d0 : w1_on_PZ(A, B, model.space));
        curve.bounds.push_back(beta ? std::pow(*beta, static_cast<double>(n)) * d0 : 0.0);
        curve.stderrs.push_back(0.0);
    }
    curve.fitted_rate = detail::fit_log_slope(curve.n_values, curve.distances);
    return curve;
}

/// Simulates a hidden/observation path of length n_steps started from prior z
/// and returns the resulting filter trajectory. The per-path seed depends only
/// on (seed, path index), so identical priors give identical ensembles.
inline FilterPath simulate_filter_path(const HmmModel& model, const ProbVector& z,
                                       std::size_t n_steps, std::uint64_t seed,
                                       std::uint64_t path_index) {
    auto rng = make_rng(seed, path_index);
    std::vector<std::size_t> ys(n_steps);
    std::size_t x = sample_categorical(rng, z.weights);
    for (std::size_t k = 0; k < n_steps; ++k) {
        x = sample_categorical(rng, model.T.rows.row(x));
        ys[k] = sample_categorical(rng, model.Q.rows.row(x));
    }
    return filter_path(model, z, ys);
}

/// Monte Carlo decay curve: empirical clouds of Z_n from both priors,
/// distances via the assignment special case, bootstrap standard errors by
/// resampling paths (reusing the precomputed ground-cost matrix).
inline DecayCurve mc_decay(const HmmModel& model, const ProbVector& z0, const ProbVector& z1,
                           std::size_t n_max, std::size_t n_paths, std::uint64_t seed,
                           std::optional<double> beta = std::nullopt,
                           std::size_t n_bootstrap = 20, std::size_t n_threads = 1) {
    if (n_paths == 0) throw InvalidModel("mc_decay needs at least one path");
    std::vector<FilterPath> ens0(n_paths), ens1(n_paths);
    parallel_for(n_paths, n_threads, [&](std::size_t p) {
        ens0[p] = simulate_filter_path(model, z0, n_max, seed, p);
        ens1[p] = simulate_filter_path(model, z1, n_max, seed, p);
    });
    const GroundW1 ground(model.space);
    const double d0 = w1_distance(z0, z1, model.space);

    DecayCurve curve;
    curve.mode = DecayMode::MonteCarlo;
    auto boot_rng = make_rng(seed, 0x0b00'7000 + n_paths);
    std::uniform_int_distribution<std::size_t> pick(0, n_paths - 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        curve.n_values.push_back(n);
        curve.bounds.push_back(beta ? std::pow(*beta, static_cast<double>(n)) * d0 : 0.0);
        if (n == 0) {
            curve.distances.push_back(d0);
            curve.stderrs.push_back(0.0);
            continue;
        }
        Matrix cost(n_paths, n_paths);
        for (std::size_t i = 0; i < n_paths; ++i)
            for (std::size_t j = 0; j < n_paths; ++j)
                cost(i, j) = ground(ens0[i].states[n], ens1[j].states[n]);
        curve.distances.push_back(solve_assignment(cost) / static_cast<double>(n_paths));

        double mean = 0.0, sq = 0.0;
        for (std::size_t b = 0; b < n_bootstrap; ++b) {
            Matrix bc(n_paths, n_paths);
            std::vector<std::size_t> ri(n_paths), rj(n_paths);
            for (std::size_t k = 0; k < n_paths; ++k) {
                ri[k] = pick(boot_rng);
                rj[k] = pick(boot_rng);
            }
            for (std::size_t i = 0; i < n_paths; ++i)
                for (std::size_t j = 0; j < n_paths; ++j) bc(i, j) = cost(ri[i], rj[j]);
            const double d = solve_assignment(bc) / static_cast<double>(n_paths);
            mean += d;
            sq += d * d;
        }
        mean /= static_cast<double>(n_bootstrap);
        const double var = std::max(0.0, sq / static_cast<double>(n_bootstrap) - mean * mean);
        curve.stderrs.push_back(std::sqrt(var));
    }
    curve.fitted_rate = detail::fit_log_slope(curve.n_values, curve.distances);
    return curve;
}

/// Lifted bounded-Lipschitz ratios rho_BL(eta^n(.|z), eta^n(.|z')) /
/// rho_BL(z, z') for n = 1..n_max against the bound 3(1 + alpha).
inline ContractionResult bl_regularity_test(const HmmModel& model, std::size_t n_max,
                                            std::size_t n_pairs, std::uint64_t seed,
                                            std::size_t atom_cap = kDefaultAtomCap,
                                            double tol = kDefaultTol) {
    const double alpha = estimate_alpha(model.T, model.space).alpha;
    ContractionResult res;
    res.bound = 3.0 * (1.0 + alpha);
    for (std::size_t k = 0; k < n_pairs; ++k) {
        auto rng = make_rng(seed, k);
        const ProbVector z0 = sample_dirichlet(rng, model.n_states());
        const ProbVector z1 = sample_dirichlet(rng, model.n_states());
        const double denom = bl_distance(z0, z1, model.space);
        if (denom < 1e-8) continue;
        AtomicMeasureOnZ A{{z0}, {1.0}}, B{{z1}, {1.0}};
        for (std::size_t n = 1; n <= n_max; ++n) {
            auto grow = [&](AtomicMeasureOnZ& M) {
                if (M.size() * model.n_obs() > atom_cap)
                    throw AtomCapExceeded("bl_regularity_test: atom cap exceeded");
                AtomicMeasureOnZ next;
                for (std::size_t a = 0; a < M.size(); ++a)
                    for (auto& b : filter_branch_list(model, M.atoms[a])) {
                        next.atoms.push_back(std::move(b.posterior));
                        next.weights.push_back(M.weights[a] * b.weight);
                    }
                M = std::move(next);
            };
            grow(A);
            grow(B);
            const double ratio = bl_on_PZ(A, B, model.space) / denom;
            res.max_ratio = std::max(res.max_ratio, ratio);
            if (ratio > res.bound + tol) res.violations.push_back({k, n, ratio});
        }
        ++res.pairs_tested;
    }
    return res;
}

struct ReachabilityTrace {
    std::vector<ProbVector> iterates;   // z_0, z_1, ... under constant y'
    std::vector<double> hilbert_gaps;   // gap[k] = h(z_{k+1}, z_k)
    ProbVector limit;
    double rate_bound = 1.0;  // Birkhoff-based contraction rate c, when mixing
    bool converged = false;
    double max_gap_ratio = 0.0;  // over successive finite gaps from iteration 1
};

/// Iterates the Bayes update under the constant observation y' and records
/// Hilbert gaps. Requires a positive likelihood floor for y' (or a constant
/// column). When T is mixing, successive gaps contract at rate <= rate_bound.
inline ReachabilityTrace reachable_state_trace(const HmmModel& model, const ProbVector& mu,
                                               std::size_t y_prime, std::size_t max_iter = 10000,
                                               double gap_tol = 1e-10) {
    if (y_prime >= model.n_obs()) throw DimensionMismatch("unknown observation index");
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < model.n_states(); ++i) {
        lo = std::min(lo, model.Q(i, y_prime));
        hi = std::max(hi, model.Q(i, y_prime));
    }
    const bool constant_col = lo > 0.0 && hi - lo <= kStochasticTol;
    if (lo <= 0.0 && !constant_col)
        throw PreconditionUnmet("observation " + model.obs_labels[y_prime] +
                                    " has no uniform positive likelihood floor",
                                lo);

    ReachabilityTrace trace;
    if (auto mix = mixing_constant(model.T)) {
        const double e2 = mix->epsilon * mix->epsilon * lo;
        trace.rate_bound = (1.0 - e2) / (1.0 + e2);
    }
    trace.iterates.push_back(mu);
    for (std::size_t k = 0; k < max_iter; ++k) {
        ProbVector next = bayes_update(model, trace.iterates.back(), y_prime);
        const double gap = hilbert_metric(next.weights, trace.iterates.back().weights);
        trace.iterates.push_back(std::move(next));
        trace.hilbert_gaps.push_back(gap);
        if (trace.hilbert_gaps.size() >= 2) {
            const double prev = trace.hilbert_gaps[trace.hilbert_gaps.size() - 2];
            if (std::isfinite(gap) && std::isfinite(prev) && prev > 1e-13)
                trace.max_gap_ratio = std::max(trace.max_gap_ratio, gap / prev);
        }
        if (gap < gap_tol) {
            trace.converged = true;
            break;
        }
    }
    trace.limit = trace.iterates.back();
    return trace;
}

/// Empirical Cesaro occupation measure of the filter chain on Z, pooled over
/// paths and times 1..N with equal weights.
inline AtomicMeasureOnZ occupation_average(const HmmModel& model, const ProbVector& prior,
                                           std::size_t N, std::size_t n_paths,
                                           std::uint64_t seed) {
    if (N == 0 || n_paths == 0) throw InvalidModel("occupation_average needs N, n_paths >= 1");
    AtomicMeasureOnZ occ;
    occ.atoms.reserve(N * n_paths);
    const double w = 1.0 / static_cast<double>(N * n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        FilterPath path = simulate_filter_path(model, prior, N, seed, p);
        for (std::size_t n = 1; n <= N; ++n) {
            occ.atoms.push_back(std::move(path.states[n]));
            occ.weights.push_back(w);
        }
    }
    return occ;
}

struct QuantizedCloud {
    std::vector<ProbVector> centers;  // weighted means of the merged atoms
    std::vector<double> weights;
    std::vector<std::size_t> atom_cell;  // original atom index -> cell index
};

/// Merges atoms whose coordinates agree after rounding to multiples of h.
/// Cell centers are the weighted means of their members, renormalized.
inline QuantizedCloud quantize_cloud(const AtomicMeasureOnZ& M, double h) {
    if (!(h > 0.0)) throw InvalidModel("quantization step must be positive");
    QuantizedCloud out;
    out.atom_cell.resize(M.size());
    std::map<std::vector<long>, std::size_t> cells;
    std::vector<std::vector<double>> sums;
    for (std::size_t a = 0; a < M.size(); ++a) {
        std::vector<long> key(M.atoms[a].size());
        for (std::size_t i = 0; i < key.size(); ++i)
            key[i] = std::lround(M.atoms[a][i] / h);
        auto [it, inserted] = cells.try_emplace(std::move(key), cells.size());
        if (inserted) {
            sums.emplace_back(M.atoms[a].size(), 0.0);
            out.weights.push_back(0.0);
        }
        const std::size_t c = it->second;
        out.atom_cell[a] = c;
        out.weights[c] += M.weights[a];
        for (std::size_t i = 0; i < M.atoms[a].size(); ++i)
            sums[c][i] += M.weights[a] * M.atoms[a][i];
    }
    out.centers.resize(sums.size());
    for (std::size_t c = 0; c < sums.size(); ++c) {
        double total = 0.0;
        for (double v : sums[c]) total += v;
        for (double& v : sums[c]) v /= total;
        out.centers[c] = ProbVector{std::move(sums[c])};
    }
    return out;
}

struct OccupationDistance {
    double mean = 0.0;
    double stderr_ = 0.0;  // bootstrap spread over atom resampling
    std::size_t cells_a = 0, cells_b = 0;
    double quant_h = 0.0;
};

/// W1 between two large atom clouds: quantize each cloud on an h-grid of the
/// simplex (moving each atom by at most ~h in ground W1), then solve the
/// merged weighted transport problem exactly by the flow route. Bootstrap
/// error bars come from resampling atoms with replacement, reusing the
/// cell-to-cell ground costs.
inline OccupationDistance occupation_distance(const AtomicMeasureOnZ& A,
                                              const AtomicMeasureOnZ& B,
                                              const MetricSpace& space, double quant_h = 0.01,
                                              std::size_t n_bootstrap = 8,
                                              std::uint64_t seed = 0) {
    const GroundW1 ground(space);
    const QuantizedCloud qa = quantize_cloud(A, quant_h);
    const QuantizedCloud qb = quantize_cloud(B, quant_h);
    OccupationDistance out;
    out.cells_a = qa.centers.size();
    out.cells_b = qb.centers.size();
    out.quant_h = quant_h;

    Matrix cost(qa.centers.size(), qb.centers.size());
    for (std::size_t i = 0; i < qa.centers.size(); ++i)
        for (std::size_t j = 0; j < qb.centers.size(); ++j)
            cost(i, j) = ground(qa.centers[i], qb.centers[j]);
    out.mean = transport_cost_flow(qa.weights, qb.weights, cost);

    if (n_bootstrap >= 2) {
        auto rng = make_rng(seed, 0xb007);
        // Cumulative atom weights so each bootstrap draw is a binary search.
        auto cumulate = [](const AtomicMeasureOnZ& M) {
            std::vector<double> c(M.size());
            double s = 0.0;
            for (std::size_t k = 0; k < M.size(); ++k) c[k] = (s += M.weights[k]);
            return c;
        };
        const std::vector<double> cum_a = cumulate(A), cum_b = cumulate(B);
        std::vector<double> vals(n_bootstrap);
        for (std::size_t b = 0; b < n_bootstrap; ++b) {
            auto resample = [&](const AtomicMeasureOnZ& M, const QuantizedCloud& q,
                                const std::vector<double>& cum, std::size_t n_cells) {
                std::uniform_real_distribution<double> u(0.0, cum.back());
                std::vector<double> w(n_cells, 0.0);
                for (std::size_t k = 0; k < M.size(); ++k) {
                    const auto it = std::upper_bound(cum.begin(), cum.end(), u(rng));
                    const auto a = std::min<std::size_t>(
                        static_cast<std::size_t>(it - cum.begin()), M.size() - 1);
                    w[q.atom_cell[a]] += 1.0 / static_cast<double>(M.size());
                }
                return w;
            };
            vals[b] = transport_cost_flow(resample(A, qa, cum_a, qa.centers.size()),
                                          resample(B, qb, cum_b, qb.centers.size()), cost);
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(n_bootstrap);
        double sq = 0.0;
        for (double v : vals) sq += (v - mean) * (v - mean);
        out.stderr_ = std::sqrt(sq / static_cast<double>(n_bootstrap - 1));
    }
    return out;
}

}  // namespace ferglab
