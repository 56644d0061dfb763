// Shared model builders for the test suites.
#pragma once

#include "ferglab/ferglab.hpp"

namespace testmodels {

/// 4-state, 2-observation chain on the discrete metric; epsilon controls how
/// informative the channel is.
inline ferglab::HmmModel four_state(double eps = 0.1) {
    ferglab::HmmModel m;
    m.space = ferglab::MetricSpace::discrete(4);
    m.obs_labels = {"0", "1"};
    m.T.rows = ferglab::Matrix::from_rows({{1.0 / 3, 1.0 / 3, 1.0 / 6, 1.0 / 6},
                                           {0.0, 0.5, 1.0 / 6, 1.0 / 3},
                                           {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
                                           {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}});
    m.Q.rows = ferglab::Matrix::from_rows(
        {{1.0, 0.0}, {1.0 - eps, eps}, {eps, 1.0 - eps}, {eps, 1.0 - eps}});
    m.validate();
    return m;
}

/// Truncated-Gaussian transitions on an n-point [0,1] grid with a two-symbol
/// ramp channel whose likelihoods stay in [lo, 1-lo].
inline ferglab::HmmModel gaussian_grid(std::size_t n, double sigma, double lo = 0.3,
                                       double hi = 0.7) {
    ferglab::HmmModel m;
    auto [T, space] = ferglab::build_truncated_gaussian(n, sigma);
    m.T = std::move(T);
    m.space = std::move(space);
    m.gaussian_sigma = sigma;
    m.obs_labels = {"low", "high"};
    m.Q.rows = ferglab::Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        m.Q.rows(i, 0) = lo + (hi - lo) * t;
        m.Q.rows(i, 1) = 1.0 - m.Q.rows(i, 0);
    }
    m.validate();
    return m;
}

/// Same transition matrix as four_state but with a channel whose columns are
/// constant: observations carry no information about the state.
inline ferglab::HmmModel constant_channel(double p0 = 0.4) {
    ferglab::HmmModel m = four_state(0.1);
    for (std::size_t i = 0; i < 4; ++i) {
        m.Q.rows(i, 0) = p0;
        m.Q.rows(i, 1) = 1.0 - p0;
    }
    m.validate();
    return m;
}

/// Rank-one transitions: every row equals the given distribution, so the
/// filter kernel does not depend on the prior.
inline ferglab::HmmModel rank_one(const std::vector<double>& row, double eps = 0.2) {
    ferglab::HmmModel m;
    const std::size_t n = row.size();
    m.space = ferglab::MetricSpace::discrete(n);
    m.obs_labels = {"0", "1"};
    m.T.rows = ferglab::Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.T.rows(i, j) = row[j];
    m.Q.rows = ferglab::Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = i % 2 == 0 ? eps : 1.0 - eps;
        m.Q.rows(i, 0) = q;
        m.Q.rows(i, 1) = 1.0 - q;
    }
    m.validate();
    return m;
}

}  // namespace testmodels
