#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "ferglab/common.hpp"

namespace ferglab {

/// Dense row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return {};
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_)
                throw DimensionMismatch("ragged rows in matrix literal");
            std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.cols_);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<double> row(std::size_t i) const {
        return {data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_};
    }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Finite metric space: labelled points plus a distance matrix.
struct MetricSpace {
    std::vector<std::string> points;
    Matrix dist;
    double diameter = 0.0;

    std::size_t size() const { return points.size(); }

    /// Validates symmetry, zero diagonal, triangle inequality; recomputes diameter.
    void validate(double tol = kDefaultTol) {
        const std::size_t n = size();
        if (dist.rows() != n || dist.cols() != n)
            throw InvalidModel("distance matrix shape does not match point count");
        double diam = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(dist(i, i)) > tol)
                throw InvalidModel("distance matrix has nonzero diagonal at " + points[i]);
            for (std::size_t j = 0; j < n; ++j) {
                const double d = dist(i, j);
                if (!std::isfinite(d) || d < -tol)
                    throw InvalidModel("distance matrix has a negative or non-finite entry");
                if (std::abs(d - dist(j, i)) > tol)
                    throw InvalidModel("distance matrix is not symmetric");
                diam = std::max(diam, d);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (dist(i, j) > dist(i, k) + dist(k, j) + tol)
                        throw InvalidModel("triangle inequality violated");
        diameter = diam;
    }

    static MetricSpace discrete(std::size_t n) {
        MetricSpace s;
        s.points.reserve(n);
        for (std::size_t i = 0; i < n; ++i) s.points.push_back(std::to_string(i));
        s.dist = Matrix(n, n, 1.0);
        for (std::size_t i = 0; i < n; ++i) s.dist(i, i) = 0.0;
        s.diameter = n > 1 ? 1.0 : 0.0;
        return s;
    }

    /// Uniform grid of n points spanning [a, b] with Euclidean distance.
    static MetricSpace grid1d(std::size_t n, double a = 0.0, double b = 1.0) {
        if (n < 1 || !(b > a)) throw InvalidModel("grid-1d requires n >= 1 and b > a");
        MetricSpace s;
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i)
            xs[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        s.points.reserve(n);
        for (double x : xs) s.points.push_back(std::to_string(x));
        s.dist = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s.dist(i, j) = std::abs(xs[i] - xs[j]);
        s.diameter = b - a;
        return s;
    }
};

/// Probability vector over the points of a space.
struct ProbVector {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }

    void validate(double tol = kStochasticTol) const {
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw InvalidModel("probability vector has a negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > tol)
            throw InvalidModel("probability vector sums to " + std::to_string(sum));
    }

    static ProbVector point_mass(std::size_t n, std::size_t at) {
        ProbVector z;
        z.weights.assign(n, 0.0);
        z.weights.at(at) = 1.0;
        return z;
    }

    static ProbVector uniform(std::size_t n) {
        ProbVector z;
        z.weights.assign(n, 1.0 / static_cast<double>(n));
        return z;
    }
};

/// Nonnegative (not necessarily normalized) vector of masses.
struct NonnegVector {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

/// Row-stochastic kernel: one row per source point.
struct StochasticKernel {
    Matrix rows;

    std::size_t n_from() const { return rows.rows(); }
    std::size_t n_to() const { return rows.cols(); }
    double operator()(std::size_t i, std::size_t j) const { return rows(i, j); }

    void validate(double tol = kStochasticTol) const {
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < rows.cols(); ++j) {
                const double v = rows(i, j);
                if (!(v >= 0.0) || v > 1.0 + tol)
                    throw InvalidModel("kernel entry outside [0,1] in row " + std::to_string(i));
                sum += v;
            }
            if (std::abs(sum - 1.0) > tol)
                throw InvalidModel("kernel row " + std::to_string(i) + " sums to " +
                                   std::to_string(sum));
        }
    }
};

/// Right action of a kernel on a (sub)probability vector: (zK)_j = sum_i z_i K_ij.
inline std::vector<double> apply_kernel(const std::vector<double>& z, const Matrix& K) {
    if (z.size() != K.rows()) throw DimensionMismatch("vector/kernel size mismatch");
    std::vector<double> out(K.cols(), 0.0);
    for (std::size_t i = 0; i < K.rows(); ++i) {
        const double zi = z[i];
        if (zi == 0.0) continue;
        for (std::size_t j = 0; j < K.cols(); ++j) out[j] += zi * K(i, j);
    }
    return out;
}

inline ProbVector apply_kernel(const ProbVector& z, const StochasticKernel& K) {
    return ProbVector{apply_kernel(z.weights, K.rows)};
}

/// Feasible coupling of two discrete measures together with its cost.
struct TransportPlan {
    Matrix plan;
    double cost = 0.0;
};

}  // namespace ferglab
