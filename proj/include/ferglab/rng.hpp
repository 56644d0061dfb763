#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ferglab/types.hpp"

namespace ferglab {

/// splitmix64 finalizer; used to derive independent per-task seeds from a
/// master seed so that results do not depend on scheduling.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t index = 0) {
    return std::mt19937_64(split_seed(master, index));
}

/// Symmetric Dirichlet(1): uniform on the simplex.
inline ProbVector sample_dirichlet(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> exp1(1.0);
    ProbVector z;
    z.weights.resize(n);
    double total = 0.0;
    for (double& w : z.weights) {
        w = exp1(rng);
        total += w;
    }
    for (double& w : z.weights) w /= total;
    return z;
}

/// Sample an index from a (sub)probability vector.
inline std::size_t sample_categorical(std::mt19937_64& rng, const std::vector<double>& w) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        acc += w[i];
        if (u < acc) return i;
    }
    return w.empty() ? 0 : w.size() - 1;
}

}  // namespace ferglab
