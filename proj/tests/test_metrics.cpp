#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ferglab/ferglab.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace ferglab;

namespace {
ProbVector rand_prob(std::mt19937_64& rng, std::size_t n) { return sample_dirichlet(rng, n); }

std::vector<double> rand_positive(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}
}  // namespace

TEST_CASE("total variation uses the mass-2 convention") {
    const ProbVector dx = ProbVector::point_mass(3, 0), dy = ProbVector::point_mass(3, 2);
    CHECK(tv_distance(dx, dy) == 2.0);
    CHECK(tv_distance(dx, dx) == 0.0);
    CHECK(tv_distance(ProbVector{{0.5, 0.5}}, ProbVector{{1.0, 0.0}}) == Catch::Approx(1.0));
    CHECK_THROWS_AS(tv_distance(dx, ProbVector::uniform(4)), DimensionMismatch);
}

TEST_CASE("w1 examples") {
    const MetricSpace disc = MetricSpace::discrete(3);
    CHECK(w1_distance(ProbVector::point_mass(3, 0), ProbVector::point_mass(3, 2), disc) ==
          Catch::Approx(1.0));
    CHECK(w1_distance(ProbVector::uniform(3), ProbVector::uniform(3), disc) ==
          Catch::Approx(0.0).margin(1e-12));

    const MetricSpace grid = MetricSpace::grid1d(3, 0.0, 1.0);
    CHECK(w1_distance(ProbVector{{0.5, 0.0, 0.5}}, ProbVector{{0.0, 1.0, 0.0}}, grid) ==
          Catch::Approx(0.5));
}

TEST_CASE("w1 agrees with the 1-d CDF oracle on grids") {
    const std::size_t n = 6;
    const MetricSpace grid = MetricSpace::grid1d(n, 0.0, 1.0);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i) / (n - 1);
    auto rng = make_rng(101);
    for (int t = 0; t < 50; ++t) {
        const ProbVector p = rand_prob(rng, n), q = rand_prob(rng, n);
        CHECK(w1_distance(p, q, grid) ==
              Catch::Approx(oracle::w1_line(xs, p.weights, q.weights)).margin(1e-9));
    }
}

TEST_CASE("discrete metric identity w1 = tv/2") {
    const std::size_t n = 5;
    const MetricSpace disc = MetricSpace::discrete(n);
    auto rng = make_rng(7);
    for (int t = 0; t < 100; ++t) {
        const ProbVector p = rand_prob(rng, n), q = rand_prob(rng, n);
        CHECK(w1_distance(p, q, disc) == Catch::Approx(0.5 * tv_distance(p, q)).margin(1e-9));
    }
}

TEST_CASE("bl two-point closed form and dominance") {
    MetricSpace two = MetricSpace::discrete(2);
    // max of min(2c, l) under c + l <= 1 is 2/3 at c = 1/3, l = 2/3
    CHECK(bl_distance(ProbVector::point_mass(2, 0), ProbVector::point_mass(2, 1), two) ==
          Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK(bl_distance(ProbVector::uniform(2), ProbVector::uniform(2), two) ==
          Catch::Approx(0.0).margin(1e-9));

    auto rng = make_rng(11);
    const std::size_t n = 4;
    const MetricSpace grid = MetricSpace::grid1d(n, 0.0, 1.0);
    for (int t = 0; t < 40; ++t) {
        const ProbVector p = rand_prob(rng, n), q = rand_prob(rng, n);
        const double bl = bl_distance(p, q, grid);
        CHECK(bl <= tv_distance(p, q) + 1e-9);
        CHECK(bl <= w1_distance(p, q, grid) + 1e-9);
        CHECK(bl >= -1e-12);
    }
}

TEST_CASE("metric axioms on random triples") {
    auto rng = make_rng(23);
    const std::size_t n = 4;
    const MetricSpace grid = MetricSpace::grid1d(n, 0.0, 1.0);
    for (int t = 0; t < 25; ++t) {
        const ProbVector a = rand_prob(rng, n), b = rand_prob(rng, n), c = rand_prob(rng, n);
        for (auto metric : {+[](const ProbVector& x, const ProbVector& y, const MetricSpace& s) {
                                return tv_distance(x, y);
                            },
                            +[](const ProbVector& x, const ProbVector& y, const MetricSpace& s) {
                                return w1_distance(x, y, s);
                            },
                            +[](const ProbVector& x, const ProbVector& y, const MetricSpace& s) {
                                return bl_distance(x, y, s);
                            }}) {
            const double ab = metric(a, b, grid), ba = metric(b, a, grid);
            const double ac = metric(a, c, grid), cb = metric(c, b, grid);
            CHECK(ab == Catch::Approx(ba).margin(1e-9));            // symmetry
            CHECK(metric(a, a, grid) == Catch::Approx(0.0).margin(1e-9));  // identity
            CHECK(ab <= ac + cb + 1e-9);                            // triangle
        }
    }
}

TEST_CASE("hilbert metric examples and invariances") {
    CHECK(hilbert_metric({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == Catch::Approx(0.0).margin(1e-12));
    CHECK(hilbert_metric({2.0, 4.0, 6.0}, {3.0, 6.0, 9.0}) == Catch::Approx(0.0).margin(1e-12));
    CHECK(hilbert_metric({1.0, 1.0}, {1.0, 2.0}) == Catch::Approx(std::log(2.0)));
    CHECK(std::isinf(hilbert_metric({1.0, 0.0}, {1.0, 1.0})));
    CHECK(hilbert_metric(std::vector<double>{}, std::vector<double>{}) == 0.0);

    auto rng = make_rng(31);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int t = 0; t < 50; ++t) {
        const auto mu = rand_positive(rng, 5), nu = rand_positive(rng, 5);
        const double h = hilbert_metric(mu, nu);
        auto mu2 = mu;
        auto nu2 = nu;
        const double a = scale(rng), b = scale(rng);
        for (double& v : mu2) v *= a;
        for (double& v : nu2) v *= b;
        CHECK(hilbert_metric(mu2, nu2) == Catch::Approx(h).margin(1e-9));
    }
}

TEST_CASE("hilbert coordinatewise formula equals the subset-ratio supremum") {
    auto rng = make_rng(37);
    for (int t = 0; t < 50; ++t) {
        const auto mu = rand_positive(rng, 6), nu = rand_positive(rng, 6);
        CHECK(hilbert_metric(mu, nu) ==
              Catch::Approx(oracle::hilbert_subsets(mu, nu)).margin(1e-9));
    }
}

TEST_CASE("tv is bounded by (2/log 3) times the hilbert distance") {
    auto rng = make_rng(41);
    const double factor = 2.0 / std::log(3.0);
    for (int t = 0; t < 1000; ++t) {
        const ProbVector mu = rand_prob(rng, 5), nu = rand_prob(rng, 5);
        CHECK(tv_distance(mu, nu) <=
              factor * hilbert_metric(mu.weights, nu.weights) + 1e-9);
    }
}

TEST_CASE("dobrushin coefficient examples") {
    CHECK(dobrushin_coefficient(testmodels::four_state(0.1).T) ==
          Catch::Approx(2.0 / 3.0).margin(1e-12));

    StochasticKernel eye{Matrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})};
    CHECK(dobrushin_coefficient(eye) == 0.0);

    StochasticKernel same{Matrix::from_rows({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}})};
    CHECK(dobrushin_coefficient(same) == Catch::Approx(1.0));
}

TEST_CASE("dobrushin singleton formula equals the partition infimum") {
    auto rng = make_rng(43);
    for (int t = 0; t < 20; ++t) {
        std::uniform_int_distribution<std::size_t> dims(2, 5);
        const std::size_t m = dims(rng), n = dims(rng);
        StochasticKernel K;
        K.rows = Matrix(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            const ProbVector row = rand_prob(rng, n);
            for (std::size_t j = 0; j < n; ++j) K.rows(i, j) = row[j];
        }
        CHECK(dobrushin_coefficient(K) ==
              Catch::Approx(oracle::dobrushin_partition(K.rows)).margin(1e-9));
    }
}

TEST_CASE("dobrushin contraction of tv") {
    auto rng = make_rng(47);
    for (int t = 0; t < 100; ++t) {
        StochasticKernel K;
        K.rows = Matrix(4, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            const ProbVector row = rand_prob(rng, 4);
            for (std::size_t j = 0; j < 4; ++j) K.rows(i, j) = row[j];
        }
        const double delta = dobrushin_coefficient(K);
        const ProbVector p = rand_prob(rng, 4), q = rand_prob(rng, 4);
        CHECK(tv_distance(apply_kernel(p, K), apply_kernel(q, K)) <=
              (1.0 - delta) * tv_distance(p, q) + 1e-9);
    }
}

TEST_CASE("birkhoff coefficients on reference kernels") {
    Matrix same = Matrix::from_rows({{0.3, 0.7}, {0.3, 0.7}});
    auto bc = birkhoff_coefficients(same);
    CHECK(bc.H == Catch::Approx(0.0).margin(1e-12));
    CHECK(bc.tau == Catch::Approx(0.0).margin(1e-12));

    Matrix eye = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    bc = birkhoff_coefficients(eye);
    CHECK(std::isinf(bc.H));
    CHECK(bc.tau == 1.0);

    Matrix K = Matrix::from_rows({{2.0 / 3, 1.0 / 3}, {1.0 / 3, 2.0 / 3}});
    bc = birkhoff_coefficients(K);
    CHECK(bc.H == Catch::Approx(std::log(4.0)).margin(1e-12));
    CHECK(bc.tau == Catch::Approx(1.0 / 3.0).margin(1e-12));

    CHECK_THROWS_AS(birkhoff_coefficients(Matrix::from_rows({{-0.1, 1.1}})), InvalidModel);
}

TEST_CASE("birkhoff contraction of the hilbert metric under right action") {
    auto rng = make_rng(53);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int kk = 0; kk < 20; ++kk) {
        Matrix K(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) K(i, j) = u(rng);
        const double tau = birkhoff_coefficients(K).tau;
        for (int t = 0; t < 50; ++t) {
            const auto mu = rand_positive(rng, 4), nu = rand_positive(rng, 4);
            const double before = hilbert_metric(mu, nu);
            const double after = hilbert_metric(apply_kernel(mu, K), apply_kernel(nu, K));
            CHECK(after <= tau * before + 1e-9);
        }
    }
}

TEST_CASE("mixing constant certificates") {
    StochasticKernel same{Matrix::from_rows({{0.2, 0.8}, {0.2, 0.8}})};
    auto mix = mixing_constant(same);
    REQUIRE(mix.has_value());
    CHECK(mix->epsilon == Catch::Approx(1.0));
    CHECK(mix->lambda.weights[0] == Catch::Approx(0.2));
    CHECK(mix->lambda.weights[1] == Catch::Approx(0.8));

    // zero entry in a column with positive entries elsewhere: not mixing
    CHECK_FALSE(mixing_constant(testmodels::four_state(0.1).T).has_value());

    auto [T, space] = build_truncated_gaussian(64, 1.0);
    auto gmix = mixing_constant(T);
    REQUIRE(gmix.has_value());
    CHECK(gmix->epsilon > 0.0);
    // the sandwich holds entrywise
    for (std::size_t i = 0; i < T.n_from(); ++i)
        for (std::size_t j = 0; j < T.n_to(); ++j) {
            CHECK(T(i, j) >= gmix->epsilon * gmix->lambda.weights[j] - 1e-12);
            CHECK(T(i, j) <= gmix->lambda.weights[j] / gmix->epsilon + 1e-12);
        }
}
