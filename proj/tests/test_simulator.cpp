#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ferglab/ferglab.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace ferglab;

namespace {

AtomicMeasureOnZ random_cloud(std::mt19937_64& rng, std::size_t n_atoms, std::size_t dim) {
    AtomicMeasureOnZ M;
    for (std::size_t a = 0; a < n_atoms; ++a) M.atoms.push_back(sample_dirichlet(rng, dim));
    const ProbVector w = sample_dirichlet(rng, n_atoms);
    M.weights = w.weights;
    return M;
}

}  // namespace

TEST_CASE("lifted W1 basics") {
    const MetricSpace disc = MetricSpace::discrete(3);
    auto rng = make_rng(131);
    const AtomicMeasureOnZ A = random_cloud(rng, 4, 3);
    CHECK(w1_on_PZ(A, A, disc) == Catch::Approx(0.0).margin(1e-9));

    // two point masses on Z reduce to the ground distance
    const ProbVector z0 = sample_dirichlet(rng, 3), z1 = sample_dirichlet(rng, 3);
    AtomicMeasureOnZ P{{z0}, {1.0}}, Q{{z1}, {1.0}};
    CHECK(w1_on_PZ(P, Q, disc) == Catch::Approx(w1_distance(z0, z1, disc)).margin(1e-9));
}

TEST_CASE("lifted W1 agrees with an independent transport oracle") {
    const MetricSpace disc = MetricSpace::discrete(3);
    auto rng = make_rng(137);
    for (int t = 0; t < 20; ++t) {
        const AtomicMeasureOnZ A = random_cloud(rng, 4, 3);
        const AtomicMeasureOnZ B = random_cloud(rng, 5, 3);
        Matrix cost(4, 5);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                cost(i, j) = w1_distance(A.atoms[i], B.atoms[j], disc);
        CHECK(w1_on_PZ(A, B, disc) ==
              Catch::Approx(oracle::transport_bellman_ford(A.weights, B.weights, cost))
                  .margin(1e-9));
    }
}

TEST_CASE("lifted W1 is a metric on random clouds") {
    const MetricSpace disc = MetricSpace::discrete(3);
    auto rng = make_rng(139);
    for (int t = 0; t < 10; ++t) {
        const AtomicMeasureOnZ A = random_cloud(rng, 3, 3);
        const AtomicMeasureOnZ B = random_cloud(rng, 4, 3);
        const AtomicMeasureOnZ C = random_cloud(rng, 3, 3);
        const double ab = w1_on_PZ(A, B, disc), ba = w1_on_PZ(B, A, disc);
        CHECK(ab == Catch::Approx(ba).margin(1e-9));
        CHECK(ab <= w1_on_PZ(A, C, disc) + w1_on_PZ(C, B, disc) + 1e-9);
    }
}

TEST_CASE("one-step contraction on the 4-state example") {
    const HmmModel m = testmodels::four_state(0.1);
    const ContractionResult r = one_step_contraction_test(m, 50, 7);
    CHECK(r.bound == Catch::Approx(14.0 / 15.0).margin(1e-12));
    CHECK(r.pairs_tested == 50);
    CHECK(r.violations.empty());
    CHECK(r.max_ratio <= r.bound + 1e-9);

    // identical results under any worker count
    const ContractionResult r4 = one_step_contraction_test(m, 50, 7, kDefaultTol, 4);
    CHECK(r4.max_ratio == r.max_ratio);
    CHECK(r4.pairs_tested == r.pairs_tested);
}

TEST_CASE("rank-one transitions contract in one step to a single point") {
    const HmmModel m = testmodels::rank_one({0.1, 0.2, 0.3, 0.4});
    const ContractionResult r = one_step_contraction_test(m, 30, 11);
    CHECK(r.max_ratio == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("exact n-step decay respects the geometric bound") {
    const HmmModel m = testmodels::four_state(0.1);
    auto rng = make_rng(149);
    const ProbVector z0 = sample_dirichlet(rng, 4), z1 = sample_dirichlet(rng, 4);
    const double beta = certify(m).beta;
    const DecayCurve curve = n_step_decay(m, z0, z1, 5, kDefaultAtomCap, beta);
    REQUIRE(curve.n_values.size() == 6);
    CHECK(curve.distances[0] == Catch::Approx(w1_distance(z0, z1, m.space)).margin(1e-12));
    CHECK(curve.count_violations() == 0);
    for (std::size_t i = 0; i < curve.distances.size(); ++i)
        CHECK(curve.distances[i] <= curve.bounds[i] + 1e-9);

    CHECK_THROWS_AS(n_step_decay(m, z0, z1, 30), AtomCapExceeded);
}

TEST_CASE("monte-carlo decay matches the exact curve within sampling error") {
    const HmmModel m = testmodels::four_state(0.1);
    const ProbVector z0 = ProbVector::point_mass(4, 0);
    const ProbVector z1 = ProbVector::point_mass(4, 3);
    const DecayCurve exact = n_step_decay(m, z0, z1, 4);
    const DecayCurve mc = mc_decay(m, z0, z1, 4, 200, 23);
    REQUIRE(mc.distances.size() == exact.distances.size());
    for (std::size_t i = 1; i < mc.distances.size(); ++i) {
        const double tol = std::max(3.0 * mc.stderrs[i], 0.02);
        CHECK(std::abs(mc.distances[i] - exact.distances[i]) <= tol);
    }
}

TEST_CASE("monte-carlo decay of identical priors is identically zero") {
    const HmmModel m = testmodels::four_state(0.1);
    const ProbVector z = ProbVector::uniform(4);
    const DecayCurve curve = mc_decay(m, z, z, 3, 100, 31);
    for (double d : curve.distances) CHECK(d == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("monte-carlo decay is bitwise reproducible for a fixed seed") {
    const HmmModel m = testmodels::four_state(0.1);
    const ProbVector z0 = ProbVector::point_mass(4, 0);
    const ProbVector z1 = ProbVector::uniform(4);
    const DecayCurve a = mc_decay(m, z0, z1, 3, 80, 37);
    const DecayCurve b = mc_decay(m, z0, z1, 3, 80, 37, std::nullopt, 20, 4);
    REQUIRE(a.distances.size() == b.distances.size());
    for (std::size_t i = 0; i < a.distances.size(); ++i) {
        CHECK(a.distances[i] == b.distances[i]);
        CHECK(a.stderrs[i] == b.stderrs[i]);
    }
}

TEST_CASE("lifted bounded-lipschitz regularity on the 4-state example") {
    const HmmModel m = testmodels::four_state(0.1);
    const ContractionResult r = bl_regularity_test(m, 2, 10, 41);
    CHECK(r.bound == Catch::Approx(3.0 * (1.0 + 2.0 / 3.0)).margin(1e-12));
    CHECK(r.violations.empty());
    CHECK(r.max_ratio <= r.bound + 1e-9);
    CHECK(r.pairs_tested == 10);
}

TEST_CASE("constant-column channel: iterates follow the prediction semigroup") {
    const HmmModel m = testmodels::constant_channel(0.4);
    const ProbVector mu = ProbVector::point_mass(4, 2);
    const ReachabilityTrace trace = reachable_state_trace(m, mu, 0);
    REQUIRE(trace.converged);
    ProbVector zk = mu;
    const std::size_t k_max = std::min<std::size_t>(trace.iterates.size() - 1, 50);
    for (std::size_t k = 1; k <= k_max; ++k) {
        zk = apply_kernel(zk, m.T);
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(trace.iterates[k][j] == Catch::Approx(zk[j]).margin(1e-12));
    }
    const ProbVector pi = stationary_distribution(m.T);
    CHECK(tv_distance(trace.limit, pi) < 1e-8);
}

TEST_CASE("mixing gaussian grid: gap ratios obey the certified rate") {
    const HmmModel m = testmodels::gaussian_grid(32, 1.0);
    const ReachabilityTrace a = reachable_state_trace(m, ProbVector::uniform(32), 0);
    const ReachabilityTrace b = reachable_state_trace(m, ProbVector::point_mass(32, 0), 0);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.rate_bound < 1.0);
    CHECK(a.max_gap_ratio <= a.rate_bound + 1e-6);
    CHECK(b.max_gap_ratio <= b.rate_bound + 1e-6);
    CHECK(tv_distance(a.limit, b.limit) <= 1e-8);
}

TEST_CASE("missing likelihood floor is reported as an unmet precondition") {
    const HmmModel degenerate = testmodels::four_state(0.0);
    CHECK_THROWS_AS(reachable_state_trace(degenerate, ProbVector::uniform(4), 0),
                    PreconditionUnmet);
    CHECK_THROWS_AS(reachable_state_trace(degenerate, ProbVector::uniform(4), 9),
                    DimensionMismatch);
}

TEST_CASE("quantized clouds conserve mass and reduce atom counts") {
    auto rng = make_rng(151);
    const AtomicMeasureOnZ M = random_cloud(rng, 200, 3);
    const QuantizedCloud q = quantize_cloud(M, 0.05);
    CHECK(q.centers.size() <= M.size());
    double mass = 0.0;
    for (double w : q.weights) mass += w;
    CHECK(mass == Catch::Approx(1.0).margin(1e-9));
    for (std::size_t a = 0; a < M.size(); ++a) REQUIRE(q.atom_cell[a] < q.centers.size());
    for (const auto& c : q.centers) c.validate(1e-9);
    CHECK_THROWS_AS(quantize_cloud(M, 0.0), InvalidModel);
}

TEST_CASE("occupation distance of a cloud with itself is zero") {
    const HmmModel m = testmodels::four_state(0.1);
    const AtomicMeasureOnZ occ = occupation_average(m, ProbVector::uniform(4), 100, 20, 5);
    const OccupationDistance d = occupation_distance(occ, occ, m.space, 0.01, 4, 5);
    CHECK(d.mean == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("rank-one transitions give identical occupations from any prior") {
    // with identical rows, the sampled observation stream does not depend on
    // the prior, so matched seeds give matched filter trajectories after step 1
    const HmmModel m = testmodels::rank_one({0.1, 0.2, 0.3, 0.4});
    const AtomicMeasureOnZ occ0 =
        occupation_average(m, ProbVector::point_mass(4, 0), 200, 30, 9);
    const AtomicMeasureOnZ occ3 =
        occupation_average(m, ProbVector::point_mass(4, 3), 200, 30, 9);
    const OccupationDistance d = occupation_distance(occ0, occ3, m.space, 0.01, 4, 9);
    CHECK(d.mean == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("occupation distance between distinct priors is small with error bars") {
    const HmmModel m = testmodels::four_state(0.1);
    const AtomicMeasureOnZ occ0 =
        occupation_average(m, ProbVector::point_mass(4, 0), 400, 50, 13);
    const AtomicMeasureOnZ occ3 =
        occupation_average(m, ProbVector::point_mass(4, 3), 400, 50, 13);
    const OccupationDistance d = occupation_distance(occ0, occ3, m.space, 0.01, 6, 13);
    CHECK(d.mean < 0.05);
    CHECK(d.stderr_ > 0.0);
    CHECK(d.cells_a > 1);
    CHECK(d.cells_b > 1);
}
