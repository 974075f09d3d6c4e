#include <doctest.h>

#include <random>

#include "pdclust/oracle.hpp"
#include "test_support.hpp"

using namespace pdclust;

TEST_CASE("brute force optimum on the collinear exemplar") {
    Instance inst = build_instance({{0.0}, {1.0}, {3.0}}, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 1);
    auto res = oracle::brute_force_opt(inst, 1);
    CHECK(res.opt_set == std::vector<int>{1});
    CHECK(res.opt_cost == doctest::Approx(5.0));  // 1 + 0 + 4
    CHECK(res.enumerated == 3);
}

TEST_CASE("brute force corner cases") {
    std::mt19937_64 rng(113);
    Instance inst = testsupport::random_euclidean(rng, 7, 5, 5, Objective::EuclideanKMeans);
    auto full = oracle::brute_force_opt(inst, 5);
    double expect = 0;
    for (int j = 0; j < inst.n; ++j) expect += inst.min_cost(j);
    CHECK(full.opt_cost == doctest::Approx(expect));

    Instance lone = testsupport::random_euclidean(rng, 1, 5, 2, Objective::EuclideanKMeans);
    auto one = oracle::brute_force_opt(lone, 2);
    CHECK(one.opt_cost <= lone.min_cost(0) + 1e-12);

    Instance big = testsupport::random_euclidean(rng, 4, 60, 2, Objective::EuclideanKMeans);
    CHECK_THROWS_AS(oracle::brute_force_opt(big, 25), SolverError);
}

TEST_CASE("reference growth converges with the step (richardson check)") {
    std::vector<std::vector<double>> cf{{1.0}, {2.0}};
    std::vector<std::vector<double>> ff{{0.0}};
    Instance inst = build_abstract_instance(cf, ff, Objective::GeneralMetricKMeans, 1);
    DualSolution coarse = oracle::reference_dual_growth(inst, 3.0, 1e-2);
    DualSolution fine = oracle::reference_dual_growth(inst, 3.0, 1e-3);
    CHECK(std::abs(coarse.alpha[0] - 3.0) <= 10 * 1e-2);
    CHECK(std::abs(fine.alpha[0] - 3.0) <= 10 * 1e-3);
    CHECK(std::abs(fine.alpha[0] - 3.0) <= std::abs(coarse.alpha[0] - 3.0) + 1e-12);

    DualSolution zero = oracle::reference_dual_growth(inst, 0.0, 1e-3);
    CHECK(zero.alpha[0] == doctest::Approx(1.0));
    CHECK(zero.alpha[1] == doctest::Approx(2.0));
}

TEST_CASE("greedy estimate bounds and exact cases") {
    std::mt19937_64 rng(127);
    Instance inst = testsupport::random_euclidean(rng, 10, 6, 6, Objective::EuclideanKMeans);
    double all = oracle::greedy_opt_estimate(inst, 6);
    double expect = 0;
    for (int j = 0; j < inst.n; ++j) expect += inst.min_cost(j);
    CHECK(all == doctest::Approx(expect));

    Instance lone = testsupport::random_euclidean(rng, 1, 5, 1, Objective::EuclideanKMeans);
    CHECK(oracle::greedy_opt_estimate(lone, 1) == doctest::Approx(lone.min_cost(0)));

    for (int rep = 0; rep < 15; ++rep) {
        Instance r = testsupport::random_euclidean(rng, 9, 6, 3, Objective::EuclideanKMeans);
        double est = oracle::greedy_opt_estimate(r, 3);
        double opt = oracle::brute_force_opt(r, 3).opt_cost;
        if (opt > 0) {
            CHECK(est >= opt - 1e-9);
            CHECK(est <= 100 * opt);
        }
    }
}
