#include <doctest.h>

#include <cmath>
#include <random>

#include "pdclust/instance.hpp"
#include "pdclust/oracle.hpp"
#include "test_support.hpp"

using namespace pdclust;

TEST_CASE("exemplar instance on collinear points") {
    std::vector<std::vector<double>> pts{{0}, {1}, {3}};
    Instance inst = build_instance(pts, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 1);
    CHECK(inst.n == 3);
    CHECK(inst.m == 3);
    CHECK(inst.cost(0, 0) == 0.0);
    CHECK(inst.cost(0, 1) == 1.0);
    CHECK(inst.cost(0, 2) == 9.0);
    CHECK(inst.cost(1, 2) == 4.0);
    validate_instance(inst);
}

TEST_CASE("single point instance") {
    Instance inst = build_instance({{2.5, 1.0}}, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 1);
    CHECK(inst.n == 1);
    CHECK(inst.m == 1);
    CHECK(inst.cost(0, 0) == 0.0);
}

TEST_CASE("cost matrix matches an independent pairwise recomputation") {
    std::mt19937_64 rng(40);
    auto pts = testsupport::random_points(rng, 40, 2);
    Instance inst = build_instance(pts, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 5);
    for (int j = 0; j < inst.n; ++j)
        for (int i = 0; i < inst.m; ++i) {
            double dx = pts[j][0] - pts[i][0];
            double dy = pts[j][1] - pts[i][1];
            CHECK(inst.cost(j, i) == doctest::Approx(dx * dx + dy * dy).epsilon(1e-12));
        }
}

TEST_CASE("build rejects bad input") {
    CHECK_THROWS_AS(build_instance({{0.0}, {1.0}}, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 3),
                    SolverError);  // k > m
    double nan = std::nan("");
    CHECK_THROWS_AS(build_instance({{nan}}, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 1),
                    SolverError);
}

TEST_CASE("general-metric normalization clamps oversized distances") {
    // One squared distance of 10*n^6 must come back inside the band.
    const int n = 3;
    std::vector<std::vector<double>> cf{{1.0, 2.0}, {2.0, 1.5}, {1.0, 10.0 * 729.0}};
    std::vector<std::vector<double>> ff{{0.0, 1.0}, {1.0, 0.0}};
    Instance inst = build_abstract_instance(cf, ff, Objective::GeneralMetricKMeans, 1);
    auto [out, rec] = normalize_distances(inst);
    CHECK(rec.mode == NormalizationRecord::Mode::GeneralMetric);
    const double hi = std::pow(static_cast<double>(n), 6.0);
    for (int j = 0; j < out.n; ++j)
        for (int i = 0; i < out.m; ++i) {
            CHECK(out.cost(j, i) >= 1.0);
            CHECK(out.cost(j, i) <= hi * (1 + 1e-9));
        }
    CHECK(rec.violations.empty());
}

TEST_CASE("normalization keeps cost order away from clamp and floor") {
    std::mt19937_64 rng(7);
    Instance inst = testsupport::random_general_metric(rng, 6, 4, 2);
    auto [out, rec] = normalize_distances(inst);
    const double n2 = static_cast<double>(inst.n) * inst.n;
    for (int j = 0; j < inst.n; ++j)
        for (int a = 0; a < inst.m; ++a)
            for (int b = 0; b < inst.m; ++b) {
                double da = std::sqrt(inst.cost(j, a)) * rec.scale;
                double db = std::sqrt(inst.cost(j, b)) * rec.scale;
                bool touched = da <= 1 || db <= 1 || da >= n2 || db >= n2;
                if (!touched && inst.cost(j, a) < inst.cost(j, b))
                    CHECK(out.cost(j, a) <= out.cost(j, b) + 1e-12);
            }
}

TEST_CASE("euclidean normalization lands in the band") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        Instance inst = testsupport::random_euclidean(rng, 8, 8, 3, Objective::EuclideanKMeans);
        auto [out, rec] = normalize_distances(inst);
        CHECK(rec.mode == NormalizationRecord::Mode::EuclideanEmbedding);
        CHECK(rec.violations.empty());
        const double hi = std::pow(static_cast<double>(inst.n), 6.0);
        double mn = pdclust::infinity(), mx = 0;
        for (int j = 0; j < out.n; ++j)
            for (int i = 0; i < out.m; ++i) {
                mn = std::min(mn, out.cost(j, i));
                mx = std::max(mx, out.cost(j, i));
            }
        CHECK(mn >= 1.0 - 1e-9);
        CHECK(mx <= hi * (1 + 1e-9));
        validate_instance(out);
    }
}

TEST_CASE("normalization is reported trivial when all points coincide") {
    std::vector<std::vector<double>> pts(4, std::vector<double>{1.0, 1.0});
    Instance inst = build_instance(pts, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 2);
    auto [out, rec] = normalize_distances(inst);
    CHECK(rec.trivial);
    CHECK(out.cost(0, 1) == inst.cost(0, 1));
}

TEST_CASE("normalized optimum maps back within the advertised factor") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        Instance inst = testsupport::random_euclidean(rng, 9, 6, 2, Objective::EuclideanKMeans);
        auto base = oracle::brute_force_opt(inst, inst.k);
        if (base.opt_cost <= 0) continue;
        auto [norm, rec] = normalize_distances(inst);
        auto normed = oracle::brute_force_opt(norm, norm.k);
        // Evaluate the normalized optimum's facility set on the raw instance.
        std::vector<int> raw_ids;
        for (int i : normed.opt_set)
            raw_ids.push_back(rec.kept_facilities.empty() ? i : rec.kept_facilities[i]);
        double mapped = 0;
        for (int j = 0; j < inst.n; ++j) mapped += inst.cost_of_opened(j, raw_ids);
        double slack = 100.0 / (static_cast<double>(inst.n) * inst.n);
        CHECK(mapped <= base.opt_cost * (1 + slack) + 1e-9);
    }
}
