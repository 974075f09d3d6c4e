#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "pdclust/certify.hpp"
#include "pdclust/oracle.hpp"
#include "pdclust/sequence.hpp"
#include "test_support.hpp"

using namespace pdclust;

TEST_CASE("bucket indexing") {
    CHECK(bucket(0.5, 0.3) == 0);
    CHECK(bucket(0.999999, 0.1) == 0);
    CHECK(bucket(1.0, 0.1) == 1);
    CHECK(bucket(1.21, 0.1) == 3);  // log_1.1(1.21) = 2 exactly
    CHECK(bucket(1.05, 0.1) == 1);
    CHECK(bucket(1.1, 0.1) == 2);  // border belongs to the upper bucket
}

TEST_CASE("initial alpha is the column minimum") {
    std::mt19937_64 rng(71);
    Instance inst = testsupport::random_euclidean(rng, 12, 7, 3, Objective::EuclideanKMeans);
    std::vector<double> a = initial_alpha(inst);
    for (int j = 0; j < inst.n; ++j) {
        double mn = infinity();
        for (int i = 0; i < inst.m; ++i) mn = std::min(mn, inst.cost(j, i));
        CHECK(a[j] == mn);
    }
    Instance ex = build_instance({{0.0}, {2.0}}, FacilityMode::ExemplarFequalsD,
                                 Objective::EuclideanKMeans, 1);
    std::vector<double> zeros = initial_alpha(ex);
    CHECK(zeros == std::vector<double>{0.0, 0.0});
    CHECK(bucket(zeros[0], 0.1) == 0);
}

TEST_CASE("golden sweep on the worked figure") {
    for (double eps_z : {1e-2, 1e-4}) {
        CAPTURE(eps_z);
        Instance inst = testsupport::figure_instance(eps_z);
        SweepConfig cfg;
        cfg.eps = 0.1;
        cfg.eps_z = eps_z;
        SweepResult sw = quasi_sweep(testsupport::figure_alpha_in(), 2.0, cfg, inst);
        CHECK(sw.alpha[0] == 3.0 + eps_z);
        CHECK(sw.alpha[1] == 3.0 + eps_z);
        CHECK(sw.alpha[2] == 4.0 - eps_z);
        CHECK(sw.alpha[3] == 4.0 + 1.5 * eps_z);

        // Tight facilities at the new price.
        std::vector<int> tight;
        for (int i = 0; i < inst.m; ++i) {
            double c = 0;
            for (int j = 0; j < inst.n; ++j) c += std::max(sw.alpha[j] - inst.cost(j, i), 0.0);
            if (c >= 2.0 + eps_z - kEta) tight.push_back(i);
        }
        CHECK(tight == std::vector<int>{0, 1, 2, 4});
        CHECK(sw.witness[0] == 0);
        CHECK(sw.witness[1] == 1);
        CHECK(sw.witness[2] == 2);
        CHECK(sw.witness[3] == 4);
    }
}

TEST_CASE("sweep bumps a lone undecided client by exactly eps_z") {
    // One client paying one facility: the facility re-tightens after exactly
    // eps_z more growth.
    std::vector<std::vector<double>> cf{{1.0}};
    std::vector<std::vector<double>> ff{{0.0}};
    Instance inst = build_abstract_instance(cf, ff, Objective::GeneralMetricKMeans, 1);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    std::vector<double> alpha_in{3.0};  // tight at lambda = 2
    SweepResult sw = quasi_sweep(alpha_in, 2.0, cfg, inst);
    CHECK(sw.alpha[0] == 3.0 + 1e-3);
}

TEST_CASE("sweep output matches the time-stepped reference") {
    std::mt19937_64 rng(73);
    SweepConfig cfg;
    cfg.eps = 0.1;
    cfg.eps_z = 1e-2;
    for (int rep = 0; rep < 8; ++rep) {
        Instance inst = testsupport::random_euclidean(rng, 7, 4, 2, Objective::EuclideanKMeans,
                                                      /*box=*/1.4);
        SequencePipeline pipe(inst, cfg, delta_preset(inst.objective).delta);
        for (int hop = 0; hop < 3; ++hop) pipe.advance();
        std::vector<double> alpha_in = pipe.current().dual.alpha;
        double lambda = pipe.current().lambda;
        SweepResult ev = quasi_sweep(alpha_in, lambda, cfg, inst);
        double step = cfg.eps_z / 1e3;
        std::vector<double> ref = oracle::reference_quasi_sweep(alpha_in, lambda, cfg, inst, step);
        for (int j = 0; j < inst.n; ++j)
            CHECK(std::abs(ev.alpha[j] - ref[j]) <= 1e3 * step);
    }
}

TEST_CASE("sequence level zero: everything tight, conflict graph empty") {
    std::mt19937_64 rng(79);
    Instance inst = testsupport::random_euclidean(rng, 10, 6, 3, Objective::EuclideanKMeans);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    auto levels = generate_sequence(inst, cfg, delta_preset(inst.objective).delta,
                                    [](const SequenceLevel&) { return true; });
    REQUIRE(levels.size() == 1);
    const SequenceLevel& l0 = levels[0];
    CHECK(l0.ell == 0);
    CHECK(static_cast<int>(l0.dual.tight.size()) == inst.m);
    CHECK(static_cast<int>(l0.is_set.size()) == inst.m);
    for (int a = 0; a < l0.h.node_count(); ++a)
        for (int b = 0; b < l0.h.node_count(); ++b) CHECK(!l0.h.edge(a, b));
}

TEST_CASE("pipeline resumed at the figure state reproduces its output level") {
    const double eps_z = 1e-2;
    Instance inst = testsupport::figure_instance(eps_z);
    SweepConfig cfg;
    cfg.eps = 0.1;
    cfg.eps_z = eps_z;
    DeltaPreset preset = delta_preset(Objective::EuclideanKMeans);  // the example's delta
    SequencePipeline pipe(inst, cfg, preset.delta, testsupport::figure_alpha_in(), 200);
    CHECK(pipe.current().lambda == doctest::Approx(2.0));
    REQUIRE(pipe.advance());
    const SequenceLevel& lv = pipe.current();
    CHECK(lv.dual.alpha[0] == 3.0 + eps_z);
    CHECK(lv.dual.tight == std::vector<int>{0, 1, 2, 4});
}

TEST_CASE("a crowded star collapses to one center") {
    // Facilities bunched together, clients around them: once the price grows,
    // the conflict graph is a clique and the independent set is one vertex.
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({0.01 * i, 0.0});
    Instance inst = build_instance(pts, FacilityMode::ExemplarFequalsD,
                                   Objective::EuclideanKMeans, 1);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    DeltaPreset preset = delta_preset(inst.objective);
    auto levels = generate_sequence(inst, cfg, preset.delta, [](const SequenceLevel& lv) {
        return lv.is_set.size() <= 1;
    });
    CHECK(levels.back().is_set.size() == 1);
    int v = levels.back().h.node_count();
    for (int a = 0; a < v; ++a)
        for (int b = 0; b < v; ++b)
            if (a != b) CHECK(levels.back().h.edge(a, b));
}

TEST_CASE("graph update between identical levels projects to the seed") {
    std::mt19937_64 rng(83);
    Instance inst = testsupport::random_euclidean(rng, 8, 5, 2, Objective::EuclideanKMeans);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    DeltaPreset preset = delta_preset(inst.objective);
    SequencePipeline pipe(inst, cfg, preset.delta);
    for (int hop = 0; hop < 25; ++hop) pipe.advance();
    SequenceLevel lv = pipe.current();
    auto steps = quasi_graph_update(lv, lv, lv.is_set, inst, preset.delta);
    REQUIRE(steps.size() == lv.g.facilities.size() + 1);
    std::set<int> seed(lv.is_set.begin(), lv.is_set.end());
    size_t prev_size = lv.is_set.size();
    for (const auto& st : steps) {
        std::set<int> projected;
        for (const auto& f : st.is_nodes) projected.insert(f.id);
        CHECK(projected == seed);
        CHECK(st.is_nodes.size() + 1 >= prev_size);  // never drops by more than 1
        CHECK(st.is_nodes.size() >= seed.size());
        prev_size = st.is_nodes.size();
    }
}

TEST_CASE("golden hybrid graph on the worked figure pair") {
    const double eps_z = 1e-2;
    Instance inst = testsupport::figure_instance(eps_z);
    SweepConfig cfg;
    cfg.eps = 0.1;
    cfg.eps_z = eps_z;
    DeltaPreset preset = delta_preset(Objective::EuclideanKMeans);
    SequencePipeline pipe(inst, cfg, preset.delta, testsupport::figure_alpha_in(), 200);
    SequenceLevel lo = pipe.current();
    REQUIRE(pipe.advance());
    SequenceLevel hi = pipe.current();

    REQUIRE(lo.is_set == std::vector<int>{0, 1, 2});  // i4 conflicts with i3
    auto steps = quasi_graph_update(lo, hi, lo.is_set, inst, preset.delta);

    // Step 1 is the full hybrid conflict graph.
    const ConflictGraph& h = steps.front().h;
    REQUIRE(h.node_count() == 8);
    auto idx = [&](int id, int level) {
        for (int u = 0; u < h.node_count(); ++u)
            if (h.nodes[u].id == id && h.nodes[u].level == level) return u;
        REQUIRE(false);
        return -1;
    };
    int i1 = idx(0, 0), i2 = idx(1, 0), i3 = idx(2, 0), i4 = idx(3, 0);
    int n1 = idx(0, 1), n2 = idx(1, 1), n3 = idx(2, 1), n5 = idx(4, 1);
    std::set<std::pair<int, int>> expect{
        {std::min(i3, i4), std::max(i3, i4)},  // old level edge
        {std::min(n3, n1), std::max(n3, n1)},  // new level edges
        {std::min(n3, n2), std::max(n3, n2)},
        {std::min(i1, n1), std::max(i1, n1)},  // duplicates of i1, i2, i3
        {std::min(i2, n2), std::max(i2, n2)},
        {std::min(i3, n3), std::max(i3, n3)},
        {std::min(n3, i1), std::max(n3, i1)},  // new i3 reaches the old side
        {std::min(n3, i2), std::max(n3, i2)},
        {std::min(n3, i4), std::max(n3, i4)},
        {std::min(n5, i4), std::max(n5, i4)},  // new i5 conflicts with old i4
    };
    std::set<std::pair<int, int>> got;
    for (int a = 0; a < h.node_count(); ++a)
        for (int b = a + 1; b < h.node_count(); ++b)
            if (h.edge(a, b)) got.insert({a, b});
    CHECK(got == expect);

    // The seed {i1,i2,i3} extends with the new i5.
    std::set<std::pair<int, int>> first_is;
    for (const auto& f : steps.front().is_nodes) first_is.insert({f.id, f.level});
    CHECK(first_is == std::set<std::pair<int, int>>{{0, 0}, {1, 0}, {2, 0}, {4, 1}});

    // Sizes never drop by more than one and the last set lives in the new level.
    size_t prev = lo.is_set.size();
    for (const auto& st : steps) {
        CHECK(st.is_nodes.size() + 1 >= prev);
        prev = st.is_nodes.size();
    }
    for (const auto& f : steps.back().is_nodes) CHECK(f.level == 1);
}

TEST_CASE("graph update steps stay maximal independent on random close pairs") {
    std::mt19937_64 rng(89);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    for (int rep = 0; rep < 5; ++rep) {
        Instance inst = testsupport::random_euclidean(rng, 9, 5, 2, Objective::EuclideanKMeans,
                                                      /*box=*/0.7);
        DeltaPreset preset = delta_preset(inst.objective);
        SequencePipeline pipe(inst, cfg, preset.delta);
        std::vector<int> carried = pipe.current().is_set;
        SequenceLevel prev = pipe.current();
        for (int hop = 0; hop < 40; ++hop) {
            if (!pipe.advance()) break;
            const SequenceLevel& cur = pipe.current();
            auto steps = quasi_graph_update(prev, cur, carried, inst, preset.delta);
            size_t last = carried.size();
            for (const auto& st : steps) {
                // Independence + maximality scan.
                const auto& h = st.h;
                std::vector<char> in(h.node_count(), 0);
                for (const auto& f : st.is_nodes)
                    for (int u = 0; u < h.node_count(); ++u)
                        if (h.nodes[u].id == f.id && h.nodes[u].level == f.level) in[u] = 1;
                for (int a = 0; a < h.node_count(); ++a)
                    for (int b = 0; b < h.node_count(); ++b)
                        if (in[a] && in[b] && h.edge(a, b)) CHECK(false);
                for (int a = 0; a < h.node_count(); ++a) {
                    if (in[a]) continue;
                    bool blocked = false;
                    for (int b = 0; b < h.node_count(); ++b)
                        if (in[b] && h.edge(a, b)) blocked = true;
                    CHECK(blocked);
                }
                CHECK(st.is_nodes.size() + 1 >= last);
                last = st.is_nodes.size();
            }
            carried.clear();
            for (const auto& f : steps.back().is_nodes) carried.push_back(f.id);
            std::sort(carried.begin(), carried.end());
            prev = cur;
        }
    }
}

TEST_CASE("solve_exact_k handles the degenerate cases") {
    std::mt19937_64 rng(97);
    Instance inst = testsupport::random_euclidean(rng, 8, 4, 4, Objective::EuclideanKMeans);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    DeltaPreset preset = delta_preset(inst.objective);
    ExactKResult full = solve_exact_k(inst, 4, preset, cfg);
    CHECK(full.full_open);
    double expect = 0;
    for (int j = 0; j < inst.n; ++j) expect += inst.min_cost(j);
    CHECK(full.solution.connection_cost == doctest::Approx(expect));

    ExactKResult one = solve_exact_k(inst, 1, preset, cfg);
    CHECK(one.solution.opened.size() == 1);
    CHECK(one.certificate.feasible);
}

TEST_CASE("solve_exact_k stays within rho of the enumerated optimum") {
    std::mt19937_64 rng(101);
    SweepConfig cfg;
    cfg.eps_z = 1e-3;
    Instance inst = testsupport::random_euclidean(rng, 12, 6, 3, Objective::EuclideanKMeans,
                                                  /*box=*/0.8);
    DeltaPreset preset = delta_preset(inst.objective);
    ExactKResult res = solve_exact_k(inst, 3, preset, cfg);
    CHECK(static_cast<int>(res.solution.opened.size()) == 3);
    double opt = oracle::brute_force_opt(inst, 3).opt_cost;
    CHECK(res.solution.connection_cost <= preset.rho * opt + 1e-9);
    CHECK(res.certificate.lower_bound <= opt + 1e-9);
}

TEST_CASE("measured closeness respects the bucket-scaled bound") {
    std::mt19937_64 rng(103);
    Instance raw = testsupport::random_euclidean(rng, 6, 4, 2, Objective::EuclideanKMeans);
    auto [inst, rec] = normalize_distances(raw);
    SweepConfig cfg;
    cfg.eps = 0.3;
    cfg.eps_z = 1e-2;
    DeltaPreset preset = delta_preset(inst.objective);
    SequencePipeline pipe(inst, cfg, preset.delta);
    for (int hop = 0; hop < 30 && pipe.advance(); ++hop) {
        const SequenceLevel& lv = pipe.current();
        double logbound = std::log(cfg.eps_z) +
                          (3.0 * lv.max_bucket + 1) * std::log(static_cast<double>(inst.n));
        if (lv.max_alpha_delta > 0)
            CHECK(std::log(lv.max_alpha_delta) <= logbound + 1e-9);
    }
}

TEST_CASE("bisection solve tracks the best bounded solution") {
    std::mt19937_64 rng(107);
    Instance inst = testsupport::random_euclidean(rng, 20, 10, 4, Objective::EuclideanKMeans);
    DeltaPreset preset = delta_preset(inst.objective);
    BisectionResult res = bisection_solve(inst, 4, preset, 60);
    CHECK(static_cast<int>(res.solution.opened.size()) <= 4);
    double opt = oracle::brute_force_opt(inst, 4).opt_cost;
    CHECK(res.solution.connection_cost >= opt - 1e-9);
    CHECK(res.certificate.lower_bound <= opt + 1e-9);

    // k = m returns the open-everything solution from the zero-price probe.
    Instance small = testsupport::random_euclidean(rng, 6, 3, 3, Objective::EuclideanKMeans);
    BisectionResult all = bisection_solve(small, 3, preset, 10);
    CHECK(static_cast<int>(all.solution.opened.size()) == 3);

    // Single client: its nearest facility at cost min c.
    Instance lone = testsupport::random_euclidean(rng, 1, 4, 2, Objective::EuclideanKMeans);
    BisectionResult single = bisection_solve(lone, 2, preset, 20);
    CHECK(single.solution.connection_cost <= lone.min_cost(0) + 1e-12);
}

TEST_CASE("paper-faithful mode rejects unnormalized instances") {
    std::mt19937_64 rng(109);
    Instance inst = testsupport::random_euclidean(rng, 4, 3, 2, Objective::EuclideanKMeans);
    SweepConfig cfg;
    cfg.paper_faithful = true;
    CHECK_THROWS_AS(SequencePipeline(inst, cfg, 2.0), SolverError);
}
