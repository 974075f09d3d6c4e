#include "pdclust/baseline.hpp"

#include <algorithm>
#include <random>

namespace pdclust {

namespace {

double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;  // deterministic across platforms
}

}  // namespace

ClusterSolution kmeanspp_lloyd(const Instance& inst, int k, uint64_t seed) {
    k = std::min(k, inst.m);
    std::mt19937_64 rng(seed);
    std::vector<int> centers;
    std::vector<char> used(inst.m, 0);

    // First center uniform over facilities; the rest by cost-weighted client
    // sampling, each sampled client adding its nearest unchosen facility.
    int first = static_cast<int>(uniform01(rng) * inst.m);
    first = std::min(first, inst.m - 1);
    centers.push_back(first);
    used[first] = 1;
    while (static_cast<int>(centers.size()) < k) {
        std::vector<double> w(inst.n);
        double total = 0;
        for (int j = 0; j < inst.n; ++j) {
            w[j] = inst.cost_of_opened(j, centers);
            total += w[j];
        }
        int picked_client = 0;
        if (total > 0) {
            double r = uniform01(rng) * total;
            double acc = 0;
            for (int j = 0; j < inst.n; ++j) {
                acc += w[j];
                if (acc >= r) {
                    picked_client = j;
                    break;
                }
            }
        }
        int pick = -1;
        double best = infinity();
        for (int i = 0; i < inst.m; ++i)
            if (!used[i] && inst.cost(picked_client, i) < best) {
                best = inst.cost(picked_client, i);
                pick = i;
            }
        if (pick < 0) break;  // fewer distinct facilities than k
        used[pick] = 1;
        centers.push_back(pick);
    }

    // Discrete Lloyd: assign, then re-center each cluster on the facility
    // minimizing its total cost, until the assignment stops changing.
    ClusterSolution sol = assign_clients(inst, centers);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<int> new_centers;
        for (int c : sol.opened) {
            double best_cost = infinity();
            int best_i = c;
            for (int i = 0; i < inst.m; ++i) {
                double s = 0;
                for (int j = 0; j < inst.n; ++j)
                    if (sol.assignment[j] == c) s += inst.cost(j, i);
                if (s < best_cost) {
                    best_cost = s;
                    best_i = i;
                }
            }
            new_centers.push_back(best_i);
        }
        std::sort(new_centers.begin(), new_centers.end());
        new_centers.erase(std::unique(new_centers.begin(), new_centers.end()), new_centers.end());
        ClusterSolution next = assign_clients(inst, new_centers);
        if (next.assignment == sol.assignment && next.opened == sol.opened) break;
        if (next.connection_cost > sol.connection_cost) break;  // collapse made it worse
        sol = std::move(next);
    }
    return sol;
}

}  // namespace pdclust
