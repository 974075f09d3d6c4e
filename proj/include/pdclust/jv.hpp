#pragma once

#include <limits>
#include <vector>

#include "pdclust/instance.hpp"

namespace pdclust {

/// Comparison tolerance for tightness, slack, and edge-strictness tests.
inline constexpr double kEta = 1e-9;

inline double infinity() { return std::numeric_limits<double>::infinity(); }

/// Feasible dual of the lagrangian facility-location relaxation at opening
/// price lambda. beta_ij = max(alpha_j - c(j,i), 0).
struct DualSolution {
    double lambda = 0.0;
    std::vector<double> alpha;    // per client
    std::vector<int> tight;       // facility ids, ascending
    std::vector<double> t;        // per facility; 0 when no strict contributor
    std::vector<int> witness;     // per client, facility id

    double beta(const Instance& inst, int j, int i) const {
        double b = alpha[j] - inst.cost(j, i);
        return b > 0 ? b : 0;
    }
    bool is_tight(int i) const;
};

/// A facility vertex. `level` tags the originating dual when facilities from
/// two duals are mixed in one graph (0 = older, 1 = newer); plain graphs use 0.
struct FacilityNode {
    int id = 0;
    int level = 0;
    double t = 0.0;
};

/// Bipartite client/tight-facility graph; edge (j,i) iff alpha_j - c(j,i) > eta.
struct ClientFacilityGraph {
    std::vector<FacilityNode> facilities;
    std::vector<std::vector<int>> client_edges;  // per client: indices into facilities

    int node_count() const { return static_cast<int>(facilities.size()); }
    bool adjacent(int j, int node) const;
};

/// Facilities of a client-facility graph; edge iff the two share a client and
/// c(i,i') <= delta * min(t_i, t_i'). delta = infinity drops the distance test.
struct ConflictGraph {
    std::vector<FacilityNode> nodes;
    std::vector<char> adj;  // dense node_count^2
    double delta = 0.0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    bool edge(int a, int b) const { return adj[static_cast<size_t>(a) * nodes.size() + b] != 0; }
    bool same_edges(const ConflictGraph& other) const;
};

struct ClusterSolution {
    std::vector<int> opened;      // facility ids, ascending, deduplicated
    std::vector<int> assignment;  // per client: opened facility id (lowest id on ties)
    double connection_cost = 0.0;
};

/// Event-driven dual-growth phase. All alpha rise uniformly; a facility whose
/// constraint fills up goes tight and absorbs its tight-edge clients, a client
/// touching an already-tight facility stops there. Simultaneous events resolve
/// facilities-first, then ascending id.
DualSolution dual_growth(const Instance& inst, double lambda);

ClientFacilityGraph build_client_facility_graph(const DualSolution& dual, const Instance& inst);

ConflictGraph build_conflict_graph(const ClientFacilityGraph& g, double delta, const Instance& inst);

/// Greedily extends `seed` (node indices, must be independent) to a maximal
/// independent set, scanning candidates in ascending (level, id) order.
std::vector<int> maximal_independent_set(const ConflictGraph& h, const std::vector<int>& seed);

/// Nearest-opened-facility assignment (ties to the lowest facility id).
ClusterSolution assign_clients(const Instance& inst, const std::vector<int>& opened_ids);

struct JvResult {
    DualSolution dual;
    ClientFacilityGraph graph;
    ConflictGraph conflict;
    ClusterSolution solution;
};

/// Full primal-dual run at one opening price: growth, pruning, assignment.
JvResult jv(const Instance& inst, double lambda, double delta);

struct DeltaPreset {
    double delta = 0.0;
    double rho = 0.0;
};

/// Objective-specific conflict-graph aggressiveness and its proven ratio.
DeltaPreset delta_preset(Objective objective);

}  // namespace pdclust
