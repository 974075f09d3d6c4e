#include "pdclust/jv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdclust {

bool DualSolution::is_tight(int i) const {
    return std::find(tight.begin(), tight.end(), i) != tight.end();
}

bool ClientFacilityGraph::adjacent(int j, int node) const {
    const auto& e = client_edges[j];
    return std::find(e.begin(), e.end(), node) != e.end();
}

bool ConflictGraph::same_edges(const ConflictGraph& other) const {
    if (nodes.size() != other.nodes.size()) return false;
    for (size_t v = 0; v < nodes.size(); ++v)
        if (nodes[v].id != other.nodes[v].id || nodes[v].level != other.nodes[v].level)
            return false;
    return adj == other.adj;
}

DualSolution dual_growth(const Instance& inst, double lambda) {
    if (lambda < 0) throw SolverError(Errc::BadInput, "negative opening price");
    const int n = inst.n, m = inst.m;
    const double inf = infinity();

    std::vector<double> alpha(n, 0.0);
    std::vector<char> active(n, 1);
    std::vector<char> tight(m, 0);
    std::vector<int> witness(n, -1);
    int active_count = n;
    double now = 0.0;

    auto contribution = [&](int i) {
        double c = 0;
        for (int j = 0; j < n; ++j) {
            double b = alpha[j] - inst.cost(j, i);
            if (b > 0) c += b;
        }
        return c;
    };

    // Facilities first (ascending id), each absorbing its tight-edge clients,
    // then leftover clients that touched an already-tight facility.
    auto process_events = [&]() {
        for (int i = 0; i < m; ++i) {
            if (tight[i] || contribution(i) < lambda - kEta) continue;
            tight[i] = 1;
            for (int j = 0; j < n; ++j)
                if (active[j] && alpha[j] >= inst.cost(j, i) - kEta) {
                    active[j] = 0;
                    witness[j] = i;
                    --active_count;
                }
        }
        for (int j = 0; j < n; ++j) {
            if (!active[j]) continue;
            for (int i = 0; i < m; ++i)
                if (tight[i] && alpha[j] >= inst.cost(j, i) - kEta) {
                    active[j] = 0;
                    witness[j] = i;
                    --active_count;
                    break;
                }
        }
    };

    process_events();
    long long guard = 10LL * (n + m + static_cast<long long>(n) * m) + 16;
    while (active_count > 0) {
        if (--guard < 0) throw SolverError(Errc::InternalError, "dual growth failed to terminate");
        double next = inf;
        // Edge crossings: an active alpha meets some cost value.
        for (int j = 0; j < n; ++j) {
            if (!active[j]) continue;
            for (int i = 0; i < m; ++i) {
                double c = inst.cost(j, i);
                if (c > now) next = std::min(next, c);
            }
        }
        // Facility fill-ups at the current contribution rates.
        for (int i = 0; i < m; ++i) {
            if (tight[i]) continue;
            int rate = 0;
            for (int j = 0; j < n; ++j)
                if (active[j] && inst.cost(j, i) <= now) ++rate;
            if (rate == 0) continue;
            double slack = lambda - contribution(i);
            double when = slack <= 0 ? now : now + slack / rate;
            next = std::min(next, when);
        }
        if (next == inf) throw SolverError(Errc::InternalError, "dual growth stalled");
        for (int j = 0; j < n; ++j)
            if (active[j]) alpha[j] = next;
        now = next;
        process_events();
    }

    DualSolution dual;
    dual.lambda = lambda;
    dual.alpha = std::move(alpha);
    dual.witness = std::move(witness);
    dual.t.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        if (!tight[i]) continue;
        dual.tight.push_back(i);
        double ti = 0;
        for (int j = 0; j < n; ++j)
            if (dual.alpha[j] - inst.cost(j, i) > kEta) ti = std::max(ti, dual.alpha[j]);
        dual.t[i] = ti;
    }
    return dual;
}

ClientFacilityGraph build_client_facility_graph(const DualSolution& dual, const Instance& inst) {
    ClientFacilityGraph g;
    std::vector<int> node_of(inst.m, -1);
    for (int i : dual.tight) {
        node_of[i] = g.node_count();
        g.facilities.push_back({i, 0, dual.t[i]});
    }
    g.client_edges.assign(inst.n, {});
    for (int j = 0; j < inst.n; ++j)
        for (int i : dual.tight)
            if (dual.alpha[j] - inst.cost(j, i) > kEta) g.client_edges[j].push_back(node_of[i]);
    return g;
}

ConflictGraph build_conflict_graph(const ClientFacilityGraph& g, double delta,
                                   const Instance& inst) {
    ConflictGraph h;
    h.delta = delta;
    h.nodes = g.facilities;
    const int v = h.node_count();
    h.adj.assign(static_cast<size_t>(v) * v, 0);

    std::vector<char> shares(static_cast<size_t>(v) * v, 0);
    for (int j = 0; j < static_cast<int>(g.client_edges.size()); ++j)
        for (int a : g.client_edges[j])
            for (int b : g.client_edges[j]) {
                if (a == b) continue;
                shares[static_cast<size_t>(a) * v + b] = 1;
            }
    for (int a = 0; a < v; ++a)
        for (int b = a + 1; b < v; ++b) {
            if (!shares[static_cast<size_t>(a) * v + b]) continue;
            bool close = true;
            if (delta != infinity()) {
                // Duplicates of one facility sit at distance zero.
                double c = h.nodes[a].id == h.nodes[b].id ? 0.0
                                                          : inst.fcost(h.nodes[a].id, h.nodes[b].id);
                close = c <= delta * std::min(h.nodes[a].t, h.nodes[b].t) + kEta;
            }
            if (close) {
                h.adj[static_cast<size_t>(a) * v + b] = 1;
                h.adj[static_cast<size_t>(b) * v + a] = 1;
            }
        }
    return h;
}

namespace {

bool independent_against(const ConflictGraph& h, const std::vector<char>& chosen, int cand) {
    for (int u = 0; u < h.node_count(); ++u)
        if (chosen[u] && h.edge(u, cand)) return false;
    return true;
}

}  // namespace

std::vector<int> maximal_independent_set(const ConflictGraph& h, const std::vector<int>& seed) {
    const int v = h.node_count();
    std::vector<char> chosen(v, 0);
    for (int s : seed) {
        if (!independent_against(h, chosen, s))
            throw SolverError(Errc::SeedConflict, "seed is not independent");
        chosen[s] = 1;
    }
    std::vector<int> order(v);
    for (int u = 0; u < v; ++u) order[u] = u;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (h.nodes[a].level != h.nodes[b].level) return h.nodes[a].level < h.nodes[b].level;
        return h.nodes[a].id < h.nodes[b].id;
    });
    for (int u : order)
        if (!chosen[u] && independent_against(h, chosen, u)) chosen[u] = 1;
    std::vector<int> out;
    for (int u = 0; u < v; ++u)
        if (chosen[u]) out.push_back(u);
    return out;
}

ClusterSolution assign_clients(const Instance& inst, const std::vector<int>& opened_ids) {
    ClusterSolution sol;
    sol.opened = opened_ids;
    std::sort(sol.opened.begin(), sol.opened.end());
    sol.opened.erase(std::unique(sol.opened.begin(), sol.opened.end()), sol.opened.end());
    if (sol.opened.empty()) throw SolverError(Errc::InternalError, "no opened facility");
    sol.assignment.assign(inst.n, -1);
    for (int j = 0; j < inst.n; ++j) {
        double best = infinity();
        for (int i : sol.opened)
            if (inst.cost(j, i) < best) {
                best = inst.cost(j, i);
                sol.assignment[j] = i;
            }
        sol.connection_cost += best;
    }
    return sol;
}

JvResult jv(const Instance& inst, double lambda, double delta) {
    JvResult r;
    r.dual = dual_growth(inst, lambda);
    r.graph = build_client_facility_graph(r.dual, inst);
    r.conflict = build_conflict_graph(r.graph, delta, inst);
    std::vector<int> is_nodes = maximal_independent_set(r.conflict, {});
    std::vector<int> ids;
    ids.reserve(is_nodes.size());
    for (int u : is_nodes) ids.push_back(r.conflict.nodes[u].id);
    r.solution = assign_clients(inst, ids);
    return r;
}

DeltaPreset delta_preset(Objective objective) {
    switch (objective) {
        case Objective::GeneralMetricKMeans:
            return {infinity(), 9.0};
        case Objective::EuclideanKMeans: {
            // delta solving (1+sqrt(d))^2 = 1/(d/2-1) on (2,4); the ratio is the
            // common value of the two expressions at the root.
            double lo = 2.0 + 1e-12, hi = 4.0;
            auto f = [](double d) { double s = 1 + std::sqrt(d); return s * s - 1.0 / (d / 2 - 1); };
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hi);
                (f(mid) < 0 ? lo : hi) = mid;
            }
            double delta = 0.5 * (lo + hi);
            double s = 1 + std::sqrt(delta);
            return {delta, std::max(s * s, 1.0 / (delta / 2 - 1))};
        }
        case Objective::EuclideanKMedian: {
            double delta = std::sqrt(8.0 / 3.0);
            double rho = std::max({1 + delta, 1 / (delta - 1), 1 / (1.5 * delta - 2)});
            return {delta, rho};
        }
    }
    throw SolverError(Errc::BadInput, "unknown objective");
}

}  // namespace pdclust
