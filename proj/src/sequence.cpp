#include "pdclust/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pdclust {

int bucket(double v, double eps) {
    if (v < 1.0) return 0;
    // Nudge absorbs representation error when v sits exactly on a border
    // (borders belong to the upper bucket).
    double f = std::log(v) / std::log1p(eps);
    return 1 + static_cast<int>(std::floor(f + 1e-9));
}

std::vector<double> initial_alpha(const Instance& inst) {
    std::vector<double> alpha(inst.n);
    for (int j = 0; j < inst.n; ++j) alpha[j] = inst.min_cost(j);
    return alpha;
}

double SweepConfig::effective_eps_z(const Instance& inst) const {
    if (!paper_faithful) return eps_z;
    double n = std::max(2, inst.n);
    double exponent = -3.0 - 10.0 * std::log(n) / std::log1p(eps);
    return std::pow(n, exponent);
}

long long SweepConfig::horizon(const Instance& inst) const {
    double ez = effective_eps_z(inst);
    double n = std::max(2, inst.n);
    // Mirrors the paper's 4*n^7 = 4*n*(max cost) horizon at desk scale.
    double lambda_max = paper_faithful ? 4.0 * std::pow(n, 7)
                                       : 4.0 * n * std::max(inst.max_cost(), 1e-12);
    double levels = std::ceil(lambda_max / ez);
    if (paper_faithful) return static_cast<long long>(std::min(levels, 4e18));
    return static_cast<long long>(std::min(levels, static_cast<double>(max_levels)));
}

namespace {

// Border value above bucket b: (1+eps)^b; bucket 0 ends at 1.
class BorderTable {
public:
    explicit BorderTable(double eps) : eps_(eps) {}
    double above(int b) {
        while (static_cast<int>(pow_.size()) <= b)
            pow_.push_back(pow_.empty() ? 1.0 : std::pow(1.0 + eps_, pow_.size()));
        return pow_[b];
    }

private:
    double eps_;
    std::vector<double> pow_;
};

enum class Stage : char { NotJoined, Active, Removed };

}  // namespace

SweepResult quasi_sweep(const std::vector<double>& alpha_in, double lambda,
                        const SweepConfig& cfg, const Instance& inst) {
    const int n = inst.n, m = inst.m;
    const double eps_z = cfg.effective_eps_z(inst);
    const double inf = infinity();
    BorderTable borders(cfg.eps);

    std::vector<double> alpha = alpha_in;
    std::vector<Stage> stage(n, Stage::NotJoined);
    std::vector<char> at_border(n, 0);  // decreasing value parked on its lower border
    std::vector<char> tight(m, 0);
    std::vector<double> t_tight(m, 0.0);
    std::vector<int> t_bucket(m, 0);
    std::vector<int> witness(n, -1);
    double theta = 0.0;
    int removed_count = 0;

    SweepResult res;

    auto contribution = [&](int i) {
        double c = 0;
        for (int j = 0; j < n; ++j) {
            double b = alpha[j] - inst.cost(j, i);
            if (b > 0) c += b;
        }
        return c;
    };
    // Bucket of a moving value: one parked exactly on a border after
    // decreasing counts as the lower bucket until the threshold catches up.
    auto dyn_bucket = [&](int j) {
        int b = bucket(alpha[j], cfg.eps);
        return at_border[j] ? b - 1 : b;
    };
    auto is_decreasing = [&](int j, int active_count) {
        return active_count > 0 && stage[j] == Stage::NotJoined && !at_border[j] &&
               bucket(alpha[j], cfg.eps) > bucket(theta, cfg.eps);
    };

    // Remove an active client with a tight edge to a tight facility whose
    // time-bucket does not exceed the client's; witness = lowest valid id.
    auto try_remove = [&](int j) {
        if (stage[j] != Stage::Active) return false;
        int bj = bucket(alpha[j], cfg.eps);
        for (int i = 0; i < m; ++i) {
            if (!tight[i]) continue;
            if (alpha[j] >= inst.cost(j, i) - kEta && t_bucket[i] <= bj) {
                stage[j] = Stage::Removed;
                witness[j] = i;
                ++removed_count;
                return true;
            }
        }
        return false;
    };

    auto fire_facility = [&](int i) {
        tight[i] = 1;
        double tv = 0;
        int tb = 0;
        for (int j = 0; j < n; ++j)
            if (alpha[j] - inst.cost(j, i) > kEta) {
                if (alpha[j] > tv) tv = alpha[j];
                tb = std::max(tb, dyn_bucket(j));
            }
        t_tight[i] = tv;
        t_bucket[i] = tb;
    };

    auto join = [&](int j) {
        stage[j] = Stage::Active;
        at_border[j] = 0;
        if (alpha[j] < theta) alpha[j] = theta;
        try_remove(j);  // immediate removal keeps alpha unchanged
    };

    for (int j = 0; j < n; ++j)
        if (alpha[j] <= theta) join(j);

    long long max_events =
        10LL * (n + m) *
            (bucket(std::max(inst.max_cost(), 1.0) + lambda + eps_z + 1, cfg.eps) + 2) *
            std::max(n, 1) +
        1000;

    while (removed_count < n) {
        if (res.events++ > max_events) {
            std::ostringstream os;
            os << "sweep exceeded event budget at theta=" << theta << " lambda=" << lambda
               << " removed=" << removed_count << "/" << n;
            throw SolverError(Errc::InternalError, os.str());
        }
        int active_count = 0;
        for (int j = 0; j < n; ++j)
            if (stage[j] == Stage::Active) ++active_count;

        double next = inf;
        int snap_client = -1;  // decreasing client that lands on an exact value
        double snap_value = 0;
        bool snap_is_border = false;
        auto offer = [&](double t) {
            if (t < next) {
                next = t;
                snap_client = -1;
            }
        };
        auto offer_snap = [&](double t, int j, double value, bool border) {
            // On ties the landing wins: its snap is what guarantees progress.
            if (t < next || (t == next && snap_client < 0)) {
                next = t;
                snap_client = j;
                snap_value = value;
                snap_is_border = border;
            }
        };
        // Joins: theta reaches a non-moving, not-yet-joined value.
        for (int j = 0; j < n; ++j)
            if (stage[j] == Stage::NotJoined && !is_decreasing(j, active_count))
                offer(alpha[j]);
        // Threshold bucket border.
        double tborder = borders.above(bucket(theta, cfg.eps));
        if (tborder > theta) offer(tborder);
        // Facility fill-ups: blocked while any strict contributor is
        // decreasing (only then is the contribution non-increasing).
        for (int i = 0; i < m; ++i) {
            if (tight[i]) continue;
            bool blocked = false;
            int rate = 0;
            for (int j = 0; j < n; ++j) {
                if (alpha[j] < inst.cost(j, i)) continue;
                if (alpha[j] > inst.cost(j, i) && is_decreasing(j, active_count)) blocked = true;
                if (stage[j] == Stage::Active) ++rate;
            }
            if (blocked || rate == 0) continue;
            double slack = (lambda - contribution(i)) + eps_z;
            offer(slack <= 0 ? theta : theta + slack / rate);
        }
        if (active_count > 0) {
            for (int j = 0; j < n; ++j) {
                if (stage[j] == Stage::Active) {
                    // Upward edge crossings (alpha_j tracks theta while active).
                    for (int i = 0; i < m; ++i) {
                        double c = inst.cost(j, i);
                        if (c > alpha[j]) offer(c);
                    }
                } else if (is_decreasing(j, active_count)) {
                    // Landing on the threshold's bucket border.
                    double border = borders.above(bucket(theta, cfg.eps));
                    if (alpha[j] > border)
                        offer_snap(theta + (alpha[j] - border) / active_count, j, border, true);
                    // Downward edge crossings change facility rates and guards.
                    for (int i = 0; i < m; ++i) {
                        double c = inst.cost(j, i);
                        if (alpha[j] > c && c > border)
                            offer_snap(theta + (alpha[j] - c) / active_count, j, c, false);
                    }
                }
            }
        }
        if (next == inf)
            throw SolverError(Errc::InternalError, "sweep stalled with undecided clients");

        // Advance. Active values track theta exactly; the landing client (if
        // any) gets its exact target, other decreasing values follow the rate.
        double step = next - theta;
        double border_target = borders.above(bucket(theta, cfg.eps));
        if (active_count > 0 && step > 0) {
            for (int j = 0; j < n; ++j) {
                if (!is_decreasing(j, active_count) || j == snap_client) continue;
                double landed = alpha[j] - active_count * step;
                if (landed <= border_target ||
                    std::abs(landed - border_target) < 1e-15 * border_target) {
                    alpha[j] = border_target;
                    at_border[j] = 1;
                } else {
                    alpha[j] = landed;
                }
            }
        }
        if (snap_client >= 0) {
            alpha[snap_client] = snap_value;
            if (snap_is_border) at_border[snap_client] = 1;
        }
        theta = next;
        for (int j = 0; j < n; ++j)
            if (stage[j] == Stage::Active) alpha[j] = theta;

        // Threshold entered a new bucket: values parked in it stop being special.
        int btheta = bucket(theta, cfg.eps);
        for (int j = 0; j < n; ++j)
            if (at_border[j] && bucket(alpha[j], cfg.eps) <= btheta) at_border[j] = 0;

        // Facilities first (ascending id), then removals, then joins.
        for (int i = 0; i < m; ++i) {
            if (tight[i]) continue;
            bool blocked = false;
            for (int j = 0; j < n; ++j)
                if (alpha[j] > inst.cost(j, i) && is_decreasing(j, active_count)) blocked = true;
            if (blocked) continue;
            double c = contribution(i);
            if (c >= (lambda + eps_z) - 1e-12 * std::max(1.0, lambda + eps_z)) fire_facility(i);
        }
        for (int j = 0; j < n; ++j) try_remove(j);
        for (int j = 0; j < n; ++j)
            if (stage[j] == Stage::NotJoined && !is_decreasing(j, active_count) &&
                alpha[j] <= theta)
                join(j);
    }

    res.alpha = std::move(alpha);
    res.witness = std::move(witness);
    res.theta_end = theta;
    res.max_bucket = bucket(std::max(theta, 1.0), cfg.eps);
    for (int j = 0; j < n; ++j) {
        res.max_increase = std::max(res.max_increase, res.alpha[j] - alpha_in[j]);
        res.max_decrease = std::max(res.max_decrease, alpha_in[j] - res.alpha[j]);
    }
    return res;
}

namespace {

DualSolution dual_from_alpha(const Instance& inst, std::vector<double> alpha, double lambda,
                             std::vector<int> witness) {
    DualSolution dual;
    dual.lambda = lambda;
    dual.alpha = std::move(alpha);
    dual.witness = std::move(witness);
    dual.t.assign(inst.m, 0.0);
    for (int i = 0; i < inst.m; ++i) {
        double c = 0;
        for (int j = 0; j < inst.n; ++j) {
            double b = dual.alpha[j] - inst.cost(j, i);
            if (b > 0) c += b;
        }
        if (c >= lambda - kEta) {
            dual.tight.push_back(i);
            double ti = 0;
            for (int j = 0; j < inst.n; ++j)
                if (dual.alpha[j] - inst.cost(j, i) > kEta) ti = std::max(ti, dual.alpha[j]);
            dual.t[i] = ti;
        }
    }
    return dual;
}

}  // namespace

SequencePipeline::SequencePipeline(const Instance& inst, const SweepConfig& cfg, double delta)
    : SequencePipeline(inst, cfg, delta, initial_alpha(inst), 0) {}

SequencePipeline::SequencePipeline(const Instance& inst, const SweepConfig& cfg, double delta,
                                   std::vector<double> alpha, long long ell)
    : inst_(inst), cfg_(cfg), delta_(delta) {
    eps_z_ = cfg.effective_eps_z(inst);
    horizon_ = cfg.horizon(inst);
    if (cfg_.paper_faithful) {
        const double n = inst.n;
        const double hi = std::pow(n, 6.0);
        for (int j = 0; j < inst.n; ++j)
            for (int i = 0; i < inst.m; ++i) {
                double c = inst.cost(j, i);
                double d2 = inst.squared_costs() ? c : c * c;
                if (d2 < 1.0 - 1e-9 || d2 > hi * (1 + 1e-9))
                    throw SolverError(Errc::BadInput,
                                      "paper-faithful mode requires squared distances in [1, n^6]");
            }
    }
    level_.ell = ell;
    level_.lambda = static_cast<double>(ell) * eps_z_;
    level_.dual =
        dual_from_alpha(inst_, std::move(alpha), level_.lambda, std::vector<int>(inst.n, -1));
    finish_level();
}

void SequencePipeline::finish_level(std::vector<int> witness) {
    if (!witness.empty()) level_.dual.witness = std::move(witness);
    level_.g = build_client_facility_graph(level_.dual, inst_);
    level_.h = build_conflict_graph(level_.g, delta_, inst_);
    std::vector<int> nodes = maximal_independent_set(level_.h, {});
    level_.is_set.clear();
    for (int u : nodes) level_.is_set.push_back(level_.h.nodes[u].id);
    if (cfg_.verify_levels) {
        for (int i = 0; i < inst_.m; ++i) {
            double c = 0;
            for (int j = 0; j < inst_.n; ++j) {
                double b = level_.dual.alpha[j] - inst_.cost(j, i);
                if (b > 0) c += b;
            }
            if (c > level_.lambda + kEta)
                throw SolverError(Errc::InternalError, "level dual infeasible");
        }
    }
}

bool SequencePipeline::advance() {
    if (at_horizon()) return false;
    SweepResult sw = quasi_sweep(level_.dual.alpha, level_.lambda, cfg_, inst_);
    SequenceLevel next;
    next.ell = level_.ell + 1;
    next.lambda = level_.lambda + eps_z_;  // accumulated price keeps tightness exact
    next.max_alpha_delta = std::max(sw.max_increase, sw.max_decrease);
    next.max_bucket = sw.max_bucket;
    next.dual = dual_from_alpha(inst_, std::move(sw.alpha), next.lambda, std::move(sw.witness));
    level_ = std::move(next);
    finish_level();
    return true;
}

std::vector<SequenceLevel> generate_sequence(const Instance& inst, const SweepConfig& cfg,
                                             double delta, const StopPredicate& stop) {
    SequencePipeline pipe(inst, cfg, delta);
    std::vector<SequenceLevel> out;
    out.push_back(pipe.current());
    while (!(stop && stop(out.back())) && pipe.advance()) out.push_back(pipe.current());
    return out;
}

namespace {

// Union of two levels' client-facility graphs with shared clients and
// level-tagged facility copies.
struct Hybrid {
    ClientFacilityGraph g;
    std::vector<char> present;
    const Instance* inst;
    double delta;
    int lo_count;

    ConflictGraph conflict_of_present(std::vector<int>* node_of_hybrid = nullptr) const {
        ClientFacilityGraph sub;
        std::vector<int> remap(g.facilities.size(), -1);
        for (size_t u = 0; u < g.facilities.size(); ++u)
            if (present[u]) {
                remap[u] = sub.node_count();
                sub.facilities.push_back(g.facilities[u]);
            }
        sub.client_edges.assign(g.client_edges.size(), {});
        for (size_t j = 0; j < g.client_edges.size(); ++j)
            for (int u : g.client_edges[j])
                if (remap[u] >= 0) sub.client_edges[j].push_back(remap[u]);
        if (node_of_hybrid) *node_of_hybrid = remap;
        return build_conflict_graph(sub, delta, *inst);
    }
};

Hybrid make_hybrid(const SequenceLevel& lo, const SequenceLevel& hi, const Instance& inst,
                   double delta) {
    Hybrid hy;
    hy.inst = &inst;
    hy.delta = delta;
    hy.lo_count = lo.g.node_count();
    hy.g.facilities = lo.g.facilities;
    for (auto& f : hy.g.facilities) f.level = 0;
    for (const auto& f : hi.g.facilities) hy.g.facilities.push_back({f.id, 1, f.t});
    hy.g.client_edges.assign(inst.n, {});
    for (int j = 0; j < inst.n; ++j) {
        hy.g.client_edges[j] = lo.g.client_edges[j];
        for (int u : hi.g.client_edges[j]) hy.g.client_edges[j].push_back(hy.lo_count + u);
    }
    hy.present.assign(hy.g.facilities.size(), 1);
    return hy;
}

// Greedy extension scanning the newer level first: retiring an old facility
// immediately frees its duplicate, so interpolation between coinciding levels
// never drifts off the seed.
std::vector<int> extend_newer_first(const ConflictGraph& h, std::vector<char> chosen) {
    const int v = h.node_count();
    std::vector<int> order(v);
    for (int u = 0; u < v; ++u) order[u] = u;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (h.nodes[a].level != h.nodes[b].level) return h.nodes[a].level > h.nodes[b].level;
        return h.nodes[a].id < h.nodes[b].id;
    });
    for (int u : order) {
        if (chosen[u]) continue;
        bool free = true;
        for (int w = 0; w < v && free; ++w)
            if (chosen[w] && h.edge(u, w)) free = false;
        if (free) chosen[u] = 1;
    }
    std::vector<int> out;
    for (int u = 0; u < v; ++u)
        if (chosen[u]) out.push_back(u);
    return out;
}

// True when the hybrid conflict graph is two mirrored copies of `hlo` with
// every facility adjacent to its own duplicate. Interpolating across such a
// graph provably keeps the seed (sizes constant), so the driver may skip it.
bool twin_structure(const ConflictGraph& hlo, const ConflictGraph& hybrid) {
    const int v = hlo.node_count();
    if (hybrid.node_count() != 2 * v) return false;
    for (int u = 0; u < v; ++u) {
        if (hybrid.nodes[u].id != hlo.nodes[u].id || hybrid.nodes[u].level != 0) return false;
        if (hybrid.nodes[v + u].id != hlo.nodes[u].id || hybrid.nodes[v + u].level != 1)
            return false;
    }
    for (int a = 0; a < v; ++a) {
        if (!hybrid.edge(a, v + a)) return false;
        for (int b = 0; b < v; ++b) {
            if (a == b) continue;
            bool e = hlo.edge(a, b);
            if (hybrid.edge(a, b) != e) return false;
            if (hybrid.edge(v + a, v + b) != e) return false;
            if (hybrid.edge(a, v + b) != e) return false;
        }
    }
    return true;
}

std::vector<GraphUpdateStep> run_graph_update(Hybrid& hy, const std::vector<int>& seed_ids) {
    // Membership over hybrid node indices; seed lives in the old level.
    std::vector<char> member(hy.g.facilities.size(), 0);
    for (int u = 0; u < hy.lo_count; ++u)
        for (int id : seed_ids)
            if (hy.g.facilities[u].id == id) member[u] = 1;

    std::vector<GraphUpdateStep> steps;
    auto emit = [&]() {
        std::vector<int> remap;
        GraphUpdateStep st;
        st.h = hy.conflict_of_present(&remap);
        std::vector<char> chosen(st.h.node_count(), 0);
        for (size_t u = 0; u < hy.g.facilities.size(); ++u)
            if (hy.present[u] && member[u]) chosen[remap[u]] = 1;
        std::vector<int> nodes = extend_newer_first(st.h, std::move(chosen));
        std::fill(member.begin(), member.end(), 0);
        for (int c : nodes) {
            st.is_nodes.push_back(st.h.nodes[c]);
            for (size_t u = 0; u < hy.g.facilities.size(); ++u)
                if (hy.present[u] && remap[u] == c) member[u] = 1;
        }
        steps.push_back(std::move(st));
    };

    emit();
    for (int u = 0; u < hy.lo_count; ++u) {  // ascending id: graph nodes are id-sorted
        hy.present[u] = 0;
        member[u] = 0;
        emit();
    }
    return steps;
}

void check_seed(const SequenceLevel& lo, const std::vector<int>& seed_ids) {
    std::vector<int> seed_nodes;
    for (int id : seed_ids) {
        int found = -1;
        for (int u = 0; u < lo.h.node_count(); ++u)
            if (lo.h.nodes[u].id == id) found = u;
        if (found < 0) throw SolverError(Errc::SeedConflict, "seed facility not in graph");
        seed_nodes.push_back(found);
    }
    // SeedConflict on dependence; a maximal seed gains nothing under extension.
    std::vector<int> extended = maximal_independent_set(lo.h, seed_nodes);
    if (extended.size() != seed_nodes.size())
        throw SolverError(Errc::SeedConflict, "seed is not maximal");
}

}  // namespace

std::vector<GraphUpdateStep> quasi_graph_update(const SequenceLevel& lo, const SequenceLevel& hi,
                                                const std::vector<int>& seed_ids,
                                                const Instance& inst, double delta) {
    check_seed(lo, seed_ids);
    Hybrid hy = make_hybrid(lo, hi, inst, delta);
    return run_graph_update(hy, seed_ids);
}

namespace {

ClusterSolution solution_from_nodes(const Instance& inst, const std::vector<FacilityNode>& nodes,
                                    int k, bool* padded) {
    std::vector<int> ids;
    ids.reserve(nodes.size());
    for (const auto& f : nodes) ids.push_back(f.id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    *padded = false;
    if (static_cast<int>(ids.size()) < k) {
        // Co-located duplicates collapsed below k distinct ids; opening more
        // facilities only improves the cost.
        *padded = true;
        for (int i = 0; i < inst.m && static_cast<int>(ids.size()) < k; ++i)
            if (!std::binary_search(ids.begin(), ids.end(), i)) {
                ids.insert(std::lower_bound(ids.begin(), ids.end(), i), i);
            }
    }
    return assign_clients(inst, ids);
}

Certificate hybrid_certificate(const Instance& inst, const SequenceLevel& lo,
                               const SequenceLevel& hi, const std::vector<FacilityNode>& is_nodes,
                               const ClusterSolution& sol, const DeltaPreset& preset, double eps,
                               bool normalized) {
    HybridAccount account = build_hybrid_account(lo.dual, hi.dual, is_nodes, inst);
    Certificate cert;
    cert.lambda = lo.lambda;
    for (double a : account.alpha) cert.dual_value += a;
    cert.lower_bound = cert.dual_value - cert.lambda * inst.k;
    cert.feasible = true;
    for (int i = 0; i < inst.m; ++i) {
        double c = 0;
        for (int j = 0; j < inst.n; ++j) {
            double b = account.alpha[j] - inst.cost(j, i);
            if (b > 0) c += b;
        }
        if (c > lo.lambda + kEta) cert.feasible = false;
    }
    double denom = cert.dual_value - cert.lambda * static_cast<double>(sol.opened.size());
    if (denom <= 0)
        cert.degenerate = true;
    else
        cert.lmp_ratio = sol.connection_cost / denom;
    AuditReport audit = audit_hybrid(account, sol, true, eps, inst, preset);
    cert.per_client_audit = std::move(audit.rows);
    cert.plus_one_unabsorbed = !normalized;
    return cert;
}

}  // namespace

ExactKResult solve_exact_k(const Instance& inst, int k, const DeltaPreset& preset,
                           const SweepConfig& cfg, const TraceSink* trace, bool normalized) {
    if (k > inst.m) throw SolverError(Errc::InvalidK, "k exceeds facility count");
    ExactKResult res;
    if (k >= inst.m) {
        std::vector<int> all(inst.m);
        for (int i = 0; i < inst.m; ++i) all[i] = i;
        res.solution = assign_clients(inst, all);
        res.full_open = true;
        DualSolution dual;
        dual.lambda = 0;
        dual.alpha = initial_alpha(inst);
        dual.t.assign(inst.m, 0.0);
        for (int i = 0; i < inst.m; ++i) dual.tight.push_back(i);
        dual.witness.assign(inst.n, -1);
        res.certificate = make_certificate(inst, dual, res.solution, preset, normalized);
        return res;
    }

    SequencePipeline pipe(inst, cfg, preset.delta);
    SequenceLevel prev = pipe.current();
    if (trace && trace->on_level) trace->on_level(prev);

    // The interpolated independent set is threaded through the whole run: the
    // final set of each level pair seeds the next.
    std::vector<int> carried = prev.is_set;  // level 0: all facilities
    int smallest_above = static_cast<int>(carried.size());
    int largest_below = -1;
    auto note_size = [&](int sz) {
        if (sz > k) smallest_above = std::min(smallest_above, sz);
        if (sz < k) largest_below = std::max(largest_below, sz);
    };
    note_size(static_cast<int>(carried.size()));

    while (pipe.advance()) {
        const SequenceLevel& cur = pipe.current();
        if (trace && trace->on_level) trace->on_level(cur);

        Hybrid hy = make_hybrid(prev, cur, inst, preset.delta);
        ConflictGraph h1 = hy.conflict_of_present();
        if (twin_structure(prev.h, h1)) {
            prev = cur;
            continue;  // a mirrored hybrid keeps the carried set intact
        }
        std::vector<GraphUpdateStep> steps = run_graph_update(hy, carried);
        for (int s = 0; s < static_cast<int>(steps.size()); ++s) {
            int sz = static_cast<int>(steps[s].is_nodes.size());
            if (trace && trace->on_update_step) trace->on_update_step(prev.ell, s + 1, sz);
            note_size(sz);
            if (sz == k) {
                res.level = prev.ell;
                res.step = s + 1;
                res.solution = solution_from_nodes(inst, steps[s].is_nodes, k, &res.padded);
                res.certificate = hybrid_certificate(inst, prev, cur, steps[s].is_nodes,
                                                     res.solution, preset, cfg.eps, normalized);
                return res;
            }
        }
        carried.clear();
        for (const auto& f : steps.back().is_nodes) carried.push_back(f.id);
        std::sort(carried.begin(), carried.end());
        prev = cur;
    }
    std::ostringstream os;
    os << "horizon " << pipe.horizon() << " exhausted; |IS| bracketed by (" << largest_below
       << ", " << smallest_above << ") around k=" << k;
    throw HorizonExhaustedError(smallest_above, largest_below, os.str());
}

BisectionResult bisection_solve(const Instance& inst, int k, const DeltaPreset& preset, int iters,
                                bool normalized) {
    if (k > inst.m) throw SolverError(Errc::InvalidK, "k exceeds facility count");
    BisectionResult res;
    double best_cost = infinity();
    double best_lb = -infinity();
    bool have = false;
    JvResult best_run;
    double best_lambda = 0;

    auto probe = [&](double lambda) {
        JvResult run = jv(inst, lambda, preset.delta);
        ++res.probes;
        double lb = 0;
        for (double a : run.dual.alpha) lb += a;
        lb -= lambda * k;
        best_lb = std::max(best_lb, lb);
        int sz = static_cast<int>(run.solution.opened.size());
        if (sz <= k && run.solution.connection_cost < best_cost) {
            best_cost = run.solution.connection_cost;
            best_run = std::move(run);
            best_lambda = lambda;
            have = true;
        }
        return sz;
    };

    probe(0.0);
    double lo = 0.0;
    double hi = std::max(inst.n * inst.max_cost(), 1e-9);
    for (int guard = 0; guard < 60 && probe(hi) > k; ++guard) hi *= 2;
    for (int it = 0; it < iters; ++it) {
        double mid = 0.5 * (lo + hi);
        if (probe(mid) > k)
            lo = mid;
        else
            hi = mid;
    }
    if (!have) throw SolverError(Errc::InternalError, "bisection found no feasible opening");
    res.solution = best_run.solution;
    res.lambda = best_lambda;
    res.certificate = make_certificate(inst, best_run.dual, best_run.solution, preset, normalized);
    // The k-constrained bound may come from any feasible probe, not only the
    // returned one.
    res.certificate.lower_bound = std::max(res.certificate.lower_bound, best_lb);
    return res;
}

}  // namespace pdclust
