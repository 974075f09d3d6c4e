#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pdclust/certify.hpp"
#include "pdclust/instance.hpp"
#include "pdclust/jv.hpp"

namespace pdclust {

/// Bucket index grouping values within a (1+eps) factor: 0 below 1, else
/// 1 + floor(log_{1+eps} v). Values landing exactly on a border belong to the
/// upper bucket; the sweep handles the decreasing-value border rule itself.
int bucket(double v, double eps);

/// alpha_j = min_i c(j,i); feasible at price 0, every facility time 0.
std::vector<double> initial_alpha(const Instance& inst);

struct SweepConfig {
    double eps = 0.1;       // bucket granularity
    double eps_z = 1e-4;    // price step per level
    long long max_levels = 1'000'000;
    bool paper_faithful = false;  // literal step/horizon; demands the [1, n^6] band
    bool verify_levels = true;    // re-check feasibility after every sweep

    double effective_eps_z(const Instance& inst) const;
    long long horizon(const Instance& inst) const;
};

struct SweepResult {
    std::vector<double> alpha;
    std::vector<int> witness;      // per client, facility id
    double theta_end = 0.0;
    int max_bucket = 0;            // largest bucket the threshold reached
    double max_increase = 0.0;
    double max_decrease = 0.0;
    long long events = 0;
};

/// One price bump: transforms a dual for price lambda into a dual for
/// lambda + eps_z by sweeping a threshold over the clients. Event-driven with
/// closed-form next-event times.
SweepResult quasi_sweep(const std::vector<double>& alpha_in, double lambda,
                        const SweepConfig& cfg, const Instance& inst);

struct SequenceLevel {
    long long ell = 0;
    double lambda = 0.0;
    DualSolution dual;
    ClientFacilityGraph g;
    ConflictGraph h;
    std::vector<int> is_set;       // facility ids, maximal independent in h
    double max_alpha_delta = 0.0;  // vs the previous level
    int max_bucket = 0;            // largest bucket the sweep threshold touched
};

/// Generates the level sequence lazily: level ell has price ~ ell*eps_z, each
/// level's dual produced by quasi_sweep from the previous one.
class SequencePipeline {
public:
    SequencePipeline(const Instance& inst, const SweepConfig& cfg, double delta);

    /// Resume from a known dual (alpha feasible at ell*eps_z with witnesses).
    SequencePipeline(const Instance& inst, const SweepConfig& cfg, double delta,
                     std::vector<double> alpha, long long ell);

    const SequenceLevel& current() const { return level_; }
    long long horizon() const { return horizon_; }
    bool at_horizon() const { return level_.ell >= horizon_; }

    /// Advances one level. Returns false once the horizon is reached.
    bool advance();

private:
    void finish_level(std::vector<int> witness = {});

    const Instance& inst_;
    SweepConfig cfg_;
    double delta_;
    double eps_z_;
    long long horizon_;
    SequenceLevel level_;
};

using StopPredicate = std::function<bool(const SequenceLevel&)>;

/// Eager wrapper: collects levels until `stop` fires or the horizon is hit.
std::vector<SequenceLevel> generate_sequence(const Instance& inst, const SweepConfig& cfg,
                                             double delta, const StopPredicate& stop);

struct GraphUpdateStep {
    ConflictGraph h;
    std::vector<FacilityNode> is_nodes;
};

/// Interpolates between the conflict graphs of two consecutive levels through
/// the hybrid graph: duplicate facilities, extend the seed, then retire the
/// old level's facilities one at a time (ascending id), re-extending after
/// each removal. Every emitted set is maximal; sizes drop by at most 1.
std::vector<GraphUpdateStep> quasi_graph_update(const SequenceLevel& lo, const SequenceLevel& hi,
                                                const std::vector<int>& seed_ids,
                                                const Instance& inst, double delta);

/// Optional observer for sequence runs; both callbacks may be empty.
struct TraceSink {
    std::function<void(const SequenceLevel&)> on_level;
    std::function<void(long long ell, int step, int is_size)> on_update_step;
};

struct ExactKResult {
    ClusterSolution solution;
    Certificate certificate;
    long long level = 0;  // level pair (ell, ell+1) the winner came from
    int step = 0;         // step index within that graph update
    bool full_open = false;
    bool padded = false;  // duplicates collapsed; extra facilities opened to reach k
};

/// Walks the level sequence, interpolating independent sets between levels,
/// and returns the first one of size exactly k with its hybrid-audited
/// certificate. k >= m degenerates to opening everything.
ExactKResult solve_exact_k(const Instance& inst, int k, const DeltaPreset& preset,
                           const SweepConfig& cfg, const TraceSink* trace = nullptr,
                           bool normalized = false);

struct BisectionResult {
    ClusterSolution solution;
    Certificate certificate;  // of the returned run; lower_bound = tightest seen
    double lambda = 0.0;      // price of the returned run
    int probes = 0;
};

/// Practical fallback: bisects the opening price on |IS| vs k, keeping the
/// best solution with |IS| <= k and the tightest dual bound from any probe.
BisectionResult bisection_solve(const Instance& inst, int k, const DeltaPreset& preset,
                                int iters, bool normalized = false);

}  // namespace pdclust
