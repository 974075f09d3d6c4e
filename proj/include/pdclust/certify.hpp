#pragma once

#include <string>
#include <vector>

#include "pdclust/instance.hpp"
#include "pdclust/jv.hpp"

namespace pdclust {

struct FacilitySlack {
    int facility = 0;
    double slack = 0.0;  // lambda - sum_j beta_ij
};

struct FeasibilityReport {
    bool feasible = false;
    double min_slack = 0.0;
    std::vector<FacilitySlack> slacks;
};

/// Recomputes every facility constraint from raw alpha and the cost matrix.
/// Feasible iff min slack >= -eta.
FeasibilityReport verify_dual_feasibility(const DualSolution& dual, const Instance& inst);

/// sum(alpha) - lambda*k, valid as a lower bound on the k-constrained LP
/// optimum for any feasible dual. Throws RefusesToCertify on infeasible input.
double lp_lower_bound(const DualSolution& dual, int k, const Instance& inst);

struct LmpRatio {
    double ratio = 0.0;
    double numerator = 0.0;    // sum_j c(j, opened)
    double denominator = 0.0;  // sum(alpha) - lambda*|opened|
    bool degenerate = false;   // denominator <= 0; ratio left unset
};

LmpRatio lmp_ratio(const ClusterSolution& sol, const DualSolution& dual, const Instance& inst);

enum class BoundClass { S0, S1, SMany };

struct ClientAudit {
    int client = 0;
    BoundClass bound_class = BoundClass::S0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

struct AuditReport {
    bool all_ok = true;
    std::vector<ClientAudit> rows;          // per client: the main ratio inequality
    std::vector<std::string> violations;    // failed side conditions, human-readable
};

/// The per-client case split behind the LMP ratio: with s = |N(j) ∩ opened|,
///   s = 0:  c(j,opened) <= rho * alpha_j
///   s = 1:  c(j,opened) <= rho * (alpha_j - beta)
///   s > 1:  pairwise-separation lower bound on sum_i c(j,i), then the ratio
/// plus the delta=infinity degeneration s <= 1 and the k-median cap s <= 3.
AuditReport audit_lmp(const Instance& inst, const DualSolution& dual,
                      const ClusterSolution& sol, const DeltaPreset& preset,
                      double slack_factor = 1.0, double tol = 1e-9);

struct Certificate {
    double lambda = 0.0;
    double dual_value = 0.0;   // sum(alpha)
    double lower_bound = 0.0;  // dual_value - lambda*k
    double lmp_ratio = 0.0;
    bool feasible = false;
    bool degenerate = false;          // LMP denominator <= 0
    bool plus_one_unabsorbed = false; // instance was not normalized into [1, n^6]
    std::vector<ClientAudit> per_client_audit;
};

/// Builds and checks a certificate from scratch (never trusting solver
/// caches): feasibility, lower bound, ratio, per-client audit.
Certificate make_certificate(const Instance& inst, const DualSolution& dual,
                             const ClusterSolution& sol, const DeltaPreset& preset,
                             bool normalized = false);

/// Accounting for a solution drawn from two consecutive duals of the level
/// sequence: hybrid alpha = per-client min, the opened facilities each client
/// pays (S_j), and the per-facility payments under the hybrid alpha.
struct HybridAccount {
    double lambda = 0.0;                // lower level's opening price
    std::vector<double> alpha;          // per client, min of the two levels
    std::vector<FacilityNode> opened;   // the winning independent set, tagged by level
    std::vector<std::vector<int>> S;    // per client: indices into `opened` with beta > eta
    std::vector<double> payment;        // per opened node: sum_j beta under hybrid alpha
    double measured_closeness = 0.0;    // max_j |alpha_hi_j - alpha_lo_j|
};

HybridAccount build_hybrid_account(const DualSolution& lo, const DualSolution& hi,
                                   const std::vector<FacilityNode>& opened,
                                   const Instance& inst);

/// Verifies the hybrid-solution inequalities at the measured closeness:
/// the S_j > 0 ratio bounds, the S_j = 0 goodness-based bound scaled by
/// (1 + 5*eps), and per-facility payment >= lambda - n*closeness.
AuditReport audit_hybrid(const HybridAccount& account, const ClusterSolution& sol,
                         bool good_check, double eps, const Instance& inst,
                         const DeltaPreset& preset, double tol = 1e-9);

}  // namespace pdclust
