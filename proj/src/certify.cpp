#include "pdclust/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdclust {

FeasibilityReport verify_dual_feasibility(const DualSolution& dual, const Instance& inst) {
    FeasibilityReport rep;
    rep.min_slack = infinity();
    for (int i = 0; i < inst.m; ++i) {
        double paid = 0;
        for (int j = 0; j < inst.n; ++j) {
            double b = dual.alpha[j] - inst.cost(j, i);
            if (b > 0) paid += b;
        }
        double slack = dual.lambda - paid;
        rep.slacks.push_back({i, slack});
        rep.min_slack = std::min(rep.min_slack, slack);
    }
    rep.feasible = rep.min_slack >= -kEta;
    return rep;
}

double lp_lower_bound(const DualSolution& dual, int k, const Instance& inst) {
    if (!verify_dual_feasibility(dual, inst).feasible)
        throw SolverError(Errc::RefusesToCertify, "dual is infeasible");
    double sum = 0;
    for (double a : dual.alpha) sum += a;
    return sum - dual.lambda * k;
}

LmpRatio lmp_ratio(const ClusterSolution& sol, const DualSolution& dual, const Instance& inst) {
    LmpRatio r;
    for (int j = 0; j < inst.n; ++j) r.numerator += inst.cost_of_opened(j, sol.opened);
    double sum = 0;
    for (double a : dual.alpha) sum += a;
    r.denominator = sum - dual.lambda * static_cast<double>(sol.opened.size());
    if (r.denominator <= 0) {
        r.degenerate = true;
    } else {
        r.ratio = r.numerator / r.denominator;
    }
    return r;
}

namespace {

struct ClientCase {
    int s = 0;
    double contrib = 0;      // sum of beta over opened facilities the client pays
    double sum_paid_cost = 0;  // sum of c(j,i) over those facilities
    double cost_to_opened = 0;
};

// Audits one client against the case split shared by the single-price ratio
// bounds and the hybrid-solution bounds. `alpha` is the client's dual value,
// `slack_factor` multiplies the s=0 ceiling (1 for exact runs).
void audit_client(const Instance& inst, const DeltaPreset& preset, int j, double alpha,
                  const ClientCase& cc, double s0_alpha, double slack_factor, double tol,
                  AuditReport& rep) {
    ClientAudit row;
    row.client = j;
    double rhs;
    if (cc.s == 0) {
        row.bound_class = BoundClass::S0;
        rhs = slack_factor * preset.rho * s0_alpha;
    } else {
        row.bound_class = cc.s == 1 ? BoundClass::S1 : BoundClass::SMany;
        rhs = preset.rho * (alpha - cc.contrib);
    }
    row.lhs = cc.cost_to_opened;
    row.rhs = rhs;
    row.ok = row.lhs <= row.rhs + tol;
    if (!row.ok) {
        std::ostringstream os;
        os << "client " << j << " ratio bound failed: " << row.lhs << " > " << row.rhs;
        rep.violations.push_back(os.str());
        rep.all_ok = false;
    }
    rep.rows.push_back(row);

    if (cc.s > 1 && preset.delta == infinity()) {
        // Facilities sharing a paying client form a clique here.
        rep.all_ok = false;
        rep.violations.push_back("client " + std::to_string(j) +
                                 " pays several opened facilities under delta=infinity");
    } else if (cc.s > 1) {
        // Pairwise separation of the facilities the client pays for.
        double need;
        if (inst.objective == Objective::EuclideanKMedian) {
            if (cc.s > 3) {
                rep.all_ok = false;
                rep.violations.push_back("client " + std::to_string(j) + " pays " +
                                         std::to_string(cc.s) + " facilities (cap is 3)");
            }
            need = (cc.s == 2 ? preset.delta : 1.5 * preset.delta) * alpha;
        } else {
            need = preset.delta * (cc.s - 1) / 2.0 * alpha;
        }
        if (cc.sum_paid_cost < need - tol) {
            std::ostringstream os;
            os << "client " << j << " separation bound failed: " << cc.sum_paid_cost << " < "
               << need;
            rep.violations.push_back(os.str());
            rep.all_ok = false;
        }
    }
}

}  // namespace

AuditReport audit_lmp(const Instance& inst, const DualSolution& dual, const ClusterSolution& sol,
                      const DeltaPreset& preset, double slack_factor, double tol) {
    AuditReport rep;
    for (int j = 0; j < inst.n; ++j) {
        ClientCase cc;
        cc.cost_to_opened = inst.cost_of_opened(j, sol.opened);
        for (int i : sol.opened) {
            double b = dual.alpha[j] - inst.cost(j, i);
            if (b > kEta) {
                ++cc.s;
                cc.contrib += b;
                cc.sum_paid_cost += inst.cost(j, i);
            }
        }
        audit_client(inst, preset, j, dual.alpha[j], cc, dual.alpha[j], slack_factor, tol, rep);
    }
    return rep;
}

Certificate make_certificate(const Instance& inst, const DualSolution& dual,
                             const ClusterSolution& sol, const DeltaPreset& preset,
                             bool normalized) {
    Certificate cert;
    cert.lambda = dual.lambda;
    for (double a : dual.alpha) cert.dual_value += a;
    cert.lower_bound = cert.dual_value - dual.lambda * inst.k;
    cert.feasible = verify_dual_feasibility(dual, inst).feasible;
    LmpRatio r = lmp_ratio(sol, dual, inst);
    cert.degenerate = r.degenerate;
    cert.lmp_ratio = r.degenerate ? 0.0 : r.ratio;
    AuditReport audit = audit_lmp(inst, dual, sol, preset);
    cert.per_client_audit = std::move(audit.rows);
    cert.plus_one_unabsorbed = !normalized;
    return cert;
}

HybridAccount build_hybrid_account(const DualSolution& lo, const DualSolution& hi,
                                   const std::vector<FacilityNode>& opened,
                                   const Instance& inst) {
    HybridAccount account;
    account.lambda = lo.lambda;
    account.opened = opened;
    account.alpha.resize(inst.n);
    for (int j = 0; j < inst.n; ++j) {
        account.alpha[j] = std::min(lo.alpha[j], hi.alpha[j]);
        account.measured_closeness =
            std::max(account.measured_closeness, std::abs(hi.alpha[j] - lo.alpha[j]));
    }
    account.S.assign(inst.n, {});
    account.payment.assign(opened.size(), 0.0);
    for (int j = 0; j < inst.n; ++j)
        for (size_t u = 0; u < opened.size(); ++u) {
            double b = account.alpha[j] - inst.cost(j, opened[u].id);
            if (b > kEta) {
                account.S[j].push_back(static_cast<int>(u));
                account.payment[u] += b;
            }
        }
    return account;
}

AuditReport audit_hybrid(const HybridAccount& account, const ClusterSolution& sol,
                         bool good_check, double eps, const Instance& inst,
                         const DeltaPreset& preset, double tol) {
    AuditReport rep;
    for (int j = 0; j < inst.n; ++j) {
        ClientCase cc;
        cc.s = static_cast<int>(account.S[j].size());
        cc.cost_to_opened = inst.cost_of_opened(j, sol.opened);
        for (int u : account.S[j]) {
            cc.contrib += account.alpha[j] - inst.cost(j, account.opened[u].id);
            cc.sum_paid_cost += inst.cost(j, account.opened[u].id);
        }
        if (cc.s == 0 && !good_check) {
            ClientAudit row;
            row.client = j;
            row.bound_class = BoundClass::S0;
            row.lhs = cc.cost_to_opened;
            row.rhs = infinity();
            rep.rows.push_back(row);
            continue;
        }
        // The s=0 ceiling leans on the newer level's goodness; closeness says
        // that level's value is at most alpha + measured closeness.
        double s0_alpha = account.alpha[j] + account.measured_closeness;
        audit_client(inst, preset, j, account.alpha[j], cc, s0_alpha, 1.0 + 5.0 * eps, tol, rep);

        // A paying client's value never exceeds the opening time of the
        // facilities it pays.
        for (int u : account.S[j]) {
            if (account.alpha[j] > account.opened[u].t + kEta) {
                std::ostringstream os;
                os << "client " << j << " exceeds opening time of facility "
                   << account.opened[u].id << " (level " << account.opened[u].level << ")";
                rep.violations.push_back(os.str());
                rep.all_ok = false;
            }
        }
    }
    // Every opened facility is almost fully paid under the hybrid values.
    double floor = account.lambda - inst.n * account.measured_closeness;
    for (size_t u = 0; u < account.opened.size(); ++u) {
        if (account.payment[u] < floor - tol) {
            std::ostringstream os;
            os << "facility " << account.opened[u].id << " (level " << account.opened[u].level
               << ") paid " << account.payment[u] << " < " << floor;
            rep.violations.push_back(os.str());
            rep.all_ok = false;
        }
    }
    return rep;
}

}  // namespace pdclust
