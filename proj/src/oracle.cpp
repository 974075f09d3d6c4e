#include "pdclust/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdclust::oracle {

namespace {

long long choose_capped(int m, int k, long long cap) {
    long long c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * (m - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

}  // namespace

OracleResult brute_force_opt(const Instance& inst, int k) {
    k = std::min(k, inst.m);
    if (choose_capped(inst.m, k, 1'000'000) > 1'000'000)
        throw SolverError(Errc::TooLarge, "subset enumeration budget exceeded");
    OracleResult res;
    res.opt_cost = infinity();
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    auto eval = [&](const std::vector<int>& s) {
        ++res.enumerated;
        double c = 0;
        for (int j = 0; j < inst.n; ++j) c += inst.cost_of_opened(j, s);
        if (c < res.opt_cost) {
            res.opt_cost = c;
            res.opt_set = s;
        }
    };
    eval(comb);
    while (true) {
        int i = k - 1;
        while (i >= 0 && comb[i] == inst.m - k + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
        eval(comb);
    }
    return res;
}

DualSolution reference_dual_growth(const Instance& inst, double lambda, double step) {
    if (step <= 0) throw SolverError(Errc::BadInput, "step must be positive");
    const int n = inst.n, m = inst.m;
    std::vector<double> alpha(n, 0.0);
    std::vector<char> active(n, 1);
    std::vector<char> tight(m, 0);
    std::vector<int> witness(n, -1);
    int active_count = n;

    auto contribution = [&](int i) {
        double c = 0;
        for (int j = 0; j < n; ++j) {
            double b = alpha[j] - inst.cost(j, i);
            if (b > 0) c += b;
        }
        return c;
    };
    auto sweep_events = [&](double step_len) {
        std::vector<char> was_tight = tight;
        for (int i = 0; i < m; ++i) {
            if (tight[i] || contribution(i) < lambda) continue;
            tight[i] = 1;
            for (int j = 0; j < n; ++j)
                if (active[j] && alpha[j] >= inst.cost(j, i)) {
                    active[j] = 0;
                    witness[j] = i;
                    --active_count;
                }
        }
        for (int j = 0; j < n; ++j) {
            if (!active[j]) continue;
            // Against facilities tight before this step the crossing moment is
            // known exactly; snap the value back to it.
            double best_c = -1;
            int best_i = -1;
            for (int i = 0; i < m; ++i)
                if (was_tight[i] && alpha[j] >= inst.cost(j, i) &&
                    (best_i < 0 || inst.cost(j, i) < best_c)) {
                    best_c = inst.cost(j, i);
                    best_i = i;
                }
            if (best_i >= 0) {
                alpha[j] = std::max(best_c, alpha[j] - step_len);
                active[j] = 0;
                witness[j] = best_i;
                --active_count;
                continue;
            }
            for (int i = 0; i < m; ++i)
                if (tight[i] && alpha[j] >= inst.cost(j, i)) {
                    active[j] = 0;
                    witness[j] = i;
                    --active_count;
                    break;
                }
        }
    };

    sweep_events(0.0);
    double horizon = lambda + inst.max_cost() + 10 * step + 1;
    for (double now = step; active_count > 0 && now < horizon; now += step) {
        for (int j = 0; j < n; ++j)
            if (active[j]) alpha[j] += step;
        sweep_events(step);
    }
    if (active_count > 0) throw SolverError(Errc::InternalError, "reference growth ran past horizon");

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

std::vector<double> reference_quasi_sweep(const std::vector<double>& alpha_in, double lambda,
                                          const SweepConfig& cfg, const Instance& inst,
                                          double step) {
    if (step <= 0) throw SolverError(Errc::BadInput, "step must be positive");
    const int n = inst.n, m = inst.m;
    const double eps_z = cfg.effective_eps_z(inst);
    const double z = lambda + eps_z;
    std::vector<double> alpha = alpha_in;
    std::vector<char> joined(n, 0), removed(n, 0), at_border(n, 0);
    std::vector<char> tight(m, 0);
    std::vector<int> t_bucket(m, 0);
    int removed_count = 0;

    auto border_above = [&](double v) { return std::pow(1.0 + cfg.eps, bucket(v, cfg.eps)); };
    auto contribution = [&](int i) {
        double c = 0;
        for (int j = 0; j < n; ++j) {
            double b = alpha[j] - inst.cost(j, i);
            if (b > 0) c += b;
        }
        return c;
    };
    auto dyn_bucket = [&](int j) { return bucket(alpha[j], cfg.eps) - (at_border[j] ? 1 : 0); };

    double theta = 0.0;
    double limit = std::max(1.0, inst.max_cost()) + lambda + eps_z + 1;
    while (removed_count < n && theta < limit) {
        int acount = 0;
        for (int j = 0; j < n; ++j)
            if (joined[j] && !removed[j]) ++acount;
        auto decreasing = [&](int j) {
            return acount > 0 && !joined[j] && !at_border[j] &&
                   bucket(alpha[j], cfg.eps) > bucket(theta, cfg.eps);
        };

        // Synchronous rate application, then the same event order as the
        // event-driven engine: facilities, removals, joins.
        double border = border_above(theta);
        for (int j = 0; j < n; ++j) {
            if (joined[j] && !removed[j]) {
                alpha[j] += step;
            } else if (decreasing(j)) {
                double next = alpha[j] - acount * step;
                if (next <= border) {
                    alpha[j] = border;
                    at_border[j] = 1;
                } else {
                    alpha[j] = next;
                }
            }
        }
        theta += step;
        int btheta = bucket(theta, cfg.eps);
        for (int j = 0; j < n; ++j)
            if (at_border[j] && bucket(alpha[j], cfg.eps) <= btheta) at_border[j] = 0;

        for (int i = 0; i < m; ++i) {
            if (tight[i]) continue;
            bool blocked = false;
            for (int j = 0; j < n; ++j)
                if (alpha[j] > inst.cost(j, i) && decreasing(j)) blocked = true;
            if (blocked) continue;
            if (contribution(i) >= z) {
                tight[i] = 1;
                int tb = 0;
                for (int j = 0; j < n; ++j)
                    if (alpha[j] - inst.cost(j, i) > kEta) tb = std::max(tb, dyn_bucket(j));
                t_bucket[i] = tb;
            }
        }
        for (int j = 0; j < n; ++j) {
            if (!joined[j] || removed[j]) continue;
            for (int i = 0; i < m; ++i)
                if (tight[i] && alpha[j] >= inst.cost(j, i) &&
                    t_bucket[i] <= bucket(alpha[j], cfg.eps)) {
                    removed[j] = 1;
                    ++removed_count;
                    break;
                }
        }
        for (int j = 0; j < n; ++j) {
            if (joined[j] || decreasing(j) || alpha[j] > theta) continue;
            joined[j] = 1;
            at_border[j] = 0;
            for (int i = 0; i < m; ++i)
                if (tight[i] && alpha[j] >= inst.cost(j, i) &&
                    t_bucket[i] <= bucket(alpha[j], cfg.eps)) {
                    removed[j] = 1;
                    ++removed_count;
                    break;
                }
        }
    }
    if (removed_count < n)
        throw SolverError(Errc::InternalError, "reference sweep ran past horizon");
    return alpha;
}

double greedy_opt_estimate(const Instance& inst, int k) {
    k = std::min(k, inst.m);
    // Best single facility, then repeatedly cover the worst-served client with
    // its nearest unchosen facility.
    int best = 0;
    double best_sum = infinity();
    for (int i = 0; i < inst.m; ++i) {
        double s = 0;
        for (int j = 0; j < inst.n; ++j) s += inst.cost(j, i);
        if (s < best_sum) {
            best_sum = s;
            best = i;
        }
    }
    std::vector<int> chosen{best};
    std::vector<char> used(inst.m, 0);
    used[best] = 1;
    while (static_cast<int>(chosen.size()) < k) {
        int worst_client = 0;
        double worst = -1;
        for (int j = 0; j < inst.n; ++j) {
            double c = inst.cost_of_opened(j, chosen);
            if (c > worst) {
                worst = c;
                worst_client = j;
            }
        }
        int pick = -1;
        double pick_cost = infinity();
        for (int i = 0; i < inst.m; ++i)
            if (!used[i] && inst.cost(worst_client, i) < pick_cost) {
                pick_cost = inst.cost(worst_client, i);
                pick = i;
            }
        if (pick < 0) break;
        used[pick] = 1;
        chosen.push_back(pick);
    }
    double total = 0;
    for (int j = 0; j < inst.n; ++j) total += inst.cost_of_opened(j, chosen);
    return total;
}

}  // namespace pdclust::oracle
