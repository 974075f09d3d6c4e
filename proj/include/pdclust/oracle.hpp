#pragma once

#include <vector>

#include "pdclust/instance.hpp"
#include "pdclust/jv.hpp"
#include "pdclust/sequence.hpp"

namespace pdclust::oracle {

struct OracleResult {
    double opt_cost = 0.0;
    std::vector<int> opt_set;
    long long enumerated = 0;
};

/// Exact optimum by enumerating every k-subset of facilities.
/// Refuses combinatorial budgets above C(m,k) = 1e6.
OracleResult brute_force_opt(const Instance& inst, int k);

/// Naive time-stepped re-implementation of the dual-growth phase, for
/// cross-validation. Alpha agreement with the event-driven version: 10*step.
DualSolution reference_dual_growth(const Instance& inst, double lambda, double step);

/// Time-stepped threshold sweep mirroring quasi_sweep's rules synchronously
/// each step. Agreement: 1e3*step.
std::vector<double> reference_quasi_sweep(const std::vector<double>& alpha_in, double lambda,
                                          const SweepConfig& cfg, const Instance& inst,
                                          double step);

/// Upper bound on the optimum: best single facility, then farthest-point
/// extension (each new center is the nearest facility to the worst-served
/// client), one assignment pass. Feeds the normalization scale.
double greedy_opt_estimate(const Instance& inst, int k);

}  // namespace pdclust::oracle
