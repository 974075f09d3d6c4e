#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdclust/errors.hpp"

namespace pdclust {

enum class Objective {
    EuclideanKMeans,      // c(j,i) = squared Euclidean distance
    EuclideanKMedian,     // c(j,i) = Euclidean distance
    GeneralMetricKMeans,  // c(j,i) = d(j,i)^2 for an arbitrary metric d
};

enum class FacilityMode { ExemplarFequalsD, ExplicitF };

/// A discrete clustering instance: n clients, m candidate facilities, a dense
/// client-facility cost matrix, and the facility-facility costs needed by the
/// conflict-graph distance test. Immutable after construction.
struct Instance {
    Objective objective = Objective::EuclideanKMeans;
    int n = 0;  // clients
    int m = 0;  // facilities
    int k = 1;
    int dim = 0;                          // 0 for abstract-cost instances
    std::vector<double> client_coords;    // n * dim, row-major
    std::vector<double> facility_coords;  // m * dim
    std::vector<double> cost_cf;          // n * m, c(j,i)
    std::vector<double> cost_ff;          // m * m, c(i,i')

    double cost(int j, int i) const { return cost_cf[static_cast<size_t>(j) * m + i]; }
    double fcost(int a, int b) const { return cost_ff[static_cast<size_t>(a) * m + b]; }
    bool has_coords() const { return dim > 0; }
    bool squared_costs() const { return objective != Objective::EuclideanKMedian; }

    double max_cost() const;
    double min_cost(int j) const;  // min_i c(j,i)
    double cost_of_opened(int j, const std::vector<int>& opened) const;
};

/// Points are rows of coordinates. Exemplar mode sets F = D.
Instance build_instance(const std::vector<std::vector<double>>& points,
                        FacilityMode mode, Objective objective, int k);

/// Explicit facility list.
Instance build_instance(const std::vector<std::vector<double>>& clients,
                        const std::vector<std::vector<double>>& facilities,
                        Objective objective, int k);

/// Abstract-cost instance (no coordinates): explicit cost matrices.
Instance build_abstract_instance(const std::vector<std::vector<double>>& cost_cf,
                                 const std::vector<std::vector<double>>& cost_ff,
                                 Objective objective, int k);

/// Checks the structural invariants: non-negative costs, coordinate-cost
/// agreement (1e-12 relative) for Euclidean objectives, and for general-metric
/// instances the triangle inequality on sqrt-costs over all triples that touch
/// at least one facility (client-client distances are not stored).
void validate_instance(const Instance& inst);

struct NormalizationRecord {
    enum class Mode { GeneralMetric, EuclideanEmbedding };
    Mode mode = Mode::GeneralMetric;
    double scale = 1.0;       // multiplier applied to raw distances
    double clamp_high = 0.0;  // n^2, applied to distances
    double floor_low = 1.0;
    bool trivial = false;     // all points coincide (M = 0); instance returned unchanged
    double opt_estimate = 0.0;              // the M fed into the scale
    std::vector<int> cluster_of_client;     // Euclidean mode: cluster index per client
    std::vector<int> cluster_of_facility;   // -1 for dropped facilities
    std::vector<int> kept_facilities;       // old facility ids surviving the embedding
    std::vector<std::string> violations;    // post-hoc band violations, if any

    /// Multiplier that takes normalized connection costs back to raw ones.
    double cost_scale(const Instance& inst) const;
};

/// Appendix-style rescaling so every client-facility squared distance lands in
/// [1, n^6]. General-metric instances get scale/clamp/floor on the stored
/// matrices; Euclidean instances get the cluster-translate-embed treatment and
/// keep valid coordinates. The band is re-scanned after the fact and any
/// violation is recorded instead of guessed away.
std::pair<Instance, NormalizationRecord> normalize_distances(const Instance& inst);

}  // namespace pdclust
