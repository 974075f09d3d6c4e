#include "pdclust/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pdclust/oracle.hpp"

namespace pdclust {

namespace {

double sq_euclid(const double* a, const double* b, int dim) {
    double s = 0;
    for (int d = 0; d < dim; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

double pair_cost(const double* a, const double* b, int dim, Objective objective) {
    double d2 = sq_euclid(a, b, dim);
    return objective == Objective::EuclideanKMedian ? std::sqrt(d2) : d2;
}

void check_points(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw SolverError(Errc::BadInput, "no points");
    size_t dim = points.front().size();
    if (dim == 0) throw SolverError(Errc::BadInput, "zero-dimensional point");
    for (const auto& p : points) {
        if (p.size() != dim) throw SolverError(Errc::BadInput, "ragged coordinate rows");
        for (double v : p)
            if (!std::isfinite(v)) throw SolverError(Errc::BadInput, "non-finite coordinate");
    }
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> out;
    if (rows.empty()) return out;
    out.reserve(rows.size() * rows.front().size());
    for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

void fill_costs(Instance& inst) {
    inst.cost_cf.assign(static_cast<size_t>(inst.n) * inst.m, 0.0);
    inst.cost_ff.assign(static_cast<size_t>(inst.m) * inst.m, 0.0);
    for (int j = 0; j < inst.n; ++j)
        for (int i = 0; i < inst.m; ++i)
            inst.cost_cf[static_cast<size_t>(j) * inst.m + i] =
                pair_cost(&inst.client_coords[static_cast<size_t>(j) * inst.dim],
                          &inst.facility_coords[static_cast<size_t>(i) * inst.dim], inst.dim,
                          inst.objective);
    for (int a = 0; a < inst.m; ++a)
        for (int b = 0; b < inst.m; ++b)
            inst.cost_ff[static_cast<size_t>(a) * inst.m + b] =
                pair_cost(&inst.facility_coords[static_cast<size_t>(a) * inst.dim],
                          &inst.facility_coords[static_cast<size_t>(b) * inst.dim], inst.dim,
                          inst.objective);
}

}  // namespace

double Instance::max_cost() const {
    double mx = 0;
    for (double c : cost_cf) mx = std::max(mx, c);
    return mx;
}

double Instance::min_cost(int j) const {
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) mn = std::min(mn, cost(j, i));
    return mn;
}

double Instance::cost_of_opened(int j, const std::vector<int>& opened) const {
    double mn = std::numeric_limits<double>::infinity();
    for (int i : opened) mn = std::min(mn, cost(j, i));
    return mn;
}

Instance build_instance(const std::vector<std::vector<double>>& points,
                        FacilityMode mode, Objective objective, int k) {
    if (mode == FacilityMode::ExplicitF)
        throw SolverError(Errc::BadInput, "explicit facility mode needs a facility list");
    return build_instance(points, points, objective, k);
}

Instance build_instance(const std::vector<std::vector<double>>& clients,
                        const std::vector<std::vector<double>>& facilities,
                        Objective objective, int k) {
    check_points(clients);
    check_points(facilities);
    if (clients.front().size() != facilities.front().size())
        throw SolverError(Errc::BadInput, "client/facility dimension mismatch");
    Instance inst;
    inst.objective = objective;
    inst.n = static_cast<int>(clients.size());
    inst.m = static_cast<int>(facilities.size());
    inst.dim = static_cast<int>(clients.front().size());
    inst.k = k;
    if (k < 1 || k > inst.m) throw SolverError(Errc::InvalidK, "k must be in [1, m]");
    inst.client_coords = flatten(clients);
    inst.facility_coords = flatten(facilities);
    fill_costs(inst);
    return inst;
}

Instance build_abstract_instance(const std::vector<std::vector<double>>& cost_cf,
                                 const std::vector<std::vector<double>>& cost_ff,
                                 Objective objective, int k) {
    if (cost_cf.empty() || cost_cf.front().empty())
        throw SolverError(Errc::BadInput, "empty cost matrix");
    Instance inst;
    inst.objective = objective;
    inst.n = static_cast<int>(cost_cf.size());
    inst.m = static_cast<int>(cost_cf.front().size());
    inst.k = k;
    if (k < 1 || k > inst.m) throw SolverError(Errc::InvalidK, "k must be in [1, m]");
    if (static_cast<int>(cost_ff.size()) != inst.m)
        throw SolverError(Errc::BadInput, "facility cost matrix must be m x m");
    for (const auto& row : cost_cf)
        if (static_cast<int>(row.size()) != inst.m)
            throw SolverError(Errc::BadInput, "ragged cost matrix");
    for (const auto& row : cost_ff)
        if (static_cast<int>(row.size()) != inst.m)
            throw SolverError(Errc::BadInput, "ragged facility cost matrix");
    inst.cost_cf = flatten(cost_cf);
    inst.cost_ff = flatten(cost_ff);
    for (double c : inst.cost_cf)
        if (!(c >= 0) || !std::isfinite(c)) throw SolverError(Errc::BadInput, "negative or non-finite cost");
    for (double c : inst.cost_ff)
        if (!(c >= 0) || !std::isfinite(c)) throw SolverError(Errc::BadInput, "negative or non-finite cost");
    return inst;
}

void validate_instance(const Instance& inst) {
    if (inst.n < 1 || inst.m < 1 || inst.k < 1 || inst.k > inst.m)
        throw SolverError(Errc::BadInput, "bad sizes");
    for (double c : inst.cost_cf)
        if (!(c >= 0)) throw SolverError(Errc::BadInput, "negative cost");
    if (inst.has_coords() && inst.objective != Objective::GeneralMetricKMeans) {
        for (int j = 0; j < inst.n; ++j)
            for (int i = 0; i < inst.m; ++i) {
                double expect = pair_cost(&inst.client_coords[static_cast<size_t>(j) * inst.dim],
                                          &inst.facility_coords[static_cast<size_t>(i) * inst.dim],
                                          inst.dim, inst.objective);
                double got = inst.cost(j, i);
                if (std::abs(got - expect) > 1e-12 * std::max(1.0, std::abs(expect)))
                    throw SolverError(Errc::BadInput, "cost/coordinate mismatch");
            }
    }
    if (inst.objective == Objective::GeneralMetricKMeans) {
        // Triangle inequality on sqrt-costs for every triple touching a
        // facility; client-client distances are not part of the instance.
        auto dcf = [&](int j, int i) { return std::sqrt(inst.cost(j, i)); };
        auto dff = [&](int a, int b) { return std::sqrt(inst.fcost(a, b)); };
        const double tol = 1e-9;
        for (int j = 0; j < inst.n; ++j)
            for (int a = 0; a < inst.m; ++a)
                for (int b = 0; b < inst.m; ++b) {
                    if (dcf(j, a) > dcf(j, b) + dff(b, a) + tol)
                        throw SolverError(Errc::BadInput, "triangle inequality violated (c-f-f)");
                    if (dff(a, b) > dcf(j, a) + dcf(j, b) + tol)
                        throw SolverError(Errc::BadInput, "triangle inequality violated (f-c-f)");
                }
    }
}

double NormalizationRecord::cost_scale(const Instance& inst) const {
    return inst.squared_costs() ? scale * scale : scale;
}

namespace {

// Scale + clamp + floor on a distance, returning it in the instance's cost
// units.
double transform_distance(double d, double scale, double clamp, Objective objective) {
    double nd = std::max(std::min(d * scale, clamp), 1.0);
    return objective == Objective::EuclideanKMedian ? nd : nd * nd;
}

std::pair<Instance, NormalizationRecord> normalize_general(const Instance& inst, double M) {
    const double n = inst.n;
    NormalizationRecord rec;
    rec.mode = NormalizationRecord::Mode::GeneralMetric;
    rec.opt_estimate = M;
    rec.clamp_high = n * n;
    // Place the estimated optimum near n^3 in cost units.
    rec.scale = inst.squared_costs() ? std::sqrt(n * n * n / M) : (n * n * n / M);

    Instance out = inst;
    out.dim = 0;
    out.client_coords.clear();
    out.facility_coords.clear();
    auto dist = [&](double c) { return inst.squared_costs() ? std::sqrt(c) : c; };
    for (size_t idx = 0; idx < out.cost_cf.size(); ++idx)
        out.cost_cf[idx] = transform_distance(dist(inst.cost_cf[idx]), rec.scale, rec.clamp_high,
                                              inst.objective);
    for (size_t idx = 0; idx < out.cost_ff.size(); ++idx)
        out.cost_ff[idx] = transform_distance(dist(inst.cost_ff[idx]), rec.scale, rec.clamp_high,
                                              inst.objective);
    return {std::move(out), std::move(rec)};
}

std::pair<Instance, NormalizationRecord> normalize_euclidean(const Instance& inst, double M) {
    const double n = inst.n;
    const double n2 = n * n;
    NormalizationRecord rec;
    rec.mode = NormalizationRecord::Mode::EuclideanEmbedding;
    rec.opt_estimate = M;
    rec.clamp_high = n2;
    rec.scale = inst.squared_costs() ? std::sqrt(n * n * n / M) : (n * n * n / M);

    const int dim = inst.dim;
    std::vector<std::vector<double>> cpts(inst.n), fpts(inst.m);
    for (int j = 0; j < inst.n; ++j) {
        cpts[j].assign(inst.client_coords.begin() + static_cast<size_t>(j) * dim,
                       inst.client_coords.begin() + static_cast<size_t>(j + 1) * dim);
        for (double& v : cpts[j]) v *= rec.scale;
    }
    for (int i = 0; i < inst.m; ++i) {
        fpts[i].assign(inst.facility_coords.begin() + static_cast<size_t>(i) * dim,
                       inst.facility_coords.begin() + static_cast<size_t>(i + 1) * dim);
        for (double& v : fpts[i]) v *= rec.scale;
    }
    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        return std::sqrt(sq_euclid(a.data(), b.data(), dim));
    };

    // Greedy far-apart clustering of the clients: a new client joins the
    // cluster while it sits within n^2/4 of some member.
    rec.cluster_of_client.assign(inst.n, -1);
    int clusters = 0;
    for (int j = 0; j < inst.n; ++j) {
        if (rec.cluster_of_client[j] >= 0) continue;
        int c = clusters++;
        rec.cluster_of_client[j] = c;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int j2 = 0; j2 < inst.n; ++j2) {
                if (rec.cluster_of_client[j2] >= 0) continue;
                for (int j3 = 0; j3 < inst.n; ++j3) {
                    if (rec.cluster_of_client[j3] != c) continue;
                    if (dist(cpts[j2], cpts[j3]) < n2 / 4.0) {
                        rec.cluster_of_client[j2] = c;
                        grew = true;
                        break;
                    }
                }
            }
        }
    }
    // Attach each facility to a cluster if a member client is within n^2/8;
    // unattached facilities are dropped (no near-optimal solution uses them).
    rec.cluster_of_facility.assign(inst.m, -1);
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.n && rec.cluster_of_facility[i] < 0; ++j)
            if (dist(fpts[i], cpts[j]) < n2 / 8.0)
                rec.cluster_of_facility[i] = rec.cluster_of_client[j];
    for (int i = 0; i < inst.m; ++i)
        if (rec.cluster_of_facility[i] >= 0) rec.kept_facilities.push_back(i);
    if (rec.kept_facilities.empty())
        throw SolverError(Errc::InternalError, "normalization dropped every facility");

    // Translate each cluster's centroid to the origin.
    std::vector<std::vector<double>> centroid(clusters, std::vector<double>(dim, 0.0));
    std::vector<int> count(clusters, 0);
    for (int j = 0; j < inst.n; ++j) {
        int c = rec.cluster_of_client[j];
        for (int d = 0; d < dim; ++d) centroid[c][d] += cpts[j][d];
        count[c]++;
    }
    for (int i : rec.kept_facilities) {
        int c = rec.cluster_of_facility[i];
        for (int d = 0; d < dim; ++d) centroid[c][d] += fpts[i][d];
        count[c]++;
    }
    for (int c = 0; c < clusters; ++c)
        for (int d = 0; d < dim; ++d) centroid[c][d] /= std::max(1, count[c]);

    // New coordinates: translated originals, one n^2 marker per cluster, and a
    // final 0/1 coordinate separating facilities from clients.
    const int new_dim = dim + clusters + 1;
    auto embed = [&](const std::vector<double>& p, int c, bool facility) {
        std::vector<double> q(new_dim, 0.0);
        for (int d = 0; d < dim; ++d) q[d] = p[d] - centroid[c][d];
        q[dim + c] = n2;
        q[new_dim - 1] = facility ? 1.0 : 0.0;
        return q;
    };
    std::vector<std::vector<double>> new_clients(inst.n), new_facilities;
    for (int j = 0; j < inst.n; ++j)
        new_clients[j] = embed(cpts[j], rec.cluster_of_client[j], false);
    for (int i : rec.kept_facilities)
        new_facilities.push_back(embed(fpts[i], rec.cluster_of_facility[i], true));

    int new_k = std::min(inst.k, static_cast<int>(new_facilities.size()));
    Instance out = build_instance(new_clients, new_facilities, inst.objective, new_k);
    return {std::move(out), std::move(rec)};
}

}  // namespace

std::pair<Instance, NormalizationRecord> normalize_distances(const Instance& inst) {
    double M = oracle::greedy_opt_estimate(inst, inst.k);
    if (M <= 0) {
        NormalizationRecord rec;
        rec.trivial = true;
        rec.opt_estimate = 0;
        return {inst, rec};
    }
    auto result = (inst.has_coords() && inst.objective != Objective::GeneralMetricKMeans)
                      ? normalize_euclidean(inst, M)
                      : normalize_general(inst, M);
    // Post-hoc band scan: every client-facility squared distance in [1, n^6].
    const Instance& out = result.first;
    NormalizationRecord& rec = result.second;
    const double n = inst.n;
    const double hi = n * n * n * n * n * n;
    for (int j = 0; j < out.n; ++j)
        for (int i = 0; i < out.m; ++i) {
            double c = out.cost(j, i);
            double d2 = out.squared_costs() ? c : c * c;
            if (d2 < 1.0 - 1e-9 || d2 > hi * (1 + 1e-9))
                rec.violations.push_back("d^2(" + std::to_string(j) + "," + std::to_string(i) +
                                         ") = " + std::to_string(d2) + " outside [1, n^6]");
        }
    return result;
}

}  // namespace pdclust
