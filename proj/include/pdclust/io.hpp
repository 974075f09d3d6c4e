#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdclust/certify.hpp"
#include "pdclust/instance.hpp"
#include "pdclust/jv.hpp"

namespace pdclust::io {

struct PointsFile {
    bool abstract = false;
    std::vector<std::vector<double>> points;   // coordinate rows (plain mode)
    std::vector<std::vector<double>> cost_cf;  // abstract mode
    std::vector<std::vector<double>> cost_ff;
};

/// Plain CSV: one point per row, columns = coordinates, optional header row.
/// Abstract extension: a leading "#abstract" line, n rows of m client-facility
/// costs, a "#facility-facility" line, then m rows of m facility costs.
PointsFile read_points_csv(const std::string& path);

void write_points_csv(const std::string& path, const std::vector<std::vector<double>>& points);

nlohmann::json dual_to_json(const DualSolution& dual);
nlohmann::json solution_to_json(const ClusterSolution& sol);
nlohmann::json certificate_to_json(const Certificate& cert);

ClusterSolution solution_from_json(const nlohmann::json& j);

std::string format_double(double v);  // shortest round-trip formatting

}  // namespace pdclust::io
