#include "pdclust/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pdclust::io {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',' || ch == ';' || ch == '\t' || ch == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool parse_row(const std::string& line, std::vector<double>& row) {
    row.clear();
    for (const auto& tok : split_row(line)) {
        try {
            size_t used = 0;
            row.push_back(std::stod(tok, &used));
            if (used != tok.size()) return false;
        } catch (...) {
            return false;
        }
    }
    return !row.empty();
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

PointsFile read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SolverError(Errc::BadInput, "cannot open " + path);
    PointsFile pf;
    std::string line;
    bool first_content = true;
    bool facility_section = false;
    while (std::getline(in, line)) {
        std::string s = strip(line);
        if (s.empty()) continue;
        if (first_content && s == "#abstract") {
            pf.abstract = true;
            first_content = false;
            continue;
        }
        if (pf.abstract && s == "#facility-facility") {
            facility_section = true;
            continue;
        }
        if (s[0] == '#') continue;
        std::vector<double> row;
        if (!parse_row(s, row)) {
            if (first_content) {  // header row
                first_content = false;
                continue;
            }
            throw SolverError(Errc::BadInput, "bad CSV row: " + s);
        }
        first_content = false;
        if (pf.abstract) {
            (facility_section ? pf.cost_ff : pf.cost_cf).push_back(std::move(row));
        } else {
            pf.points.push_back(std::move(row));
        }
    }
    if (pf.abstract) {
        if (pf.cost_cf.empty() || pf.cost_ff.empty())
            throw SolverError(Errc::BadInput, "abstract file needs both cost sections");
    } else if (pf.points.empty()) {
        throw SolverError(Errc::BadInput, "no points in " + path);
    }
    return pf;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = 0;
    std::sscanf(buf, "%lg", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[64];
            std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
            std::sscanf(shorter, "%lg", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

void write_points_csv(const std::string& path, const std::vector<std::vector<double>>& points) {
    std::ofstream out(path);
    if (!out) throw SolverError(Errc::BadInput, "cannot write " + path);
    for (const auto& p : points) {
        for (size_t d = 0; d < p.size(); ++d) {
            if (d) out << ',';
            out << format_double(p[d]);
        }
        out << '\n';
    }
}

nlohmann::json dual_to_json(const DualSolution& dual) {
    nlohmann::json j;
    j["lambda"] = dual.lambda;
    j["alpha"] = dual.alpha;
    j["tight"] = dual.tight;
    nlohmann::json t = nlohmann::json::object();
    for (int i : dual.tight) t[std::to_string(i)] = dual.t[i];
    j["t"] = std::move(t);
    nlohmann::json w = nlohmann::json::object();
    for (size_t c = 0; c < dual.witness.size(); ++c)
        if (dual.witness[c] >= 0) w[std::to_string(c)] = dual.witness[c];
    j["witness"] = std::move(w);
    return j;
}

nlohmann::json solution_to_json(const ClusterSolution& sol) {
    nlohmann::json j;
    j["opened"] = sol.opened;
    j["assignment"] = sol.assignment;
    j["cost"] = sol.connection_cost;
    return j;
}

ClusterSolution solution_from_json(const nlohmann::json& j) {
    ClusterSolution sol;
    sol.opened = j.at("opened").get<std::vector<int>>();
    sol.assignment = j.at("assignment").get<std::vector<int>>();
    sol.connection_cost = j.at("cost").get<double>();
    return sol;
}

nlohmann::json certificate_to_json(const Certificate& cert) {
    nlohmann::json j;
    j["lambda"] = cert.lambda;
    j["dual_value"] = cert.dual_value;
    j["lower_bound"] = cert.lower_bound;
    j["ratio"] = cert.degenerate ? nlohmann::json() : nlohmann::json(cert.lmp_ratio);
    j["feasible"] = cert.feasible;
    j["degenerate"] = cert.degenerate;
    j["plus_one_unabsorbed"] = cert.plus_one_unabsorbed;
    nlohmann::json audits = nlohmann::json::array();
    for (const auto& row : cert.per_client_audit) {
        const char* cls = row.bound_class == BoundClass::S0   ? "s=0"
                          : row.bound_class == BoundClass::S1 ? "s=1"
                                                              : "s>1";
        audits.push_back({{"client", row.client},
                          {"bound_class", cls},
                          {"lhs", row.lhs},
                          {"rhs", row.rhs},
                          {"ok", row.ok}});
    }
    j["audits"] = std::move(audits);
    return j;
}

}  // namespace pdclust::io
