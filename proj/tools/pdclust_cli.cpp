#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdclust/baseline.hpp"
#include "pdclust/certify.hpp"
#include "pdclust/instance.hpp"
#include "pdclust/io.hpp"
#include "pdclust/jv.hpp"
#include "pdclust/oracle.hpp"
#include "pdclust/sequence.hpp"

namespace fs = std::filesystem;
using namespace pdclust;

namespace {

Objective parse_objective(const std::string& name) {
    if (name == "kmeans") return Objective::EuclideanKMeans;
    if (name == "kmedian") return Objective::EuclideanKMedian;
    if (name == "kmeans-general") return Objective::GeneralMetricKMeans;
    throw SolverError(Errc::BadInput, "unknown objective: " + name);
}

double gaussian(std::mt19937_64& rng) {
    // Hand-rolled Box-Muller keeps gen output byte-identical everywhere.
    double u1 = ((rng() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = (rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<std::vector<double>> mixture_points(uint64_t seed, int n, int dims, int mixture_k,
                                                double spread) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> centers(mixture_k, std::vector<double>(dims));
    for (auto& c : centers)
        for (double& v : c) v = (rng() >> 11) * 0x1.0p-53;
    std::vector<std::vector<double>> pts(n, std::vector<double>(dims));
    for (int p = 0; p < n; ++p) {
        const auto& c = centers[p % mixture_k];
        for (int d = 0; d < dims; ++d) pts[p][d] = c[d] + spread * gaussian(rng);
    }
    return pts;
}

struct SolveOptions {
    std::string points_path;
    std::string facilities_path;
    std::string objective = "kmeans";
    int k = 2;
    std::string mode = "sequence";
    double eps = 0.1;
    double eps_z = 1e-4;
    bool paper_faithful = false;
    bool normalize = false;
    std::string trace_path;
    std::string solution_path = "solution.json";
    std::string certificate_path = "certificate.json";
    int bisection_iters = 60;
};

Instance load_instance(const SolveOptions& opt) {
    io::PointsFile pf = io::read_points_csv(opt.points_path);
    Objective objective = parse_objective(opt.objective);
    if (pf.abstract)
        return build_abstract_instance(pf.cost_cf, pf.cost_ff, objective, opt.k);
    if (!opt.facilities_path.empty()) {
        io::PointsFile ff = io::read_points_csv(opt.facilities_path);
        return build_instance(pf.points, ff.points, objective, opt.k);
    }
    return build_instance(pf.points, FacilityMode::ExemplarFequalsD, objective, opt.k);
}

struct SolveOutcome {
    ClusterSolution solution;
    Certificate certificate;
};

SolveOutcome run_solver(const Instance& raw, const SolveOptions& opt) {
    const Instance* inst = &raw;
    Instance normalized_inst;
    NormalizationRecord rec;
    bool normalized = false;
    if (opt.normalize) {
        auto [ni, r] = normalize_distances(raw);
        normalized_inst = std::move(ni);
        rec = std::move(r);
        normalized = !rec.trivial;
        if (normalized) inst = &normalized_inst;
        for (const auto& v : rec.violations) std::cerr << "normalize: " << v << "\n";
    }
    DeltaPreset preset = delta_preset(inst->objective);
    SweepConfig cfg;
    cfg.eps = opt.eps;
    cfg.eps_z = opt.eps_z;
    cfg.paper_faithful = opt.paper_faithful;

    std::ofstream trace_file;
    TraceSink sink;
    TraceSink* sink_ptr = nullptr;
    if (!opt.trace_path.empty()) {
        trace_file.open(opt.trace_path);
        if (!trace_file) throw SolverError(Errc::BadInput, "cannot write " + opt.trace_path);
        sink.on_level = [&trace_file](const SequenceLevel& lv) {
            nlohmann::json j{{"l", lv.ell},
                             {"lambda", lv.lambda},
                             {"max_alpha_delta", lv.max_alpha_delta},
                             {"tight", lv.dual.tight.size()},
                             {"is_size", lv.is_set.size()}};
            trace_file << j.dump() << "\n";
        };
        sink.on_update_step = [&trace_file](long long ell, int step, int is_size) {
            nlohmann::json j{{"l", ell}, {"s", step}, {"is_size", is_size}};
            trace_file << j.dump() << "\n";
        };
        sink_ptr = &sink;
    }

    SolveOutcome out;
    if (opt.mode == "sequence") {
        ExactKResult res = solve_exact_k(*inst, inst->k, preset, cfg, sink_ptr, normalized);
        out.solution = std::move(res.solution);
        out.certificate = std::move(res.certificate);
    } else if (opt.mode == "bisection") {
        BisectionResult res = bisection_solve(*inst, inst->k, preset, opt.bisection_iters, normalized);
        out.solution = std::move(res.solution);
        out.certificate = std::move(res.certificate);
    } else {
        throw SolverError(Errc::BadInput, "unknown mode: " + opt.mode);
    }

    if (normalized) {
        // Report the solution against the raw costs; the certificate keeps the
        // normalized accounting it was proved in.
        out.solution = assign_clients(raw, out.solution.opened);
    }
    return out;
}

int cmd_solve(const SolveOptions& opt) {
    Instance inst = load_instance(opt);
    SolveOutcome out = run_solver(inst, opt);

    std::ofstream sol_file(opt.solution_path);
    if (!sol_file) throw SolverError(Errc::BadInput, "cannot write " + opt.solution_path);
    sol_file << io::solution_to_json(out.solution).dump(2) << "\n";
    sol_file.close();
    std::ofstream cert_file(opt.certificate_path);
    if (!cert_file) throw SolverError(Errc::BadInput, "cannot write " + opt.certificate_path);
    cert_file << io::certificate_to_json(out.certificate).dump(2) << "\n";
    cert_file.close();

    // Re-load and re-verify the reported cost before declaring success.
    std::ifstream back(opt.solution_path);
    nlohmann::json jsol = nlohmann::json::parse(back);
    ClusterSolution reloaded = io::solution_from_json(jsol);
    ClusterSolution recomputed = assign_clients(inst, reloaded.opened);
    double diff = std::abs(recomputed.connection_cost - reloaded.connection_cost);
    if (diff > 1e-9 * std::max(1.0, std::abs(reloaded.connection_cost)))
        throw SolverError(Errc::InternalError, "reported cost failed re-verification");

    std::cout << "cost " << io::format_double(out.solution.connection_cost) << " opened "
              << out.solution.opened.size() << " lower_bound "
              << io::format_double(out.certificate.lower_bound);
    if (out.certificate.degenerate)
        std::cout << " ratio degenerate";
    else
        std::cout << " ratio " << io::format_double(out.certificate.lmp_ratio);
    std::cout << "\n";
    return 0;
}

int cmd_gen(uint64_t seed, int n, int dims, int mixture_k, double spread, const std::string& out) {
    if (n < 1) throw SolverError(Errc::BadInput, "n must be positive");
    io::write_points_csv(out, mixture_points(seed, n, dims, mixture_k, spread));
    return 0;
}

int cmd_bench(const std::string& dir, const std::vector<int>& ks,
              const std::vector<std::string>& methods, const std::string& objective,
              double eps_z, uint64_t seed, const std::string& out_path) {
    std::ofstream out(out_path);
    if (!out) throw SolverError(Errc::BadInput, "cannot write " + out_path);
    out << "instance_id,n,m,k,method,cost,lower_bound,certified_ratio,wall_ms,seed,status\n";

    std::vector<fs::path> files;
    if (fs::exists(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        for (int k : ks) {
            double pd_lower_bound = 0.0;
            for (const auto& method : methods) {
                SolveOptions opt;
                opt.points_path = file.string();
                opt.objective = objective;
                opt.k = k;
                opt.eps_z = eps_z;
                auto started = std::chrono::steady_clock::now();
                std::string status = "ok";
                double cost = 0, lb = 0, ratio = 0;
                try {
                    Instance inst = load_instance(opt);
                    if (method == "kmeanspp-lloyd") {
                        ClusterSolution sol = kmeanspp_lloyd(inst, k, seed);
                        cost = sol.connection_cost;
                        lb = pd_lower_bound;  // context from the pd runs
                    } else {
                        opt.mode = method == "pd-bisection" ? "bisection" : "sequence";
                        SolveOutcome res = run_solver(inst, opt);
                        cost = res.solution.connection_cost;
                        lb = res.certificate.lower_bound;
                        pd_lower_bound = std::max(pd_lower_bound, lb);
                    }
                    ratio = lb > 0 ? cost / lb : 0.0;
                } catch (const SolverError& e) {
                    status = std::string("error:") + e.what();
                    std::replace(status.begin(), status.end(), ',', ';');
                }
                auto ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
                Instance meta = load_instance(opt);
                out << file.stem().string() << ',' << meta.n << ',' << meta.m << ',' << k << ','
                    << method << ',' << io::format_double(cost) << ',' << io::format_double(lb)
                    << ',' << io::format_double(ratio) << ',' << io::format_double(ms) << ','
                    << seed << ',' << status << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"primal-dual k-clustering with dual certificates"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a gaussian-mixture point cloud");
    uint64_t gen_seed = 1;
    int gen_n = 100, gen_dims = 2, gen_mixture = 3;
    double gen_spread = 0.05;
    std::string gen_out = "points.csv";
    gen->add_option("--seed", gen_seed);
    gen->add_option("--n", gen_n);
    gen->add_option("--dims", gen_dims);
    gen->add_option("--mixture-k", gen_mixture);
    gen->add_option("--spread", gen_spread);
    gen->add_option("--out", gen_out);

    auto* solve = app.add_subcommand("solve", "solve an instance and emit certified output");
    SolveOptions sopt;
    solve->add_option("points", sopt.points_path, "points CSV (or #abstract cost file)")
        ->required();
    solve->add_option("--facilities", sopt.facilities_path, "explicit facility CSV");
    solve->add_option("--objective", sopt.objective, "kmeans|kmedian|kmeans-general");
    solve->add_option("--k", sopt.k)->required();
    solve->add_option("--mode", sopt.mode, "sequence|bisection");
    solve->add_option("--eps", sopt.eps);
    solve->add_option("--eps-z", sopt.eps_z);
    solve->add_flag("--paper-faithful", sopt.paper_faithful);
    solve->add_flag("--normalize", sopt.normalize);
    solve->add_option("--trace", sopt.trace_path);
    solve->add_option("--solution", sopt.solution_path);
    solve->add_option("--certificate", sopt.certificate_path);
    solve->add_option("--iters", sopt.bisection_iters, "bisection probe count");

    auto* bench = app.add_subcommand("bench", "run methods over a directory of instances");
    std::string bench_dir = ".", bench_objective = "kmeans", bench_out = "report.csv";
    std::vector<int> bench_ks{3};
    std::vector<std::string> bench_methods{"pd-sequence", "pd-bisection", "kmeanspp-lloyd"};
    double bench_eps_z = 1e-3;
    uint64_t bench_seed = 1;
    bench->add_option("--dir", bench_dir);
    bench->add_option("--k", bench_ks)->delimiter(',');
    bench->add_option("--methods", bench_methods)->delimiter(',');
    bench->add_option("--objective", bench_objective);
    bench->add_option("--eps-z", bench_eps_z);
    bench->add_option("--seed", bench_seed);
    bench->add_option("--out", bench_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_seed, gen_n, gen_dims, gen_mixture, gen_spread, gen_out);
        if (solve->parsed()) return cmd_solve(sopt);
        if (bench->parsed())
            return cmd_bench(bench_dir, bench_ks, bench_methods, bench_objective, bench_eps_z,
                             bench_seed, bench_out);
    } catch (const HorizonExhaustedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
