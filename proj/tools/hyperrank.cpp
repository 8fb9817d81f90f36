// Command-line front end: solve / partition / motifs / subspace / perturb.

#include "hyperrank/motifs.hpp"
#include "hyperrank/partition.hpp"
#include "hyperrank/perturb.hpp"
#include "hyperrank/rng.hpp"
#include "hyperrank/solver.hpp"
#include "hyperrank/subspace.hpp"
#include "hyperrank/tensor_ops.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace {

using namespace hyperrank;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

Vector load_vector(const std::string& spec, VertexId n) {
    if (spec == "uniform") {
        return Vector::Constant(n, 1.0 / static_cast<Scalar>(n));
    }
    std::ifstream in(spec);
    if (!in) throw DataError("cannot open vector file: " + spec);
    std::vector<Scalar> vals;
    Scalar x;
    while (in >> x) vals.push_back(x);
    if (static_cast<VertexId>(vals.size()) != n) {
        throw DataError("vector file has " + std::to_string(vals.size()) + " entries, expected " +
                        std::to_string(n));
    }
    return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void write_solution_csv(const std::string& path, const Vector& y) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);
    out << "vertex,y\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        out << (i + 1) << ',' << y[i] << "\n";
    }
}

json report_to_json(const SolveReport& rep) {
    return json{{"iterations", rep.iterations},
                {"residual_step", rep.residual_step},
                {"residual_eq", rep.residual_eq},
                {"varsigma", rep.varsigma},
                {"unique_by_contraction", rep.unique_by_contraction},
                {"unique_by_corollary", rep.unique_by_corollary},
                {"converged", rep.converged},
                {"solution_sum", rep.y.sum()}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);
    out << j.dump(2) << "\n";
}

RankMethod parse_method(const std::string& s) {
    if (s == "mlppr") return RankMethod::Mlppr;
    if (s == "mpr") return RankMethod::Mpr;
    if (s == "gpr") return RankMethod::Gpr;
    throw DataError("unknown method: " + s);
}

int threads_from_env(int cli_value) {
    if (cli_value > 0) return cli_value;
    if (const char* env = std::getenv("HYPERRANK_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

int cmd_solve(const std::string& input, Scalar alpha, const std::string& v_spec,
              const std::string& model, Scalar tol_step, Scalar tol_eq, int max_iter,
              Scalar shift, const std::string& correction, const std::string& out,
              const std::string& summary) {
    const UniformHypergraph h = UniformHypergraph::load(input);
    const SparseKTensor a = adjacency_tensor(h);
    auto [pbar, dangling] = normalize_substochastic(a);
    PageRankProblem problem{std::move(pbar), alpha, load_vector(v_spec, h.vertex_count()),
                            model == "mpr" ? Model::Mpr : Model::Mlppr,
                            correction == "explicit" ? CorrectionMode::Explicit
                                                     : CorrectionMode::Implicit};
    SolveOptions opts;
    opts.tol_step = tol_step;
    opts.tol_eq = tol_eq;
    opts.max_iter = max_iter;
    opts.shift = shift;

    const SolveReport rep = problem.model == Model::Mpr ? solve_mpr(problem, opts)
                                                        : solve_mlppr(problem, std::nullopt, opts);
    write_solution_csv(out, rep.y);
    json j = report_to_json(rep);
    j["config"] = {{"input", input},         {"alpha", alpha},
                   {"v", v_spec},            {"model", model},
                   {"tol_step", tol_step},   {"tol_eq", tol_eq},
                   {"max_iter", max_iter},   {"shift", shift},
                   {"correction", correction}};
    j["dangling_fibers"] = dangling.dangling_count();
    j["total_fibers"] = dangling.total_fibers();
    if (!summary.empty()) write_json(summary, j);
    if (!rep.converged) {
        std::cerr << "solve did not converge within " << max_iter << " iterations\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}

int cmd_partition(const std::string& input, int parts, Scalar alpha, const std::string& method,
                  std::uint64_t seed, const std::string& out, const std::string& hcurve,
                  const std::string& ids_path) {
    const UniformHypergraph h = UniformHypergraph::load(input);
    PartitionOptions opts;
    opts.alpha = alpha;
    opts.method = parse_method(method);
    opts.seed = seed;

    std::vector<std::int64_t> ids;
    if (!ids_path.empty()) ids = load_id_map(ids_path);
    const auto original = [&](VertexId v) -> std::int64_t {
        return ids.empty() ? v + 1 : ids[static_cast<std::size_t>(v)];
    };

    if (!hcurve.empty()) {
        const SweepCut cut = bipartition(h, opts);
        std::ofstream out_h(hcurve);
        if (!out_h) throw DataError("cannot write: " + hcurve);
        out_h << "i,h\n" << std::setprecision(17);
        for (std::size_t i = 0; i < cut.h.size(); ++i) {
            out_h << (i + 1) << ',' << cut.h[i] << "\n";
        }
    }

    const PartitionResult result = recursive_partition(h, parts, opts);
    std::ofstream po(out);
    if (!po) throw DataError("cannot write: " + out);
    po << "vertex,part\n";
    for (std::size_t p = 0; p < result.parts.size(); ++p) {
        for (VertexId v : result.parts[p]) {
            po << original(v) << ',' << p << "\n";
        }
    }
    if (!result.reached_target) {
        std::cerr << result.diagnostic << "\n";
    }
    return kExitOk;
}

int cmd_motifs(const std::string& snap, const std::string& out, const std::string& stats) {
    const DirectedGraph g = load_snap(snap);
    const FilterResult f = filter_network(g);
    const UniformHypergraph h = d3c_hypergraph(f.graph, f.d3cs);
    h.save(out);
    save_id_map(f.graph, out + ".ids");
    if (!stats.empty()) {
        write_json(stats, json{{"input", snap},
                               {"raw_nodes", g.n},
                               {"raw_arcs", g.arcs.size()},
                               {"self_loops_dropped", g.self_loops_dropped},
                               {"duplicate_arcs_dropped", g.duplicate_arcs_dropped},
                               {"filtered_nodes", f.graph.n},
                               {"filtered_arcs", f.graph.arcs.size()},
                               {"d3c_count", f.d3cs.size()},
                               {"fixpoint_differs", f.fixpoint_differs}});
    }
    return kExitOk;
}

int cmd_subspace(int n, std::uint64_t seed, const std::string& method, Scalar noise,
                 int seeds, const std::string& out, const std::string& points_out,
                 const std::string& points_in, int threads) {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write: " + out);
    os << "n,method,success_ratio,seed\n" << std::setprecision(17);
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t instance_seed = seed + static_cast<std::uint64_t>(s);
        PointSet ps = points_in.empty() ? generate_instance(n, instance_seed, noise)
                                        : load_points_csv(points_in);
        if (!points_out.empty() && s == 0) save_points_csv(ps, points_out);
        const SubspaceScore score =
            cluster_and_score(ps, 4, instance_seed, parse_method(method), threads);
        os << n << ',' << method << ',' << score.success_ratio << ',' << instance_seed << "\n";
        if (!score.diagnostic.empty()) std::cerr << score.diagnostic << "\n";
    }
    return kExitOk;
}

int cmd_perturb(const std::string& input, Scalar alpha, const std::string& v_spec,
                const std::string& grid_spec, int grid_points, int trials,
                std::uint64_t seed, const std::string& out, int threads) {
    const UniformHypergraph h = UniformHypergraph::load(input);
    const SparseKTensor a = adjacency_tensor(h);
    auto [pbar, dangling] = normalize_substochastic(a);
    PageRankProblem problem{std::move(pbar), alpha, load_vector(v_spec, h.vertex_count()),
                            Model::Mlppr, CorrectionMode::Implicit};

    Scalar lo = 1e-4, hi = 1e-1;
    if (!grid_spec.empty()) {
        const auto colon = grid_spec.find(':');
        if (colon == std::string::npos) throw DataError("--sigma-grid expects LO:HI");
        lo = std::stod(grid_spec.substr(0, colon));
        hi = std::stod(grid_spec.substr(colon + 1));
    }
    const auto rows = perturbation_experiment(
        problem, sigma_grid(lo, hi, grid_points),
        {PerturbTarget::Both, PerturbTarget::VOnly, PerturbTarget::TensorOnly}, trials, seed,
        threads);

    std::ofstream os(out);
    if (!os) throw DataError("cannot write: " + out);
    os << "sigma,mode,mean_dy,bound\n" << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.sigma << ',' << to_string(r.mode) << ',' << r.mean_dy << ',' << r.bound << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-linear pseudo-PageRank toolkit for k-uniform hypergraphs"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default $HYPERRANK_THREADS or 1)");

    // solve
    auto* solve = app.add_subcommand("solve", "solve an MLPPR or MPR problem");
    std::string in_path, v_spec = "uniform", model = "mlppr", correction = "implicit";
    std::string out_path = "y.csv", summary_path;
    Scalar alpha = 0.2, tol_step = 1e-8, tol_eq = 1e-10, shift = 0.0;
    int max_iter = 100000;
    solve->add_option("--input", in_path, "hyperedge list file")->required();
    solve->add_option("--alpha", alpha, "teleport probability in [0,1)");
    solve->add_option("--v", v_spec, "`uniform` or a whitespace-separated vector file");
    solve->add_option("--model", model, "mlppr|mpr")
        ->check(CLI::IsMember({"mlppr", "mpr"}));
    solve->add_option("--correction", correction, "explicit|implicit dangling correction (mpr)")
        ->check(CLI::IsMember({"explicit", "implicit"}));
    solve->add_option("--tol-step", tol_step, "step stopping tolerance");
    solve->add_option("--tol-eq", tol_eq, "equation-residual stopping tolerance");
    solve->add_option("--max-iter", max_iter, "iteration cap");
    solve->add_option("--shift", shift, "MPR fixed-point shift");
    solve->add_option("--out", out_path, "solution CSV");
    solve->add_option("--summary", summary_path, "JSON summary path");

    // partition
    auto* part = app.add_subcommand("partition", "spectral multiway partition");
    std::string p_in, p_out = "parts.csv", p_hcurve, p_method = "mlppr", p_ids;
    int p_parts = 2;
    Scalar p_alpha = 0.99;
    std::uint64_t p_seed = 0;
    part->add_option("--input", p_in, "hyperedge list file")->required();
    part->add_option("--parts", p_parts, "number of parts");
    part->add_option("--alpha", p_alpha, "teleport probability");
    part->add_option("--method", p_method, "mlppr|mpr|gpr")
        ->check(CLI::IsMember({"mlppr", "mpr", "gpr"}));
    part->add_option("--seed", p_seed, "eigensolver seed");
    part->add_option("--out", p_out, "partition CSV `vertex,part`");
    part->add_option("--hcurve", p_hcurve, "sweep curve CSV `i,h` (first bipartition)");
    part->add_option("--ids", p_ids, "sidecar id map for original vertex ids");

    // motifs
    auto* motifs = app.add_subcommand("motifs", "D3C extraction from a directed network");
    std::string m_snap, m_out = "motifs.hg", m_stats;
    motifs->add_option("--snap", m_snap, "SNAP edge list")->required();
    motifs->add_option("--out", m_out, "output hyperedge list");
    motifs->add_option("--stats", m_stats, "JSON stats path");

    // subspace
    auto* sub = app.add_subcommand("subspace", "line-clustering experiment");
    int s_n = 100, s_seeds = 1;
    std::uint64_t s_seed = 0;
    std::string s_method = "mlppr", s_out = "results.csv", s_points_out, s_points_in;
    Scalar s_noise = 0.5;
    sub->add_option("--n", s_n, "number of points");
    sub->add_option("--seed", s_seed, "base seed");
    sub->add_option("--seeds", s_seeds, "number of consecutive seeds to run");
    sub->add_option("--method", s_method, "mlppr|mpr|gpr")
        ->check(CLI::IsMember({"mlppr", "mpr", "gpr"}));
    sub->add_option("--noise", s_noise, "Gaussian noise variance");
    sub->add_option("--out", s_out, "results CSV `n,method,success_ratio,seed`");
    sub->add_option("--points-out", s_points_out, "dump first instance as CSV `x,y,label`");
    sub->add_option("--points-in", s_points_in, "cluster a dumped instance instead");

    // perturb
    auto* pert = app.add_subcommand("perturb", "perturbation-bound experiment");
    std::string t_in, t_v = "uniform", t_grid, t_out = "bounds.csv";
    Scalar t_alpha = 0.2;
    int t_trials = 100, t_grid_points = 13;
    std::uint64_t t_seed = 0;
    pert->add_option("--input", t_in, "hyperedge list file")->required();
    pert->add_option("--alpha", t_alpha, "teleport probability");
    pert->add_option("--v", t_v, "`uniform` or a vector file");
    pert->add_option("--sigma-grid", t_grid, "LO:HI log grid bounds (default 1e-4:1e-1)");
    pert->add_option("--grid-points", t_grid_points, "number of grid points");
    pert->add_option("--trials", t_trials, "trials per sigma and mode");
    pert->add_option("--seed", t_seed, "master seed");
    pert->add_option("--out", t_out, "CSV `sigma,mode,mean_dy,bound`");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const int nthreads = threads_from_env(threads);
        if (solve->parsed()) {
            return cmd_solve(in_path, alpha, v_spec, model, tol_step, tol_eq, max_iter, shift,
                             correction, out_path,
                             summary_path.empty() ? out_path + ".json" : summary_path);
        }
        if (part->parsed()) {
            return cmd_partition(p_in, p_parts, p_alpha, p_method, p_seed, p_out, p_hcurve, p_ids);
        }
        if (motifs->parsed()) return cmd_motifs(m_snap, m_out, m_stats);
        if (sub->parsed()) {
            return cmd_subspace(s_n, s_seed, s_method, s_noise, s_seeds, s_out, s_points_out,
                                s_points_in, nthreads);
        }
        if (pert->parsed()) {
            return cmd_perturb(t_in, t_alpha, t_v, t_grid, t_grid_points, t_trials, t_seed, t_out,
                               nthreads);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
