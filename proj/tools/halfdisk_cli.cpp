// Command-line driver for the half-disk mixed Dirichlet-Neumann eigenvalue
// studies: single solves, convergence tables, the t-parameter sweep with
// root finding, the Dirichlet/Neumann swap comparison, the covering-symmetry
// verification, and mesh dumps.
//
// Exit codes: 0 success, 2 configuration error, 3 solver error, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "halfdisk/covering.hpp"
#include "halfdisk/mesh_io.hpp"
#include "halfdisk/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace halfdisk;

namespace {

struct CliOptions {
    std::string family = "conforming";
    double t = pi / 4;              // radians
    bool swapped = false;
    int target_triangles = 288;
    int layers = 4;
    double ratio = 0.5;
    int levels = 0;                 // refinements for single-level commands
    int max_levels = 5;
    double err_stop = 5e-10;
    double shift = 0;               // 0: family default (2.6 / 2.2)
    double tolerance = 1e-12;
    int num_eigenpairs = 5;
    std::string out_dir;
    int jobs = 1;
};

ElementKind parse_family(const std::string& s) {
    if (s == "conforming") return ElementKind::Conforming;
    if (s == "nonconforming") return ElementKind::Nonconforming;
    throw ConfigError("unknown element family: " + s);
}

RunOptions make_run_options(const CliOptions& o) {
    RunOptions r;
    r.target_triangles = o.target_triangles;
    r.grading.n_layers = o.layers;
    r.grading.ratio = o.ratio;
    r.solver.shift = o.shift;
    r.solver.tolerance = o.tolerance;
    r.solver.num_eigenpairs = o.num_eigenpairs;
    r.err_stop = o.err_stop;
    return r;
}

fs::path output_dir(const CliOptions& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv("HALFDISK_OUT")) return env;
    return ".";
}

json config_echo(const CliOptions& o) {
    return json{{"family", o.family},
                {"t", o.t},
                {"swapped", o.swapped},
                {"target_triangles", o.target_triangles},
                {"grading_layers", o.layers},
                {"grading_ratio", o.ratio},
                {"levels", o.levels},
                {"max_levels", o.max_levels},
                {"err_stop", o.err_stop},
                {"shift", o.shift},
                {"tolerance", o.tolerance},
                {"num_eigenpairs", o.num_eigenpairs},
                {"jobs", o.jobs}};
}

void write_manifest(const CliOptions& o, const std::string& command, double seconds,
                    const std::vector<std::string>& outputs) {
    const auto dir = output_dir(o);
    fs::create_directories(dir);
    json m{{"command", command},
           {"config", config_echo(o)},
           {"seconds", seconds},
           {"outputs", outputs},
           {"format_version", 1},
           {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count()}};
    std::ofstream os(dir / (command + "_manifest.json"));
    if (!os) throw std::ios_base::failure("cannot write manifest");
    os << m.dump(2) << "\n";
}

int cmd_solve(const CliOptions& o, bool want_contour) {
    const auto start = std::chrono::steady_clock::now();
    const ElementKind fam = parse_family(o.family);
    const BoundaryPartition bp = make_partition(o.t, o.swapped);
    const RunOptions ro = make_run_options(o);
    TriMesh mesh = generate_initial(bp, ro.target_triangles, ro.grading);
    for (int l = 0; l < o.levels; ++l) mesh = refine(mesh);
    SolverConfig cfg = ro.solver;
    if (cfg.shift == 0) cfg.shift = default_shift(fam);
    const SolveOutput sol = solve_on_mesh(mesh, fam, cfg);
    const auto& first = sol.eigs.front();

    const auto dir = output_dir(o);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    {
        json r{{"lambda", first.lambda},
               {"residual", first.residual},
               {"iterations", first.iterations},
               {"shift", first.shift},
               {"free_dofs", sol.free_dofs},
               {"triangles", mesh.triangles.size()},
               {"level", o.levels}};
        json all = json::array();
        for (const auto& e : sol.eigs) all.push_back(e.lambda);
        r["eigenvalues"] = all;
        const auto p = dir / "eigenresult.json";
        std::ofstream os(p);
        if (!os) throw std::ios_base::failure("cannot write " + p.string());
        os << r.dump(2) << "\n";
        outputs.push_back(p.string());
    }
    if (want_contour) {
        const auto p = dir / "contour.csv";
        std::ofstream os(p);
        if (!os) throw std::ios_base::failure("cannot write " + p.string());
        contour_export(sol.map.restore(first.vec), mesh, fam, os);
        outputs.push_back(p.string());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, "solve", secs, outputs);
    std::cout << "lambda = " << std::setprecision(12) << first.lambda
              << "  (residual " << first.residual << ", " << first.iterations
              << " iterations, " << sol.free_dofs << " DOFs)\n";
    return 0;
}

int cmd_converge(const CliOptions& o) {
    const auto start = std::chrono::steady_clock::now();
    const ElementKind fam = parse_family(o.family);
    const auto records = run_convergence(fam, make_partition(o.t, o.swapped), o.max_levels,
                                         o.err_stop, make_run_options(o));
    const auto dir = output_dir(o);
    fs::create_directories(dir);
    const auto p = dir / ("converge_" + o.family + ".csv");
    std::ofstream os(p);
    if (!os) throw std::ios_base::failure("cannot write " + p.string());
    write_convergence_csv(records, os);
    write_convergence_csv(records, std::cout);
    const auto ex = extrapolate(records);
    if (ex.lambda_inf)
        std::cout << "extrapolated lambda = " << *ex.lambda_inf << " (rate " << ex.rate
                  << ")\n";
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, "converge", secs, {p.string()});
    return 0;
}

int cmd_sweep(const CliOptions& o, double t_min, double t_max, int count, int level) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> ts;
    for (int i = 0; i < count; ++i)
        ts.push_back(count == 1 ? t_min : t_min + (t_max - t_min) * i / (count - 1));
    const auto recs = sweep_t(ts, level, parse_family(o.family), make_run_options(o));
    const auto dir = output_dir(o);
    fs::create_directories(dir);
    const auto p = dir / "sweep.csv";
    std::ofstream os(p);
    if (!os) throw std::ios_base::failure("cannot write " + p.string());
    write_sweep_csv(recs, os);
    write_sweep_csv(recs, std::cout);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, "sweep", secs, {p.string()});
    return 0;
}

int cmd_find_t(const CliOptions& o, double target, double lo, double hi, int level,
               double tol_t) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = find_critical_t(target, {lo, hi}, level, tol_t, parse_family(o.family),
                                   make_run_options(o));
    std::cout << "t* = " << std::setprecision(10) << r.t_star
              << "  Lambda_1(t*) = " << r.lambda_at_star << "  (" << r.evaluations
              << " evaluations)\n";
    const auto dir = output_dir(o);
    fs::create_directories(dir);
    const auto p = dir / "critical_t.json";
    std::ofstream os(p);
    if (!os) throw std::ios_base::failure("cannot write " + p.string());
    os << json{{"t_star", r.t_star},
               {"lambda", r.lambda_at_star},
               {"target", target},
               {"level", level},
               {"evaluations", r.evaluations}}
              .dump(2)
       << "\n";
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, "find-t", secs, {p.string()});
    return 0;
}

int cmd_swap_check(const CliOptions& o, int level, int n_eigs) {
    const auto start = std::chrono::steady_clock::now();
    const auto rows =
        swap_isospectrality_report(level, n_eigs, make_run_options(o), parse_family(o.family));
    for (const auto& row : rows) {
        std::cout << "level " << row.level << ":\n";
        for (int i = 0; i < static_cast<int>(row.lambda_13.size()); ++i)
            std::cout << "  lambda_" << i + 1 << "  " << std::setprecision(12)
                      << row.lambda_13[i] << "  " << row.lambda_14[i] << "  gap "
                      << std::setprecision(3) << row.gap(i) << "\n";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, "swap-check", secs, {});
    return 0;
}

int cmd_symmetry(int samples) {
    const auto table = covering::reproduce_symmetry_table();
    std::cout << "(j,m)    s1      s2      s3\n";
    int row = 0;
    for (int j = 1; j <= 4; ++j)
        for (int m = 1; m <= 2; ++m, ++row) {
            std::cout << "(" << j << "," << m << ")";
            for (int l = 0; l < 3; ++l)
                std::cout << "   (" << table[row][l].first << "," << table[row][l].second
                          << ")";
            std::cout << "\n";
        }
    const auto rep = covering::verify_relations(samples);
    std::cout << "relation deviations over " << rep.samples << " random surface points:\n";
    for (const auto& [name, dev] : rep.max_deviation)
        std::cout << "  " << name << ": " << dev << "\n";
    return rep.worst() <= 1e-10 ? 0 : 3;
}

int cmd_mesh_dump(const CliOptions& o, const std::string& out_file) {
    const BoundaryPartition bp = make_partition(o.t, o.swapped);
    const RunOptions ro = make_run_options(o);
    TriMesh mesh = generate_initial(bp, ro.target_triangles, ro.grading);
    for (int l = 0; l < o.levels; ++l) mesh = refine(mesh);
    const auto dir = output_dir(o);
    fs::create_directories(dir);
    const auto p = out_file.empty() ? (dir / "mesh.txt").string() : out_file;
    write_mesh_file(mesh, p);
    const auto st = mesh_statistics(mesh);
    std::cout << "wrote " << p << ": " << st.n_vertices << " vertices, " << st.n_triangles
              << " triangles, h in [" << st.h_min << ", " << st.h_max << "], aspect max "
              << st.aspect_max << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-disk mixed Dirichlet-Neumann eigenvalue studies"};
    app.set_config("--config", "", "Read options from a key=value config file");
    app.require_subcommand(1);

    CliOptions o;
    auto add_common = [&](CLI::App* c) {
        c->add_option("--family", o.family, "Element family: conforming | nonconforming")
            ->capture_default_str();
        c->add_option("--t", o.t, "Partition parameter t in radians, in (0, pi/2)")
            ->capture_default_str();
        c->add_flag("--swapped", o.swapped, "Exchange Dirichlet and Neumann parts");
        c->add_option("--target-triangles", o.target_triangles,
                      "Initial mesh size target")
            ->capture_default_str();
        c->add_option("--layers", o.layers, "Grading layers toward the junctions")
            ->capture_default_str();
        c->add_option("--ratio", o.ratio, "Grading layer radius ratio")->capture_default_str();
        c->add_option("--shift", o.shift,
                      "Spectral shift sigma (0: family default, 2.6 / 2.2)")
            ->capture_default_str();
        c->add_option("--tol", o.tolerance, "Relative eigenvalue residual tolerance")
            ->capture_default_str();
        c->add_option("--num-eigenpairs", o.num_eigenpairs, "Eigenpairs to compute")
            ->capture_default_str();
        c->add_option("--out", o.out_dir, "Output directory (default $HALFDISK_OUT or .)");
        c->add_option("--jobs", o.jobs, "Worker cap for independent runs")
            ->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "Single-level eigenvalue solve");
    add_common(solve);
    solve->add_option("--levels", o.levels, "Uniform refinements of the initial mesh")
        ->capture_default_str();
    bool want_contour = false;
    solve->add_flag("--contour", want_contour, "Also export the eigenfunction contour CSV");

    auto* conv = app.add_subcommand("converge", "Refinement convergence study");
    add_common(conv);
    conv->add_option("--max-levels", o.max_levels, "Number of refinement levels")
        ->capture_default_str();
    conv->add_option("--err-stop", o.err_stop, "Stop when |Err| drops below this")
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Sweep the boundary-partition parameter t");
    add_common(sweep);
    double t_min = 0.15, t_max = pi / 2 - 0.15;
    int sweep_count = 9, sweep_level = 3;
    sweep->add_option("--t-min", t_min, "")->capture_default_str();
    sweep->add_option("--t-max", t_max, "")->capture_default_str();
    sweep->add_option("--count", sweep_count, "Sweep points")->capture_default_str();
    sweep->add_option("--level", sweep_level, "Refinement level per point")
        ->capture_default_str();

    auto* findt = app.add_subcommand("find-t", "Root-find Lambda_1(t) = target");
    add_common(findt);
    double target = 2.0, blo = 0.1, bhi = pi / 4;
    int ft_level = 3;
    double tol_t = 1e-3;
    findt->add_option("--target", target, "")->capture_default_str();
    findt->add_option("--bracket-lo", blo, "")->capture_default_str();
    findt->add_option("--bracket-hi", bhi, "")->capture_default_str();
    findt->add_option("--level", ft_level, "")->capture_default_str();
    findt->add_option("--tol-t", tol_t, "Bisection tolerance in t")->capture_default_str();

    auto* swap = app.add_subcommand("swap-check", "Dirichlet/Neumann swap isospectrality");
    add_common(swap);
    int swap_level = 3, swap_eigs = 1;
    swap->add_option("--level", swap_level, "")->capture_default_str();
    swap->add_option("--n-eigs", swap_eigs, "")->capture_default_str();

    auto* symv = app.add_subcommand("symmetry-verify",
                                    "Verify the covering symmetry algebra and table");
    int samples = 100;
    symv->add_option("--samples", samples, "Random surface points")->capture_default_str();

    auto* mdump = app.add_subcommand("mesh-dump", "Write the mesh in halfdisk-mesh v1 format");
    add_common(mdump);
    std::string mesh_out;
    mdump->add_option("--levels", o.levels, "Uniform refinements")->capture_default_str();
    mdump->add_option("--file", mesh_out, "Output path (default <out>/mesh.txt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // any parse/config failure exits 2
    }

    try {
        if (solve->parsed()) return cmd_solve(o, want_contour);
        if (conv->parsed()) return cmd_converge(o);
        if (sweep->parsed()) return cmd_sweep(o, t_min, t_max, sweep_count, sweep_level);
        if (findt->parsed()) return cmd_find_t(o, target, blo, bhi, ft_level, tol_t);
        if (swap->parsed()) return cmd_swap_check(o, swap_level, swap_eigs);
        if (symv->parsed()) return cmd_symmetry(samples);
        if (mdump->parsed()) return cmd_mesh_dump(o, mesh_out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ShiftCollisionError& e) {
        std::cerr << "solver error: " << e.what() << " (suggested shift "
                  << e.suggested_shift << ")\n";
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver error: " << e.what() << " (best residual " << e.best_residual
                  << ")\n";
        return 3;
    } catch (const BracketError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
