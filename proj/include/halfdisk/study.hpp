#ifndef HALFDISK_STUDY_HPP
#define HALFDISK_STUDY_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "halfdisk/assembly.hpp"
#include "halfdisk/eigensolve.hpp"
#include "halfdisk/errors.hpp"
#include "halfdisk/geometry.hpp"
#include "halfdisk/mesh.hpp"

// Study drivers: refinement/convergence runs, Richardson extrapolation,
// the t-sweep over the boundary-partition family with root-finding for
// Lambda_1(t) = 2, the Dirichlet/Neumann swap comparison, and eigenfunction
// contour export.

namespace halfdisk {

inline double default_shift(ElementKind fam) {
    return fam == ElementKind::Conforming ? 2.6 : 2.2;
}

struct RunOptions {
    int target_triangles = 288;
    GradingSpec grading{};
    SolverConfig solver{};      // solver.shift == 0 picks the family default
    double err_stop = 5e-10;
    int max_levels_cap = 9;     // memory guard
};

struct SolveOutput {
    std::vector<EigenResult> eigs; // reduced vectors, ascending
    DofMap map;
    int free_dofs = 0;
};

/// Assemble, eliminate and solve one mesh/family/partition instance.
inline SolveOutput solve_on_mesh(const TriMesh& m, ElementKind fam, SolverConfig cfg) {
    const auto masks = boundary_dof_masks(m, fam);
    const SparseSym A = assemble_stiffness(m, fam);
    const SparseSym B = assemble_mass(m, fam, quadrature_rule(4));
    auto red = eliminate_dirichlet(A, B, masks.dirichlet);
    if (cfg.shift == 0) cfg.shift = default_shift(fam);
    SolveOutput out;
    out.eigs = shift_invert_solve(red.A, red.B, cfg);
    out.map = std::move(red.map);
    out.free_dofs = static_cast<int>(out.map.free.size());
    return out;
}

struct ConvergenceRecord {
    int level = 0;
    double lambda = 0;
    double err = 0;
    int dofs = 0;
    int triangles = 0;
    int iterations = 0;
    double seconds = 0;
};

inline std::vector<ConvergenceRecord> run_convergence(ElementKind fam,
                                                      const BoundaryPartition& bp,
                                                      int max_levels, double err_stop,
                                                      const RunOptions& opts = {}) {
    if (max_levels < 1 || max_levels > opts.max_levels_cap)
        throw ConfigError("run_convergence: max_levels outside [1, cap]");
    std::vector<ConvergenceRecord> records;
    TriMesh mesh = generate_initial(bp, opts.target_triangles, opts.grading);
    for (int level = 0; level < max_levels; ++level) {
        const auto t0 = std::chrono::steady_clock::now();
        SolverConfig cfg = opts.solver;
        if (cfg.shift == 0) cfg.shift = default_shift(fam);
        SolveOutput sol;
        try {
            sol = solve_on_mesh(mesh, fam, cfg);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("level " + std::to_string(level) + ": " + e.what(),
                                   e.best_residual);
        }
        const auto& first = sol.eigs.front();
        const Eigen::VectorXd vfull = sol.map.restore(first.vec);
        ConvergenceRecord rec;
        rec.level = level;
        rec.lambda = first.lambda;
        rec.err = err_functional(first.lambda, vfull, mesh, fam);
        rec.dofs = sol.free_dofs;
        rec.triangles = static_cast<int>(mesh.triangles.size());
        rec.iterations = first.iterations;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
        records.push_back(rec);
        if (std::abs(rec.err) < err_stop) break;
        if (level + 1 < max_levels) mesh = refine(mesh);
    }
    return records;
}

struct Extrapolation {
    std::optional<double> lambda_inf; // absent when the tail is not monotone
    double rate = 0;                  // observed order p in lambda_h = lambda + C h^p
};

/// Richardson extrapolation through the last three records.
inline Extrapolation extrapolate(const std::vector<ConvergenceRecord>& records) {
    if (records.size() < 3)
        throw std::domain_error("extrapolate: need at least 3 records");
    const std::size_t n = records.size();
    const double l0 = records[n - 3].lambda, l1 = records[n - 2].lambda,
                 l2 = records[n - 1].lambda;
    const double d1 = l1 - l0, d2 = l2 - l1;
    Extrapolation out;
    if (d1 == 0 || d2 == 0 || d1 * d2 < 0 || std::abs(d2) >= std::abs(d1)) {
        out.rate = d2 != 0 && d1 * d2 > 0 ? std::log2(std::abs(d1 / d2)) : 0.0;
        return out; // extrapolation declined
    }
    out.rate = std::log2(std::abs(d1 / d2));
    out.lambda_inf = l2 + d2 / (std::pow(2.0, out.rate) - 1.0);
    return out;
}

struct SweepRecord {
    double t = 0;
    double lambda_13 = std::numeric_limits<double>::quiet_NaN(); // Dirichlet on partition 1
    double lambda_14 = std::numeric_limits<double>::quiet_NaN(); // swapped problem
    int level = 0;
    std::string error; // per-t failure note; empty on success

    double lambda_min() const { return std::min(lambda_13, lambda_14); }
};

/// Solves both partition variants for one t at the given refinement level.
/// Meshes are regenerated per t so the junctions are exact vertices.
inline SweepRecord solve_sweep_point(double t, int level, ElementKind fam,
                                     const RunOptions& opts) {
    SweepRecord rec;
    rec.t = t;
    rec.level = level;
    BoundaryPartition bp = make_partition(t);
    GradingSpec grading = opts.grading;
    TriMesh mesh = generate_initial(bp, opts.target_triangles, grading);
    for (int l = 0; l < level; ++l) mesh = refine(mesh);
    SolverConfig cfg = opts.solver;
    if (cfg.shift == 0) cfg.shift = default_shift(fam);
    rec.lambda_13 = solve_on_mesh(mesh, fam, cfg).eigs.front().lambda;
    detail::tag_boundary(mesh, make_partition(t, /*swapped=*/true));
    rec.lambda_14 = solve_on_mesh(mesh, fam, cfg).eigs.front().lambda;
    return rec;
}

inline std::vector<SweepRecord> sweep_t(const std::vector<double>& ts, int level,
                                        ElementKind fam = ElementKind::Conforming,
                                        const RunOptions& opts = {}) {
    std::vector<SweepRecord> out;
    for (double t : ts) {
        try {
            out.push_back(solve_sweep_point(t, level, fam, opts));
        } catch (const std::exception& e) {
            SweepRecord rec;
            rec.t = t;
            rec.level = level;
            rec.error = e.what();
            out.push_back(rec);
        }
    }
    return out;
}

struct CriticalT {
    double t_star = 0;
    double lambda_at_star = 0;
    int evaluations = 0;
};

/// Bisection for Lambda_1(t) = target on a monotone branch. The shift is
/// lowered automatically when the eigenvalue wanders away from the default.
inline CriticalT find_critical_t(double target, std::pair<double, double> bracket, int level,
                                 double tol_t, ElementKind fam = ElementKind::Conforming,
                                 RunOptions opts = {}) {
    if (opts.solver.shift == 0) opts.solver.shift = target + 0.4;
    int evals = 0;
    auto lam = [&](double t) {
        ++evals;
        return solve_sweep_point(t, level, fam, opts).lambda_min();
    };
    double lo = bracket.first, hi = bracket.second;
    double flo = lam(lo) - target, fhi = lam(hi) - target;
    if (flo * fhi > 0)
        throw BracketError("find_critical_t: no sign change over the bracket");
    double fmid = flo;
    double mid = lo;
    while (hi - lo > tol_t) {
        mid = 0.5 * (lo + hi);
        fmid = lam(mid) - target;
        if (fmid == 0) break;
        if (flo * fmid < 0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    CriticalT out;
    out.t_star = 0.5 * (lo + hi);
    out.lambda_at_star = fmid + target;
    out.evaluations = evals;
    return out;
}

struct SwapReportRow {
    int level = 0;
    std::vector<double> lambda_13;
    std::vector<double> lambda_14;

    double gap(int i) const { return std::abs(lambda_13[i] - lambda_14[i]); }
};

/// Lowest n eigenvalues of problems (normal, swapped) at t = pi/4 on an
/// x-symmetric mesh family, across two consecutive levels.
inline std::vector<SwapReportRow> swap_isospectrality_report(int level, int n_eigs,
                                                             RunOptions opts = {},
                                                             ElementKind fam =
                                                                 ElementKind::Conforming) {
    if (n_eigs < 1 || n_eigs > 10)
        throw ConfigError("swap_isospectrality_report: n_eigs in [1,10]");
    if (level < 1) throw ConfigError("swap_isospectrality_report: level >= 1");
    const BoundaryPartition bp = make_partition(pi / 4);
    // Symmetrize the grading: junctions plus the mirror of (1,0).
    if (opts.grading.foci.empty()) {
        const auto j = bp.junction_points();
        opts.grading.foci.assign(j.begin(), j.end());
        opts.grading.foci.push_back({-1.0, 0.0});
    }
    opts.solver.num_eigenpairs = std::max(opts.solver.num_eigenpairs, n_eigs + 1);
    TriMesh mesh = generate_initial(bp, opts.target_triangles, opts.grading);
    for (int l = 0; l < level - 1; ++l) mesh = refine(mesh);

    std::vector<SwapReportRow> rows;
    for (int l = level - 1; l <= level; ++l) {
        SwapReportRow row;
        row.level = l;
        SolverConfig cfg = opts.solver;
        if (cfg.shift == 0) cfg.shift = default_shift(fam);
        detail::tag_boundary(mesh, bp);
        auto a = solve_on_mesh(mesh, fam, cfg);
        detail::tag_boundary(mesh, make_partition(pi / 4, true));
        auto b = solve_on_mesh(mesh, fam, cfg);
        for (int i = 0; i < n_eigs; ++i) {
            row.lambda_13.push_back(a.eigs[i].lambda);
            row.lambda_14.push_back(b.eigs[i].lambda);
        }
        rows.push_back(row);
        if (l < level) mesh = refine(mesh);
    }
    return rows;
}

/// Nodal values (conforming) or vertex averages (Crouzeix-Raviart) of the
/// eigenfunction, as CSV x,y,value followed by triangle connectivity. The
/// sign is fixed so the positive part dominates.
inline void contour_export(const Eigen::VectorXd& v_full, const TriMesh& m, ElementKind fam,
                           std::ostream& os) {
    std::vector<double> nodal(m.vertices.size(), 0.0);
    if (fam == ElementKind::Conforming) {
        for (std::size_t i = 0; i < m.vertices.size(); ++i) nodal[i] = v_full[i];
    } else {
        int n = 0;
        const auto dofs = detail::element_dofs(m, fam, n);
        std::vector<int> mult(m.vertices.size(), 0);
        for (std::size_t e = 0; e < m.triangles.size(); ++e) {
            const auto& t = m.triangles[e];
            for (int i = 0; i < 3; ++i) {
                // CR value at vertex i: sum of the two adjacent edge DOFs
                // minus the opposite one.
                const double val = v_full[dofs[e][(i + 1) % 3]] +
                                   v_full[dofs[e][(i + 2) % 3]] - v_full[dofs[e][i]];
                nodal[t[i]] += val;
                ++mult[t[i]];
            }
        }
        for (std::size_t i = 0; i < nodal.size(); ++i)
            if (mult[i] > 0) nodal[i] /= mult[i];
    }
    double pos = 0, neg = 0;
    for (double v : nodal) (v >= 0 ? pos : neg) += std::abs(v);
    const double sign = pos >= neg ? 1.0 : -1.0;

    char buf[96];
    os << "x,y,value\n";
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", m.vertices[i].x,
                      m.vertices[i].y, sign * nodal[i]);
        os << buf;
    }
    os << "# triangles i,j,k\n";
    for (const auto& t : m.triangles) os << t[0] << "," << t[1] << "," << t[2] << "\n";
}

inline void write_convergence_csv(const std::vector<ConvergenceRecord>& recs,
                                  std::ostream& os) {
    char buf[160];
    os << "level,lambda,err,dofs,triangles,iterations,seconds\n";
    for (const auto& r : recs) {
        std::snprintf(buf, sizeof(buf), "%d,%.12f,%.6e,%d,%d,%d,%.3f\n", r.level, r.lambda,
                      r.err, r.dofs, r.triangles, r.iterations, r.seconds);
        os << buf;
    }
}

inline void write_sweep_csv(const std::vector<SweepRecord>& recs, std::ostream& os) {
    char buf[200];
    os << "t,lambda_13,lambda_14,lambda_min,level,error\n";
    for (const auto& r : recs) {
        std::snprintf(buf, sizeof(buf), "%.12f,%.12f,%.12f,%.12f,%d,%s\n", r.t, r.lambda_13,
                      r.lambda_14, r.lambda_min(), r.level, r.error.c_str());
        os << buf;
    }
}

} // namespace halfdisk

#endif
