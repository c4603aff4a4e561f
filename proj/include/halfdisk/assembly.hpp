#ifndef HALFDISK_ASSEMBLY_HPP
#define HALFDISK_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include "halfdisk/errors.hpp"
#include "halfdisk/geometry.hpp"
#include "halfdisk/mesh.hpp"
#include "halfdisk/quadrature.hpp"

// Galerkin matrices for P1-conforming (vertex DOFs) and P1-nonconforming
// Crouzeix-Raviart elements (edge-midpoint DOFs): the stiffness form
// int grad u . grad v and the weighted mass form int 4 u v / (1+r^2)^2.
// Dirichlet conditions are enforced by row/column elimination.

namespace halfdisk {

/// Symmetric sparse matrix, compressed-row storage with the full pattern.
class SparseSym {
  public:
    using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SparseSym() = default;
    explicit SparseSym(Storage m) : mat_(std::move(m)) { mat_.makeCompressed(); }

    static SparseSym from_triplets(int n, const std::vector<Eigen::Triplet<double>>& trips) {
        Storage m(n, n);
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        return SparseSym(std::move(m));
    }

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Storage& eigen() const { return mat_; }
    const int* row_offsets() const { return mat_.outerIndexPtr(); }
    const int* col_indices() const { return mat_.innerIndexPtr(); }
    const double* values() const { return mat_.valuePtr(); }
    std::size_t nnz() const { return static_cast<std::size_t>(mat_.nonZeros()); }

    double max_abs() const {
        double m = 0;
        for (std::size_t i = 0; i < nnz(); ++i) m = std::max(m, std::abs(values()[i]));
        return m;
    }

    /// max |a_ij - a_ji|
    double symmetry_error() const {
        Storage d = Storage(mat_.transpose()) - mat_;
        double m = 0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (Storage::InnerIterator it(d, k); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }

    /// Coordinate text dump: "i j value" with 17 significant digits.
    void write_coordinate(std::ostream& os) const {
        char buf[64];
        for (int i = 0; i < dim(); ++i)
            for (int k = row_offsets()[i]; k < row_offsets()[i + 1]; ++k) {
                std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, col_indices()[k],
                              values()[k]);
                os << buf;
            }
    }

  private:
    Storage mat_;
};

using WeightFn = std::function<double(const Point2&)>;

inline double conformal_weight(const Point2& p) { return weight_at(std::hypot(p.x, p.y)); }
inline double unit_weight(const Point2&) { return 1.0; }

namespace detail {

struct P1Geometry {
    double area;                          // positive
    std::array<Point2, 3> grad_lambda;    // barycentric gradients
};

inline P1Geometry p1_geometry(const TriMesh& m, const std::array<int, 3>& t) {
    const Point2& p0 = m.vertices[t[0]];
    const Point2& p1 = m.vertices[t[1]];
    const Point2& p2 = m.vertices[t[2]];
    const double K = signed_area(p0, p1, p2);
    if (K < 1e-14) throw IntegrityError("assembly: degenerate triangle");
    P1Geometry g;
    g.area = K;
    g.grad_lambda[0] = {(p1.y - p2.y) / (2 * K), (p2.x - p1.x) / (2 * K)};
    g.grad_lambda[1] = {(p2.y - p0.y) / (2 * K), (p0.x - p2.x) / (2 * K)};
    g.grad_lambda[2] = {(p0.y - p1.y) / (2 * K), (p1.x - p0.x) / (2 * K)};
    return g;
}

/// Global DOF indices of the three local DOFs of each triangle.
inline std::vector<std::array<int, 3>> element_dofs(const TriMesh& m, ElementKind fam,
                                                    int& n_dofs) {
    std::vector<std::array<int, 3>> out(m.triangles.size());
    if (fam == ElementKind::Conforming) {
        n_dofs = static_cast<int>(m.vertices.size());
        for (std::size_t i = 0; i < m.triangles.size(); ++i) out[i] = m.triangles[i];
    } else {
        const auto edges = edge_list(m);
        n_dofs = static_cast<int>(edges.size());
        std::map<detail::EdgeKey, int> index;
        for (int i = 0; i < n_dofs; ++i) index.emplace(edges[i], i);
        for (std::size_t i = 0; i < m.triangles.size(); ++i) {
            const auto& t = m.triangles[i];
            // Local DOF j sits on the edge opposite vertex j.
            out[i] = {index.at(detail::edge_key(t[1], t[2])),
                      index.at(detail::edge_key(t[2], t[0])),
                      index.at(detail::edge_key(t[0], t[1]))};
        }
    }
    return out;
}

/// Basis values at a barycentric point: lambda_j (conforming) or
/// 1 - 2 lambda_j (Crouzeix-Raviart, DOF on the opposite edge midpoint).
inline std::array<double, 3> basis_values(ElementKind fam, const std::array<double, 3>& b) {
    if (fam == ElementKind::Conforming) return b;
    return {1 - 2 * b[0], 1 - 2 * b[1], 1 - 2 * b[2]};
}

} // namespace detail

inline SparseSym assemble_stiffness(const TriMesh& m, ElementKind fam) {
    int n = 0;
    const auto dofs = detail::element_dofs(m, fam, n);
    const double gscale = fam == ElementKind::Conforming ? 1.0 : -2.0;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.triangles.size() * 9);
    for (std::size_t e = 0; e < m.triangles.size(); ++e) {
        const auto g = detail::p1_geometry(m, m.triangles[e]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = gscale * gscale * g.area *
                                 (g.grad_lambda[i].x * g.grad_lambda[j].x +
                                  g.grad_lambda[i].y * g.grad_lambda[j].y);
                trips.emplace_back(dofs[e][i], dofs[e][j], v);
            }
    }
    return SparseSym::from_triplets(n, trips);
}

inline SparseSym assemble_mass(const TriMesh& m, ElementKind fam,
                               const QuadratureRule& rule,
                               const WeightFn& weight = conformal_weight) {
    if (rule.degree < 4)
        throw ConfigError("assemble_mass: quadrature degree >= 4 required");
    int n = 0;
    const auto dofs = detail::element_dofs(m, fam, n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.triangles.size() * 9);
    for (std::size_t e = 0; e < m.triangles.size(); ++e) {
        const auto& t = m.triangles[e];
        const auto g = detail::p1_geometry(m, t);
        double local[3][3] = {};
        for (const auto& q : rule.points) {
            const Point2 x{q.bary[0] * m.vertices[t[0]].x + q.bary[1] * m.vertices[t[1]].x +
                               q.bary[2] * m.vertices[t[2]].x,
                           q.bary[0] * m.vertices[t[0]].y + q.bary[1] * m.vertices[t[1]].y +
                               q.bary[2] * m.vertices[t[2]].y};
            const auto phi = detail::basis_values(fam, q.bary);
            const double c = q.weight * g.area * weight(x);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) local[i][j] += c * phi[i] * phi[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trips.emplace_back(dofs[e][i], dofs[e][j], local[i][j]);
    }
    return SparseSym::from_triplets(n, trips);
}

/// Restores full-length vectors from reduced (free-DOF) ones, with zeros
/// on the eliminated Dirichlet DOFs.
struct DofMap {
    int full_dim = 0;
    std::vector<int> free;

    Eigen::VectorXd restore(const Eigen::VectorXd& reduced) const {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(full_dim);
        for (std::size_t i = 0; i < free.size(); ++i) full[free[i]] = reduced[i];
        return full;
    }
};

struct ReducedSystem {
    SparseSym A;
    SparseSym B;
    DofMap map;
};

inline ReducedSystem eliminate_dirichlet(const SparseSym& A, const SparseSym& B,
                                         const std::vector<int>& dirichlet_dofs) {
    const int n = A.dim();
    std::vector<int> pos(n, -1);
    std::vector<char> drop(n, 0);
    for (int d : dirichlet_dofs) drop[d] = 1;
    std::vector<int> free;
    for (int i = 0; i < n; ++i)
        if (!drop[i]) {
            pos[i] = static_cast<int>(free.size());
            free.push_back(i);
        }
    if (free.empty()) throw ConfigError("eliminate_dirichlet: empty free DOF set");

    auto shrink = [&](const SparseSym& M) {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(M.nnz());
        for (int i = 0; i < n; ++i) {
            if (drop[i]) continue;
            for (int k = M.row_offsets()[i]; k < M.row_offsets()[i + 1]; ++k) {
                const int j = M.col_indices()[k];
                if (!drop[j]) trips.emplace_back(pos[i], pos[j], M.values()[k]);
            }
        }
        return SparseSym::from_triplets(static_cast<int>(free.size()), trips);
    };

    return {shrink(A), shrink(B), DofMap{n, std::move(free)}};
}

/// The residual error functional int |grad u_h|^2 - 4 lambda u_h^2/(1+r^2)^2
/// evaluated by re-integration: gradients exactly (piecewise constant),
/// the weighted square with a degree >= 7 rule. `v_full` spans all DOFs
/// (zeros on Dirichlet) and is assumed B-normalized.
inline double err_functional(double lambda, const Eigen::VectorXd& v_full, const TriMesh& m,
                             ElementKind fam, int quad_degree = 7) {
    const auto rule = quadrature_rule(quad_degree);
    int n = 0;
    const auto dofs = detail::element_dofs(m, fam, n);
    const double gscale = fam == ElementKind::Conforming ? 1.0 : -2.0;
    double err = 0.0;
    for (std::size_t e = 0; e < m.triangles.size(); ++e) {
        const auto& t = m.triangles[e];
        const auto g = detail::p1_geometry(m, t);
        double gx = 0, gy = 0;
        for (int i = 0; i < 3; ++i) {
            gx += gscale * v_full[dofs[e][i]] * g.grad_lambda[i].x;
            gy += gscale * v_full[dofs[e][i]] * g.grad_lambda[i].y;
        }
        err += g.area * (gx * gx + gy * gy);
        for (const auto& q : rule.points) {
            const Point2 x{q.bary[0] * m.vertices[t[0]].x + q.bary[1] * m.vertices[t[1]].x +
                               q.bary[2] * m.vertices[t[2]].x,
                           q.bary[0] * m.vertices[t[0]].y + q.bary[1] * m.vertices[t[1]].y +
                               q.bary[2] * m.vertices[t[2]].y};
            const auto phi = detail::basis_values(fam, q.bary);
            double u = 0;
            for (int i = 0; i < 3; ++i) u += v_full[dofs[e][i]] * phi[i];
            err -= lambda * q.weight * g.area * conformal_weight(x) * u * u;
        }
    }
    return err;
}

} // namespace halfdisk

#endif
