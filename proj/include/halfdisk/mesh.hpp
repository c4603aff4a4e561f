#ifndef HALFDISK_MESH_HPP
#define HALFDISK_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "halfdisk/errors.hpp"
#include "halfdisk/geometry.hpp"

// Triangulations of the half-disk. The initial mesh maps a structured
// half-square grid onto the half-disk (u = x*sqrt(1-y^2/2),
// v = y*sqrt(1-x^2/2)), snaps the partition junctions onto exact mesh
// vertices, and grades toward them by layered red-green refinement.
// Uniform refinement splits every triangle in 4, projecting arc midpoints
// back to the unit circle. Everything is deterministic.

namespace halfdisk {

struct BoundaryEdge {
    int a;
    int b;
    BcKind tag;
    bool on_arc;
};

struct TriMesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    int level = 0;
};

struct GradingSpec {
    int n_layers = 4;
    double ratio = 0.5;
    std::vector<Point2> foci;   // empty: use the partition's junction points
    double radius0 = 0.35;      // outermost grading radius
};

struct MeshStatistics {
    double h_max = 0, h_min = 0;
    double aspect_max = 0, aspect_min = 0;
    int n_vertices = 0, n_edges = 0, n_triangles = 0, n_boundary_edges = 0;
    int euler = 0; // V - E + F (without the outer face); 1 for a disk
};

inline double signed_area(const Point2& p0, const Point2& p1, const Point2& p2) {
    return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

/// Circumradius over twice the inradius; 1 for an equilateral triangle.
inline double aspect_ratio(const Point2& p0, const Point2& p1, const Point2& p2) {
    const double a = std::hypot(p1.x - p2.x, p1.y - p2.y);
    const double b = std::hypot(p0.x - p2.x, p0.y - p2.y);
    const double c = std::hypot(p0.x - p1.x, p0.y - p1.y);
    const double K = std::abs(signed_area(p0, p1, p2));
    const double s = 0.5 * (a + b + c);
    return a * b * c * s / (8.0 * K * K);
}

namespace detail {

using EdgeKey = std::pair<int, int>;
inline EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

inline bool near_circle(const Point2& p, double tol = 1e-9) {
    return std::abs(std::hypot(p.x, p.y) - 1.0) <= tol;
}

/// Deterministic list of all mesh edges, sorted by (min,max) vertex pair.
inline std::vector<EdgeKey> all_edges(const TriMesh& m) {
    std::set<EdgeKey> s;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) s.insert(edge_key(t[e], t[(e + 1) % 3]));
    return {s.begin(), s.end()};
}

inline std::map<EdgeKey, int> edge_incidence(const TriMesh& m) {
    std::map<EdgeKey, int> cnt;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) ++cnt[edge_key(t[e], t[(e + 1) % 3])];
    return cnt;
}

/// Re-derives and tags the boundary from scratch against a partition.
/// Requires every junction of `bp` to be a mesh vertex, so no edge
/// straddles a Dirichlet/Neumann interface.
inline void tag_boundary(TriMesh& m, const BoundaryPartition& bp) {
    m.boundary_edges.clear();
    const auto cnt = edge_incidence(m);
    for (const auto& [key, c] : cnt) {
        if (c != 1) continue;
        const Point2& pa = m.vertices[key.first];
        const Point2& pb = m.vertices[key.second];
        const bool arc = near_circle(pa) && near_circle(pb) &&
                         !(std::abs(pa.y) < 1e-12 && std::abs(pb.y) < 1e-12);
        Point2 probe;
        if (arc) {
            const double ang = 0.5 * (std::atan2(pa.y, pa.x) + std::atan2(pb.y, pb.x));
            probe = {std::cos(ang), std::sin(ang)};
        } else {
            probe = {0.5 * (pa.x + pb.x), 0.0};
        }
        const PointClass pc = classify_boundary_point(probe, bp);
        if (pc == PointClass::Junction)
            throw IntegrityError("tag_boundary: edge straddles a junction");
        m.boundary_edges.push_back({key.first, key.second,
                                    pc == PointClass::Dirichlet ? BcKind::Dirichlet
                                                                : BcKind::Neumann,
                                    arc});
    }
}

/// Circle-arc edges of the topological boundary. Only these may have
/// their midpoints projected onto the circle; projecting an interior
/// chord (e.g. the diagonal of a corner cell whose three vertices all
/// sit on the circle) would fold the neighboring triangle.
inline std::set<EdgeKey> arc_boundary_edges(const TriMesh& m) {
    std::set<EdgeKey> out;
    for (const auto& [key, c] : edge_incidence(m)) {
        if (c != 1) continue;
        const Point2& pa = m.vertices[key.first];
        const Point2& pb = m.vertices[key.second];
        if (near_circle(pa) && near_circle(pb) &&
            !(std::abs(pa.y) < 1e-12 && std::abs(pb.y) < 1e-12))
            out.insert(key);
    }
    return out;
}

struct MidpointFactory {
    TriMesh* mesh;
    std::set<EdgeKey> project; // arc boundary edges whose midpoints go to the circle
    std::map<EdgeKey, int> cache;

    int get(int a, int b) {
        const auto key = edge_key(a, b);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const Point2& pa = mesh->vertices[a];
        const Point2& pb = mesh->vertices[b];
        Point2 mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
        if (project.count(key)) {
            const double r = std::hypot(mid.x, mid.y);
            mid = {mid.x / r, mid.y / r};
        }
        const int idx = static_cast<int>(mesh->vertices.size());
        mesh->vertices.push_back(mid);
        cache.emplace(key, idx);
        return idx;
    }
};

/// One red-green pass: triangles in `red` are split in 4, neighbors with
/// one hanging midpoint are bisected, with closure promotion to red.
inline void red_green_pass(TriMesh& m, std::vector<char>& red) {
    const std::size_t nt = m.triangles.size();
    // Closure: a triangle with >= 2 split edges becomes red itself.
    bool changed = true;
    while (changed) {
        changed = false;
        std::set<EdgeKey> split;
        for (std::size_t i = 0; i < nt; ++i)
            if (red[i])
                for (int e = 0; e < 3; ++e)
                    split.insert(edge_key(m.triangles[i][e], m.triangles[i][(e + 1) % 3]));
        for (std::size_t i = 0; i < nt; ++i) {
            if (red[i]) continue;
            int k = 0;
            for (int e = 0; e < 3; ++e)
                k += split.count(edge_key(m.triangles[i][e], m.triangles[i][(e + 1) % 3]));
            if (k >= 2) {
                red[i] = 1;
                changed = true;
            }
        }
    }

    MidpointFactory mf{&m, arc_boundary_edges(m), {}};
    std::set<EdgeKey> split;
    for (std::size_t i = 0; i < nt; ++i)
        if (red[i])
            for (int e = 0; e < 3; ++e)
                split.insert(edge_key(m.triangles[i][e], m.triangles[i][(e + 1) % 3]));

    std::vector<std::array<int, 3>> out;
    out.reserve(m.triangles.size() * 2);
    for (std::size_t i = 0; i < nt; ++i) {
        const auto [a, b, c] = m.triangles[i];
        if (red[i]) {
            const int mab = mf.get(a, b), mbc = mf.get(b, c), mca = mf.get(c, a);
            out.push_back({a, mab, mca});
            out.push_back({mab, b, mbc});
            out.push_back({mca, mbc, c});
            out.push_back({mab, mbc, mca});
        } else {
            int se = -1;
            for (int e = 0; e < 3; ++e)
                if (split.count(edge_key(m.triangles[i][e], m.triangles[i][(e + 1) % 3])))
                    se = e;
            if (se < 0) {
                out.push_back({a, b, c});
            } else {
                // Green bisection through the hanging midpoint.
                const int v0 = m.triangles[i][se], v1 = m.triangles[i][(se + 1) % 3],
                          v2 = m.triangles[i][(se + 2) % 3];
                const int mid = mf.get(v0, v1);
                out.push_back({v0, mid, v2});
                out.push_back({mid, v1, v2});
            }
        }
    }
    m.triangles = std::move(out);
}

inline double dist(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Structured base mesh: half-square grid under the concentric polar map
/// (Shirley-Chiu style). L-inf squares max(|x|,y) = s map onto circles of
/// radius s, with the angle spread linearly along each square side, so
/// grid cells become near-uniform annular sectors (aspect ~ 1.3) all the
/// way into the corners and the center. nx columns (even), ny = nx/2 rows
/// so the reference cells are squares.
inline TriMesh base_mesh(int nx) {
    nx = std::max(4, nx + (nx % 2)); // even, at least 4
    const int ny = nx / 2;
    TriMesh m;
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double x = -1.0 + 2.0 * i / nx;
            const double y = double(j) / ny;
            double r = 0, th = 0;
            if (y <= std::abs(x) && x != 0) {
                r = std::abs(x); // side sectors, |angle from axis| <= 45 deg
                th = x > 0 ? (pi / 4) * (y / r) : pi - (pi / 4) * (y / r);
            } else if (y > 0) {
                r = y;           // top sector, 45..135 degrees
                th = pi / 2 - (pi / 4) * (x / r);
            }
            Point2 p{r * std::cos(th), r * std::sin(th)};
            // The three non-diameter sides land on the unit circle; make
            // that exact.
            if (i == 0 || i == nx || j == ny) {
                const double rr = std::hypot(p.x, p.y);
                if (rr > 0) p = {p.x / rr, p.y / rr};
            }
            if (j == 0) p.y = 0.0;
            m.vertices.push_back(p);
        }
    // Split each quad along the diagonal giving the better worst triangle
    // (cells straddling a sector seam would otherwise produce a triangle
    // with three nearly cocircular vertices). Decide on the left half and
    // mirror, so the mesh stays exactly symmetric under x -> -x.
    std::vector<char> main_diag(std::size_t(nx) * ny, 0);
    auto worst = [&](int a, int b, int c) {
        return aspect_ratio(m.vertices[a], m.vertices[b], m.vertices[c]);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx / 2; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                      v11 = vid(i + 1, j + 1);
            const double q_main = std::max(worst(v00, v10, v11), worst(v00, v11, v01));
            const double q_anti = std::max(worst(v00, v10, v01), worst(v10, v11, v01));
            const bool use_main = q_main <= q_anti;
            main_diag[std::size_t(j) * nx + i] = use_main;
            // Mirrored cell: the mirror of the main diagonal is the anti one.
            main_diag[std::size_t(j) * nx + (nx - 1 - i)] = !use_main;
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                      v11 = vid(i + 1, j + 1);
            if (main_diag[std::size_t(j) * nx + i]) {
                m.triangles.push_back({v00, v10, v11});
                m.triangles.push_back({v00, v11, v01});
            } else {
                m.triangles.push_back({v00, v10, v01});
                m.triangles.push_back({v10, v11, v01});
            }
        }
    return m;
}

/// Moves the nearest free arc vertex onto each junction angle exactly.
inline void snap_junctions(TriMesh& m, const BoundaryPartition& bp) {
    std::vector<int> arc_vs;
    for (int i = 0; i < static_cast<int>(m.vertices.size()); ++i) {
        const Point2& p = m.vertices[i];
        if (near_circle(p) && std::abs(p.y) > 1e-12) arc_vs.push_back(i);
    }
    std::set<int> used;
    const double angs[2] = {pi / 2 - bp.t, pi / 2 + bp.t};
    for (double a : angs) {
        int best = -1;
        double bestd = 1e30;
        for (int v : arc_vs) {
            if (used.count(v)) continue;
            const double va = std::atan2(m.vertices[v].y, m.vertices[v].x);
            const double d = std::abs(va - a);
            if (d < bestd) {
                bestd = d;
                best = v;
            }
        }
        if (best < 0) throw ConfigError("snap_junctions: no arc vertex available");
        m.vertices[best] = {std::cos(a), std::sin(a)};
        used.insert(best);
    }
}

} // namespace detail

inline void validate_mesh(const TriMesh& m) {
    for (const auto& t : m.triangles) {
        const double a = signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        if (a <= 0.0)
            throw IntegrityError("validate_mesh: non-positive triangle area " +
                                 std::to_string(a));
    }
    const auto cnt = detail::edge_incidence(m);
    std::size_t nb = 0;
    for (const auto& [k, c] : cnt) {
        if (c == 1)
            ++nb;
        else if (c != 2)
            throw IntegrityError("validate_mesh: edge shared by " + std::to_string(c) +
                                 " triangles");
    }
    if (nb != m.boundary_edges.size())
        throw IntegrityError("validate_mesh: boundary edge list out of sync");
}

inline TriMesh generate_initial(const BoundaryPartition& bp, int target_triangles,
                                const GradingSpec& grading = {}) {
    if (target_triangles < 16)
        throw std::domain_error("generate_initial: target_triangles >= 16 required");
    if (!(grading.ratio > 0.0 && grading.ratio < 1.0))
        throw ConfigError("generate_initial: grading ratio must lie in (0,1)");
    if (grading.n_layers < 0 || grading.n_layers > 12)
        throw ConfigError("generate_initial: grading layers out of range [0,12]");
    if (grading.n_layers > 0 &&
        grading.radius0 * std::pow(grading.ratio, grading.n_layers - 1) < 1e-6)
        throw ConfigError("generate_initial: grading infeasible (innermost layer collapses)");

    std::vector<Point2> foci = grading.foci;
    if (foci.empty()) {
        const auto j = bp.junction_points();
        foci.assign(j.begin(), j.end());
    }

    // Grading roughly doubles the triangle count at default depth; start
    // below target and adjust the base resolution once if needed.
    auto build = [&](int nx) {
        TriMesh m = detail::base_mesh(nx);
        detail::snap_junctions(m, bp);
        for (int l = 0; l < grading.n_layers; ++l) {
            const double R = grading.radius0 * std::pow(grading.ratio, l);
            std::vector<char> red(m.triangles.size(), 0);
            for (std::size_t i = 0; i < m.triangles.size(); ++i)
                for (int v : m.triangles[i])
                    for (const auto& f : foci)
                        if (detail::dist(m.vertices[v], f) <= R) red[i] = 1;
            detail::red_green_pass(m, red);
        }
        return m;
    };

    int nx = std::max(4, static_cast<int>(std::lround(
                             std::sqrt(grading.n_layers > 0 ? 0.55 * target_triangles
                                                            : 1.0 * target_triangles))));
    nx += nx % 2;
    TriMesh m = build(nx);
    // One corrective resize keeps the count within a factor 2 of target.
    const auto count = [](const TriMesh& mm) { return static_cast<int>(mm.triangles.size()); };
    if (count(m) > 2 * target_triangles || count(m) < (target_triangles + 1) / 2) {
        const double scale = std::sqrt(double(target_triangles) / count(m));
        int nx2 = std::max(4, static_cast<int>(std::lround(nx * scale)));
        nx2 += nx2 % 2;
        if (nx2 != nx) m = build(nx2);
    }

    detail::tag_boundary(m, bp);
    m.level = 0;
    validate_mesh(m);
    return m;
}

/// Uniform 4-way refinement; arc midpoints projected to the circle,
/// boundary tags inherited per sub-edge.
inline TriMesh refine(const TriMesh& m) {
    TriMesh out;
    out.vertices = m.vertices;
    out.level = m.level + 1;
    detail::MidpointFactory mf{&out, {}, {}};
    for (const auto& e : m.boundary_edges)
        if (e.on_arc) mf.project.insert(detail::edge_key(e.a, e.b));
    out.triangles.reserve(m.triangles.size() * 4);
    for (const auto& [a, b, c] : m.triangles) {
        const int mab = mf.get(a, b), mbc = mf.get(b, c), mca = mf.get(c, a);
        out.triangles.push_back({a, mab, mca});
        out.triangles.push_back({mab, b, mbc});
        out.triangles.push_back({mca, mbc, c});
        out.triangles.push_back({mab, mbc, mca});
    }
    out.boundary_edges.reserve(m.boundary_edges.size() * 2);
    for (const auto& e : m.boundary_edges) {
        const int mid = mf.get(e.a, e.b);
        out.boundary_edges.push_back({e.a, mid, e.tag, e.on_arc});
        out.boundary_edges.push_back({mid, e.b, e.tag, e.on_arc});
    }
    return out;
}

enum class ElementKind { Conforming, Nonconforming };

/// Deterministic global edge enumeration (Crouzeix-Raviart DOFs).
inline std::vector<detail::EdgeKey> edge_list(const TriMesh& m) { return detail::all_edges(m); }

struct DofMasks {
    std::vector<int> dirichlet;
    std::vector<int> free;
    int total = 0;
};

inline DofMasks boundary_dof_masks(const TriMesh& m, ElementKind element) {
    // Integrity: the tagged list must cover the topological boundary.
    const auto cnt = detail::edge_incidence(m);
    std::set<detail::EdgeKey> tagged;
    for (const auto& e : m.boundary_edges) tagged.insert(detail::edge_key(e.a, e.b));
    for (const auto& [k, c] : cnt)
        if (c == 1 && !tagged.count(k))
            throw IntegrityError("boundary_dof_masks: untagged boundary edge");

    DofMasks out;
    std::set<int> diri;
    if (element == ElementKind::Conforming) {
        out.total = static_cast<int>(m.vertices.size());
        // Vertices on closed Dirichlet segments, junctions included.
        for (const auto& e : m.boundary_edges)
            if (e.tag == BcKind::Dirichlet) {
                diri.insert(e.a);
                diri.insert(e.b);
            }
    } else {
        const auto edges = edge_list(m);
        out.total = static_cast<int>(edges.size());
        std::map<detail::EdgeKey, int> index;
        for (int i = 0; i < out.total; ++i) index.emplace(edges[i], i);
        for (const auto& e : m.boundary_edges)
            if (e.tag == BcKind::Dirichlet)
                diri.insert(index.at(detail::edge_key(e.a, e.b)));
    }
    out.dirichlet.assign(diri.begin(), diri.end());
    std::vector<char> isd(out.total, 0);
    for (int d : out.dirichlet) isd[d] = 1;
    for (int i = 0; i < out.total; ++i)
        if (!isd[i]) out.free.push_back(i);
    return out;
}

inline MeshStatistics mesh_statistics(const TriMesh& m) {
    MeshStatistics s;
    s.n_vertices = static_cast<int>(m.vertices.size());
    s.n_triangles = static_cast<int>(m.triangles.size());
    s.n_boundary_edges = static_cast<int>(m.boundary_edges.size());
    const auto edges = detail::all_edges(m);
    s.n_edges = static_cast<int>(edges.size());
    s.euler = s.n_vertices - s.n_edges + s.n_triangles;
    s.h_min = 1e30;
    s.aspect_min = 1e30;
    for (const auto& [a, b] : edges) {
        const double h = detail::dist(m.vertices[a], m.vertices[b]);
        s.h_max = std::max(s.h_max, h);
        s.h_min = std::min(s.h_min, h);
    }
    for (const auto& t : m.triangles) {
        const double q = aspect_ratio(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        s.aspect_max = std::max(s.aspect_max, q);
        s.aspect_min = std::min(s.aspect_min, q);
    }
    return s;
}

} // namespace halfdisk

#endif
