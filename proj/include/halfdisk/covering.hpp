#ifndef HALFDISK_COVERING_HPP
#define HALFDISK_COVERING_HPP

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "halfdisk/errors.hpp"
#include "halfdisk/geometry.hpp"

// Exact-arithmetic (double-precision complex) verifier for the symmetry
// algebra of the genus-two double cover
//
//   w^2 = F(z) = z (z - e^{i pi/4})(z - e^{3i pi/4})
//                  / ((z + e^{i pi/4})(z + e^{3i pi/4}))
//
// with its hyperelliptic involution T:(z,w)->(z,-w) and the three lifted
// reflections s1, s2, s3 covering z -> conj(z), -conj(z), 1/conj(z).

namespace halfdisk::covering {

using cplx = std::complex<double>;

inline cplx root_e1() { return std::polar(1.0, pi / 4); }   // e^{i pi/4}
inline cplx root_e3() { return std::polar(1.0, 3 * pi / 4); } // e^{3i pi/4}

/// The covering map F. Poles at -e^{i pi/4} and -e^{3i pi/4}.
inline cplx covering_value(cplx z) {
    const cplx e1 = root_e1(), e3 = root_e3();
    if (std::abs(z + e1) < 1e-12 || std::abs(z + e3) < 1e-12)
        throw std::domain_error("covering_value: z is a pole of F");
    return z * (z - e1) * (z - e3) / ((z + e1) * (z + e3));
}

struct SurfacePoint {
    cplx z;
    cplx w;
    int sheet = 0; // 1 or 2 at marked points, 0 when unspecified

    /// |w^2 - F(z)| <= tol * (1 + |F(z)|)
    bool on_surface(double tol = 1e-12) const {
        const cplx f = covering_value(z);
        return std::abs(w * w - f) <= tol * (1.0 + std::abs(f));
    }
};

enum class Sym { S1, S2, S3, T, TS1, TS2, TS3 };

inline const char* sym_name(Sym s) {
    switch (s) {
        case Sym::S1: return "s1";
        case Sym::S2: return "s2";
        case Sym::S3: return "s3";
        case Sym::T: return "T";
        case Sym::TS1: return "T.s1";
        case Sym::TS2: return "T.s2";
        case Sym::TS3: return "T.s3";
    }
    return "?";
}

inline SurfacePoint apply_symmetry(Sym s, const SurfacePoint& p, bool check_input = true) {
    if (check_input && !p.on_surface())
        throw std::domain_error("apply_symmetry: input violates w^2 = F(z)");
    const cplx z = p.z, w = p.w;
    switch (s) {
        case Sym::S1: return {std::conj(z), std::conj(z) / std::conj(w)};
        case Sym::S2: return {-std::conj(z), cplx(0, 1) * std::conj(w)};
        case Sym::S3:
            if (std::abs(z) < 1e-14)
                throw std::domain_error("apply_symmetry: s3 undefined at z = 0");
            return {1.0 / std::conj(z), std::conj(w) / std::conj(z)};
        case Sym::T: return {z, -w};
        case Sym::TS1: return apply_symmetry(Sym::T, apply_symmetry(Sym::S1, p, false), false);
        case Sym::TS2: return apply_symmetry(Sym::T, apply_symmetry(Sym::S2, p, false), false);
        case Sym::TS3: return apply_symmetry(Sym::T, apply_symmetry(Sym::S3, p, false), false);
    }
    throw std::logic_error("apply_symmetry: unknown symmetry");
}

/// Base intersection points z_j of the rays with the circle arcs.
inline std::array<cplx, 4> base_points() {
    return {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
}

/// Sheet-1 values w_j^{(1)} at the marked points; sheet 2 is the negative.
inline std::array<cplx, 4> marked_w1() {
    const double s2 = std::sqrt(2.0);
    return {cplx(0, 1), cplx(1, 1) / (2.0 + s2), cplx(1, 0), cplx(1, -1) / (2.0 - s2)};
}

/// Marked point p_j^{(m)}, j in 1..4, m in {1,2}.
inline SurfacePoint marked_point(int j, int m) {
    const auto z = base_points()[j - 1];
    const auto w = marked_w1()[j - 1];
    return {z, m == 1 ? w : -w, m};
}

/// Identify a surface point with a marked point (k,n), or nullopt.
inline std::optional<std::pair<int, int>> match_marked(const SurfacePoint& p, double tol = 1e-12) {
    for (int k = 1; k <= 4; ++k)
        for (int n = 1; n <= 2; ++n) {
            const auto q = marked_point(k, n);
            if (std::abs(p.z - q.z) <= tol && std::abs(p.w - q.w) <= tol)
                return std::make_pair(k, n);
        }
    return std::nullopt;
}

/// Images s_l p_j^{(m)} identified as marked points: grid[(j,m) row][l-1].
/// Rows ordered (1,1),(1,2),(2,1),(2,2),(3,1),(3,2),(4,1),(4,2).
using SymmetryTable = std::array<std::array<std::pair<int, int>, 3>, 8>;

inline SymmetryTable reproduce_symmetry_table() {
    const Sym syms[3] = {Sym::S1, Sym::S2, Sym::S3};
    SymmetryTable table{};
    int row = 0;
    for (int j = 1; j <= 4; ++j)
        for (int m = 1; m <= 2; ++m, ++row)
            for (int l = 0; l < 3; ++l) {
                const auto img = apply_symmetry(syms[l], marked_point(j, m));
                const auto hit = match_marked(img);
                if (!hit)
                    throw IntegrityError("symmetry table: image of p_" + std::to_string(j) +
                                         "^(" + std::to_string(m) + ") under " +
                                         sym_name(syms[l]) + " is not a marked point");
                table[row][l] = *hit;
            }
    return table;
}

/// Draws z uniformly from an annulus keeping distance >= 0.05 from all
/// ramification points and poles (they all sit at 0 or on the unit circle).
inline cplx random_base_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> rad(0.05, 0.93);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    return std::polar(rad(rng), ang(rng));
}

inline SurfacePoint random_surface_point(std::mt19937& rng) {
    const cplx z = random_base_point(rng);
    return {z, std::sqrt(covering_value(z))};
}

struct RelationReport {
    std::map<std::string, double> max_deviation; // per relation family
    int samples = 0;

    double worst() const {
        double m = 0;
        for (const auto& [k, v] : max_deviation) m = std::max(m, v);
        return m;
    }
};

inline double point_dist(const SurfacePoint& a, const SurfacePoint& b) {
    return std::max(std::abs(a.z - b.z), std::abs(a.w - b.w));
}

/// Checks the group relations s_j^2 = Id, T^2 = Id, s1 s3 = s3 s1,
/// s2 s3 = s3 s2, s2 s1 = T s1 s2 on random surface points.
inline RelationReport verify_relations(int samples, unsigned seed = 20050911) {
    if (samples < 1) throw std::domain_error("verify_relations: samples >= 1 required");
    std::mt19937 rng(seed);
    RelationReport rep;
    rep.samples = samples;
    auto upd = [&](const std::string& name, double d) {
        auto& v = rep.max_deviation[name];
        v = std::max(v, d);
    };
    auto ap = [](Sym s, const SurfacePoint& p) { return apply_symmetry(s, p, false); };
    for (int i = 0; i < samples; ++i) {
        const SurfacePoint p = random_surface_point(rng);
        upd("s1^2=Id", point_dist(ap(Sym::S1, ap(Sym::S1, p)), p));
        upd("s2^2=Id", point_dist(ap(Sym::S2, ap(Sym::S2, p)), p));
        upd("s3^2=Id", point_dist(ap(Sym::S3, ap(Sym::S3, p)), p));
        upd("T^2=Id", point_dist(ap(Sym::T, ap(Sym::T, p)), p));
        upd("s1s3=s3s1", point_dist(ap(Sym::S1, ap(Sym::S3, p)), ap(Sym::S3, ap(Sym::S1, p))));
        upd("s2s3=s3s2", point_dist(ap(Sym::S2, ap(Sym::S3, p)), ap(Sym::S3, ap(Sym::S2, p))));
        upd("s2s1=Ts1s2",
            point_dist(ap(Sym::S2, ap(Sym::S1, p)), ap(Sym::T, ap(Sym::S1, ap(Sym::S2, p)))));
    }
    return rep;
}

inline bool fixed_point_membership(Sym s, const SurfacePoint& p, double tol = 1e-10) {
    if (!p.on_surface(1e-10))
        throw std::domain_error("fixed_point_membership: point not on the surface");
    return point_dist(apply_symmetry(s, p, false), p) <= tol;
}

/// Lifts a base path z(t) to the cover by sign continuity of w, starting
/// from a given surface point above path.front(). Step size must keep
/// |delta w| < |w| so the sheet never flips silently.
inline std::vector<SurfacePoint> lift_along_path(const std::vector<cplx>& path,
                                                 const SurfacePoint& start) {
    if (path.empty()) throw std::domain_error("lift_along_path: empty path");
    if (std::abs(path.front() - start.z) > 1e-12)
        throw std::domain_error("lift_along_path: start point not above path origin");
    std::vector<SurfacePoint> out;
    out.reserve(path.size());
    out.push_back(start);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const cplx w0 = out.back().w;
        cplx w = std::sqrt(covering_value(path[i]));
        if (std::abs(w - w0) > std::abs(-w - w0)) w = -w;
        out.push_back({path[i], w, out.back().sheet});
    }
    return out;
}

/// Lifts the point of arc/ray a_k at base coordinate z, on the sheet
/// containing the marked point w_{k'}^{(m)}, k' = ((k-1) mod 4) + 1.
/// The path runs from the marked base point z_{k'} to z along the arc.
inline SurfacePoint lift_on_arc(int k, int m, cplx z, int steps = 200) {
    const int kp = ((k - 1) % 4) + 1;
    const SurfacePoint start = marked_point(kp, m);
    std::vector<cplx> path;
    path.reserve(steps + 1);
    if (k <= 4) {
        // Rays a_1..a_4 through z_kp = z/|z| direction; interpolate radius.
        const double r0 = 1.0, r1 = std::abs(z);
        const cplx dir = start.z;
        for (int i = 0; i <= steps; ++i)
            path.push_back(dir * (r0 + (r1 - r0) * i / double(steps)));
    } else {
        // Circle arcs: interpolate the angle.
        const double a0 = std::arg(start.z);
        double a1 = std::arg(z);
        // Stay on the short way around (arcs span pi/2, marked point inside).
        while (a1 - a0 > pi) a1 -= 2 * pi;
        while (a0 - a1 > pi) a1 += 2 * pi;
        for (int i = 0; i <= steps; ++i)
            path.push_back(std::polar(1.0, a0 + (a1 - a0) * i / double(steps)));
    }
    return lift_along_path(path, start).back();
}

} // namespace halfdisk::covering

#endif
