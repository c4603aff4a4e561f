#ifndef HALFDISK_GEOMETRY_HPP
#define HALFDISK_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "halfdisk/errors.hpp"

// The computational domain: the upper half of the unit disk,
// D = {(r, psi) : 0 < r < 1, 0 < psi < pi},
// carrying the conformal weight w(r) = 4/(1+r^2)^2 pulled back from the
// round sphere by stereographic projection. The boundary splits into a
// t-parameterized Dirichlet/Neumann partition: Dirichlet on the lower
// diameter ray psi=0 plus the arc window |psi - pi/2| < t, Neumann on the
// rest; the swapped variant exchanges the roles.

namespace halfdisk {

inline constexpr double pi = std::numbers::pi;

/// Absolute tolerance (arc-length, domain scale 1) for junction detection.
inline constexpr double junction_tol = 1e-12;

struct HalfDisk {
    double radius = 1.0;
};

enum class BcKind { Dirichlet, Neumann };

enum class PointClass { Dirichlet, Neumann, Junction };

enum class SegmentKind { DiameterLower, DiameterUpper, Arc };

/// One boundary piece. For diameter segments the interval [a,b] is radial
/// (r along the ray); for arc segments it is angular (psi).
struct BoundarySegment {
    SegmentKind where;
    double a;
    double b;
    BcKind bc;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct BoundaryPartition {
    double t = pi / 4;
    bool swapped = false;
    std::vector<BoundarySegment> segments;

    std::vector<BoundarySegment> dirichlet_segments() const {
        std::vector<BoundarySegment> out;
        for (const auto& s : segments)
            if (s.bc == BcKind::Dirichlet) out.push_back(s);
        return out;
    }
    std::vector<BoundarySegment> neumann_segments() const {
        std::vector<BoundarySegment> out;
        for (const auto& s : segments)
            if (s.bc == BcKind::Neumann) out.push_back(s);
        return out;
    }

    /// The four Dirichlet/Neumann interface points: origin, (1,0), and the
    /// two arc window ends at psi = pi/2 -+ t. Independent of `swapped`.
    std::array<Point2, 4> junction_points() const {
        return {Point2{0.0, 0.0}, Point2{1.0, 0.0},
                Point2{std::cos(pi / 2 - t), std::sin(pi / 2 - t)},
                Point2{std::cos(pi / 2 + t), std::sin(pi / 2 + t)}};
    }

    /// Total length of the Dirichlet part: 1 + 2t, or 1 + (pi - 2t) swapped.
    double dirichlet_length() const {
        double len = 0.0;
        for (const auto& s : segments)
            if (s.bc == BcKind::Dirichlet) len += s.b - s.a;
        return len;
    }
};

inline BoundaryPartition make_partition(double t, bool swapped = false) {
    if (!(t > 0.0 && t < pi / 2))
        throw std::domain_error("make_partition: t must lie in (0, pi/2)");
    BcKind d = swapped ? BcKind::Neumann : BcKind::Dirichlet;
    BcKind n = swapped ? BcKind::Dirichlet : BcKind::Neumann;
    BoundaryPartition bp;
    bp.t = t;
    bp.swapped = swapped;
    bp.segments = {
        {SegmentKind::DiameterLower, 0.0, 1.0, d},
        {SegmentKind::DiameterUpper, 0.0, 1.0, n},
        {SegmentKind::Arc, 0.0, pi / 2 - t, n},
        {SegmentKind::Arc, pi / 2 - t, pi / 2 + t, d},
        {SegmentKind::Arc, pi / 2 + t, pi, n},
    };
    return bp;
}

inline double weight_at(double r) {
    if (r < 0.0) throw std::domain_error("weight_at: r must be >= 0");
    double s = 1.0 + r * r;
    return 4.0 / (s * s);
}

/// Classifies a boundary point against the partition. Points within
/// `junction_tol` (arc-length) of a Dirichlet/Neumann interface are
/// Junction; segment interfaces with equal conditions on both sides keep
/// that condition.
inline PointClass classify_boundary_point(const Point2& p, const BoundaryPartition& bp) {
    const double r = std::hypot(p.x, p.y);
    const bool on_diam = std::abs(p.y) <= junction_tol && std::abs(p.x) <= 1.0 + junction_tol;
    const bool on_arc = std::abs(r - 1.0) <= junction_tol && p.y >= -junction_tol;
    if (!on_diam && !on_arc)
        throw std::domain_error("classify_boundary_point: point not on the boundary");

    // Diameter-end junctions first (they belong to both descriptions).
    if (std::hypot(p.x, p.y) <= junction_tol) return PointClass::Junction;         // origin
    if (std::hypot(p.x - 1.0, p.y) <= junction_tol) return PointClass::Junction;   // (1,0)

    if (on_diam && !on_arc) {
        // psi = 0 ray is the lower diameter; psi = pi ray the upper.
        SegmentKind k = p.x > 0 ? SegmentKind::DiameterLower : SegmentKind::DiameterUpper;
        for (const auto& s : bp.segments)
            if (s.where == k)
                return s.bc == BcKind::Dirichlet ? PointClass::Dirichlet : PointClass::Neumann;
    }

    // Arc point: classify by angle; window ends are junctions.
    double psi = std::atan2(p.y, p.x);
    if (psi < 0) psi = 0;
    if (std::abs(psi - (pi / 2 - bp.t)) <= junction_tol) return PointClass::Junction;
    if (std::abs(psi - (pi / 2 + bp.t)) <= junction_tol) return PointClass::Junction;
    for (const auto& s : bp.segments)
        if (s.where == SegmentKind::Arc && psi > s.a - junction_tol && psi < s.b + junction_tol)
            return s.bc == BcKind::Dirichlet ? PointClass::Dirichlet : PointClass::Neumann;
    throw std::domain_error("classify_boundary_point: unclassified arc angle");
}

/// A point of the unit sphere, both as a unit 3-vector and in spherical
/// angles (phi = polar angle from the projection pole, theta = azimuth).
struct SpherePoint {
    double phi;
    double theta;
    std::array<double, 3> xyz;
};

// Stereographic projection from the north pole (0,0,1) onto the equatorial
// plane (either pole gives the same conformal weight on the half-disk).
// z = 0 maps to the south pole, |z| = 1 to the equator.
inline SpherePoint stereo_to_sphere(std::complex<double> z) {
    const double n2 = std::norm(z);
    const double d = 1.0 + n2;
    std::array<double, 3> v{2.0 * z.real() / d, 2.0 * z.imag() / d, (n2 - 1.0) / d};
    return SpherePoint{std::acos(std::clamp(v[2], -1.0, 1.0)),
                       std::atan2(v[1], v[0]), v};
}

inline std::complex<double> sphere_to_stereo(const SpherePoint& s) {
    const double den = 1.0 - s.xyz[2];
    return {s.xyz[0] / den, s.xyz[1] / den};
}

} // namespace halfdisk

#endif
