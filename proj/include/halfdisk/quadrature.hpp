#ifndef HALFDISK_QUADRATURE_HPP
#define HALFDISK_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

// Symmetric Gauss rules on the reference triangle. Points are stored in
// barycentric coordinates; weights sum to 1, so a physical integral is
// area(T) * sum_q w_q f(x_q).

namespace halfdisk {

struct QuadraturePoint {
    std::array<double, 3> bary;
    double weight;
};

struct QuadratureRule {
    int degree = 0;
    std::vector<QuadraturePoint> points;
};

namespace detail {
inline void push_perm3(std::vector<QuadraturePoint>& pts, double a, double b, double c, double w) {
    pts.push_back({{a, b, c}, w});
    pts.push_back({{c, a, b}, w});
    pts.push_back({{b, c, a}, w});
}
inline void push_perm6(std::vector<QuadraturePoint>& pts, double a, double b, double c, double w) {
    pts.push_back({{a, b, c}, w});
    pts.push_back({{a, c, b}, w});
    pts.push_back({{b, a, c}, w});
    pts.push_back({{b, c, a}, w});
    pts.push_back({{c, a, b}, w});
    pts.push_back({{c, b, a}, w});
}
} // namespace detail

inline QuadratureRule quadrature_rule(int degree) {
    QuadratureRule r;
    if (degree <= 1) {
        r.degree = 1;
        r.points.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0});
    } else if (degree <= 2) {
        r.degree = 2;
        detail::push_perm3(r.points, 2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3);
    } else if (degree <= 4) {
        // Dunavant degree-4, 6 points.
        r.degree = 4;
        detail::push_perm3(r.points, 0.108103018168070, 0.445948490915965,
                           0.445948490915965, 0.223381589678011);
        detail::push_perm3(r.points, 0.816847572980459, 0.091576213509771,
                           0.091576213509771, 0.109951743655322);
    } else if (degree <= 7) {
        // Dunavant degree-7, 13 points (one negative weight).
        r.degree = 7;
        r.points.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, -0.149570044467670});
        detail::push_perm3(r.points, 0.479308067841923, 0.260345966079038,
                           0.260345966079038, 0.175615257433204);
        detail::push_perm3(r.points, 0.869739794195568, 0.065130102902216,
                           0.065130102902216, 0.053347235608839);
        detail::push_perm6(r.points, 0.638444188569809, 0.312865496004875,
                           0.048690315425316, 0.077113760890257);
    } else {
        throw std::invalid_argument("quadrature_rule: degree > 7 not available");
    }
    return r;
}

/// Exact integral of lambda1^a lambda2^b lambda3^c over the reference
/// triangle (area 1/2): a! b! c! 2 / (a+b+c+2)! ... normalized to measure 1.
inline double bary_monomial_exact(int a, int b, int c) {
    auto fact = [](int n) {
        double f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    // integral over reference triangle = a!b!c!*2*Area/(a+b+c+2)!; with the
    // rule's unit-measure normalization, divide by Area.
    return 2.0 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

/// Max error of the rule on all barycentric monomials up to its degree.
inline double quadrature_validation_error(const QuadratureRule& r) {
    double worst = 0.0;
    for (int a = 0; a <= r.degree; ++a)
        for (int b = 0; a + b <= r.degree; ++b) {
            const int c = r.degree - a - b; // fill total degree exactly or less
            for (int cc = 0; cc <= c; ++cc) {
                double s = 0.0;
                for (const auto& q : r.points)
                    s += q.weight * std::pow(q.bary[0], a) * std::pow(q.bary[1], b) *
                         std::pow(q.bary[2], cc);
                worst = std::max(worst, std::abs(s - bary_monomial_exact(a, b, cc)));
            }
        }
    return worst;
}

} // namespace halfdisk

#endif
