#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "halfdisk/geometry.hpp"

using namespace halfdisk;

TEST_CASE("canonical partition t = pi/4 matches the fixed split") {
    const auto bp = make_partition(pi / 4);
    REQUIRE(bp.segments.size() == 5);
    // Lower diameter Dirichlet, arc window (pi/4, 3pi/4) Dirichlet.
    const auto diri = bp.dirichlet_segments();
    REQUIRE(diri.size() == 2);
    CHECK(diri[0].where == SegmentKind::DiameterLower);
    CHECK(diri[1].where == SegmentKind::Arc);
    CHECK(diri[1].a == Catch::Approx(pi / 4).margin(1e-15));
    CHECK(diri[1].b == Catch::Approx(3 * pi / 4).margin(1e-15));
}

TEST_CASE("swapped partition exchanges segment kinds exactly") {
    const auto a = make_partition(pi / 4);
    const auto b = make_partition(pi / 4, true);
    REQUIRE(a.segments.size() == b.segments.size());
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        CHECK(a.segments[i].where == b.segments[i].where);
        CHECK(a.segments[i].a == b.segments[i].a);
        CHECK(a.segments[i].b == b.segments[i].b);
        CHECK(a.segments[i].bc != b.segments[i].bc);
    }
}

TEST_CASE("t = pi/3 gives a 2pi/3 arc window") {
    const auto bp = make_partition(pi / 3);
    const auto diri = bp.dirichlet_segments();
    CHECK(diri[1].a == Catch::Approx(pi / 6).margin(1e-15));
    CHECK(diri[1].b == Catch::Approx(5 * pi / 6).margin(1e-15));
    CHECK(diri[1].b - diri[1].a == Catch::Approx(2 * pi / 3).margin(1e-14));
}

TEST_CASE("partition parameter is validated") {
    CHECK_THROWS_AS(make_partition(0.0), std::domain_error);
    CHECK_THROWS_AS(make_partition(pi / 2), std::domain_error);
    CHECK_THROWS_AS(make_partition(-0.3), std::domain_error);
}

TEST_CASE("total boundary measure is pi + 2 for every t") {
    for (double t : {0.1, pi / 4, 1.0, 1.5}) {
        const auto bp = make_partition(t);
        double total = 0;
        for (const auto& s : bp.segments) total += s.b - s.a;
        CHECK(total == Catch::Approx(pi + 2).margin(1e-12));
    }
}

TEST_CASE("boundary point classification") {
    const auto bp = make_partition(pi / 4);
    CHECK(classify_boundary_point({0.5, 0.0}, bp) == PointClass::Dirichlet);
    CHECK(classify_boundary_point({-0.5, 0.0}, bp) == PointClass::Neumann);
    CHECK(classify_boundary_point({0.0, 1.0}, bp) == PointClass::Dirichlet);
    CHECK(classify_boundary_point({std::cos(pi / 4), std::sin(pi / 4)}, bp) ==
          PointClass::Junction);
    CHECK(classify_boundary_point({0.0, 0.0}, bp) == PointClass::Junction);
    CHECK(classify_boundary_point({1.0, 0.0}, bp) == PointClass::Junction);
    // (-1,0) separates two Neumann pieces, so it keeps the Neumann label.
    CHECK(classify_boundary_point({-1.0, 0.0}, bp) == PointClass::Neumann);
    CHECK(classify_boundary_point({std::cos(0.2), std::sin(0.2)}, bp) == PointClass::Neumann);
    CHECK_THROWS_AS(classify_boundary_point({0.3, 0.3}, bp), std::domain_error);
}

TEST_CASE("conformal weight values") {
    CHECK(weight_at(0.0) == 4.0);
    CHECK(weight_at(1.0) == 1.0);
    CHECK(weight_at(1.0 / std::sqrt(3.0)) == Catch::Approx(9.0 / 4).margin(1e-14));
    CHECK_THROWS_AS(weight_at(-0.1), std::domain_error);
}

TEST_CASE("weighted area of the half-disk is pi") {
    // Independent oracle: composite Simpson for the radial integral
    // pi * int_0^1 w(r) r dr.
    const int n = 20000;
    const double h = 1.0 / n;
    double sum = 0;
    auto f = [](double r) { return weight_at(r) * r; };
    for (int i = 0; i < n; ++i)
        sum += h / 6 * (f(i * h) + 4 * f((i + 0.5) * h) + f((i + 1) * h));
    CHECK(pi * sum == Catch::Approx(pi).margin(1e-10));
}

TEST_CASE("stereographic projection basics") {
    const auto pole = stereo_to_sphere({0.0, 0.0});
    CHECK(std::abs(pole.xyz[2] + 1.0) < 1e-15); // z = 0 maps to a pole
    const auto eq = stereo_to_sphere(std::polar(1.0, 0.7));
    CHECK(eq.phi == Catch::Approx(pi / 2).margin(1e-12)); // unit circle to equator
}

TEST_CASE("stereo round-trip identity on 1000 random points") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> rad(0.0, 1.0), ang(0.0, pi);
    for (int i = 0; i < 1000; ++i) {
        const std::complex<double> z = std::polar(rad(rng), ang(rng));
        const auto back = sphere_to_stereo(stereo_to_sphere(z));
        CHECK(std::abs(back - z) < 1e-12);
    }
}

TEST_CASE("pullback of the round metric equals the conformal weight") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> rad(0.05, 0.95), ang(0.1, pi - 0.1);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const std::complex<double> z = std::polar(rad(rng), ang(rng));
        const auto a = stereo_to_sphere(z);
        const auto b = stereo_to_sphere(z + h);
        double d2 = 0;
        for (int c = 0; c < 3; ++c) d2 += (b.xyz[c] - a.xyz[c]) * (b.xyz[c] - a.xyz[c]);
        CHECK(std::sqrt(d2) / h ==
              Catch::Approx(std::sqrt(weight_at(std::abs(z)))).epsilon(1e-4));
    }
}
