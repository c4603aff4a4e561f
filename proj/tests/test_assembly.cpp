#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "halfdisk/assembly.hpp"
#include "halfdisk/mesh.hpp"

using namespace halfdisk;

namespace {
TriMesh reference_triangle() {
    TriMesh m;
    m.vertices = {{0, 0}, {1, 0}, {0, 1}};
    m.triangles = {{0, 1, 2}};
    m.boundary_edges = {{0, 1, BcKind::Neumann, false},
                        {1, 2, BcKind::Neumann, false},
                        {2, 0, BcKind::Neumann, false}};
    return m;
}

Eigen::MatrixXd dense(const SparseSym& s) { return Eigen::MatrixXd(s.eigen()); }
} // namespace

TEST_CASE("conforming stiffness on the reference triangle") {
    const auto A = dense(assemble_stiffness(reference_triangle(), ElementKind::Conforming));
    Eigen::MatrixXd K(3, 3);
    K << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    K *= 0.5;
    CHECK((A - K).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("nonconforming stiffness is four times the conforming one") {
    const auto m = reference_triangle();
    const auto Ac = dense(assemble_stiffness(m, ElementKind::Conforming));
    const auto An = dense(assemble_stiffness(m, ElementKind::Nonconforming));
    // Local DOF j sits on the edge opposite vertex j, with gradient
    // -2 grad lambda_j; the global edge enumeration (sorted vertex pairs)
    // reverses the local order on this triangle.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(An(2 - i, 2 - j) == Catch::Approx(4.0 * Ac(i, j)).margin(1e-14));
}

TEST_CASE("conforming unit-weight mass on the reference triangle") {
    const auto m = reference_triangle();
    const auto B = dense(assemble_mass(m, ElementKind::Conforming, quadrature_rule(4),
                                       unit_weight));
    Eigen::MatrixXd M(3, 3);
    M << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    M *= 1.0 / 24.0; // area/12 * (1 + delta_ij)
    CHECK((B - M).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("nonconforming unit-weight mass is diagonal area/3") {
    const auto m = reference_triangle();
    const auto B = dense(assemble_mass(m, ElementKind::Nonconforming, quadrature_rule(4),
                                       unit_weight));
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3) / 6.0; // area = 1/2
    CHECK((B - M).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("assembled matrices are exactly symmetric with zero-sum stiffness rows") {
    const auto bp = make_partition(pi / 4);
    const TriMesh m = generate_initial(bp, 288);
    for (ElementKind fam : {ElementKind::Conforming, ElementKind::Nonconforming}) {
        const auto A = assemble_stiffness(m, fam);
        const auto B = assemble_mass(m, fam, quadrature_rule(4));
        CHECK(A.symmetry_error() <= 1e-14);
        CHECK(B.symmetry_error() <= 1e-14);
        // Constants lie in the kernel of the stiffness form.
        const Eigen::VectorXd r = A.eigen() * Eigen::VectorXd::Ones(A.dim());
        CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
        // The weighted mass is positive definite.
        const Eigen::VectorXd x = Eigen::VectorXd::Random(B.dim());
        CHECK(x.dot(B.eigen() * x) > 0);
    }
}

TEST_CASE("total weighted mass approaches pi under refinement") {
    const auto bp = make_partition(pi / 4);
    TriMesh m = generate_initial(bp, 288);
    double prev_gap = 1e30;
    for (int l = 0; l < 3; ++l) {
        const auto B = assemble_mass(m, ElementKind::Conforming, quadrature_rule(4));
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(B.dim());
        const double total = ones.dot(B.eigen() * ones);
        const double gap = std::abs(total - pi);
        CHECK(total < pi); // polygonal domain is strictly inside the disk
        CHECK(gap < prev_gap);
        prev_gap = gap;
        m = refine(m);
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("mass assembly insists on a degree >= 4 rule") {
    CHECK_THROWS_AS(
        assemble_mass(reference_triangle(), ElementKind::Conforming, quadrature_rule(2)),
        ConfigError);
}

TEST_CASE("degenerate triangles are rejected") {
    TriMesh m;
    m.vertices = {{0, 0}, {1, 0}, {2, 0}};
    m.triangles = {{0, 1, 2}};
    CHECK_THROWS_AS(assemble_stiffness(m, ElementKind::Conforming), IntegrityError);
}

TEST_CASE("Dirichlet elimination removes exactly the tagged DOFs") {
    const auto bp = make_partition(pi / 4);
    const TriMesh m = generate_initial(bp, 288);
    const auto masks = boundary_dof_masks(m, ElementKind::Conforming);
    const auto A = assemble_stiffness(m, ElementKind::Conforming);
    const auto B = assemble_mass(m, ElementKind::Conforming, quadrature_rule(4));
    const auto red = eliminate_dirichlet(A, B, masks.dirichlet);
    CHECK(red.A.dim() == masks.total - static_cast<int>(masks.dirichlet.size()));
    CHECK(red.B.dim() == red.A.dim());
    const Eigen::VectorXd full = red.map.restore(Eigen::VectorXd::Ones(red.A.dim()));
    for (int d : masks.dirichlet) CHECK(full[d] == 0.0);
    for (int f : masks.free) CHECK(full[f] == 1.0);
    std::vector<int> all(masks.total);
    for (int i = 0; i < masks.total; ++i) all[i] = i;
    CHECK_THROWS_AS(eliminate_dirichlet(A, B, all), ConfigError);
}

TEST_CASE("error functional equals the quadrature-upgrade defect") {
    const auto bp = make_partition(pi / 4);
    const TriMesh m = generate_initial(bp, 288);
    for (ElementKind fam : {ElementKind::Conforming, ElementKind::Nonconforming}) {
        const auto masks = boundary_dof_masks(m, fam);
        const auto A = assemble_stiffness(m, fam);
        const auto B4 = assemble_mass(m, fam, quadrature_rule(4));
        const auto B7 = assemble_mass(m, fam, quadrature_rule(7));
        // Any full vector with zero Dirichlet entries works; use a smooth bump.
        Eigen::VectorXd v = Eigen::VectorXd::Zero(masks.total);
        for (int f : masks.free) v[f] = 1.0 + 0.1 * std::sin(0.37 * f);
        const double a = v.dot(A.eigen() * v);
        const double b4 = v.dot(B4.eigen() * v);
        const double lambda = a / b4; // makes the degree-4 defect vanish
        const double expected = a - lambda * v.dot(B7.eigen() * v);
        const double got = err_functional(lambda, v, m, fam);
        CHECK(got == Catch::Approx(expected).margin(1e-10 * (1 + std::abs(expected))));
    }
}
