#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "halfdisk/study.hpp"

using namespace halfdisk;

TEST_CASE("conforming eigenvalue decreases under refinement at t = pi/4") {
    const auto bp = make_partition(pi / 4);
    RunOptions opts;
    opts.target_triangles = 288;
    const auto recs = run_convergence(ElementKind::Conforming, bp, 3, 0.0, opts);
    REQUIRE(recs.size() == 3);
    for (std::size_t i = 1; i < recs.size(); ++i) {
        CHECK(recs[i].lambda < recs[i - 1].lambda);
        CHECK(std::abs(recs[i].err) < std::abs(recs[i - 1].err));
    }
    CHECK(recs.back().lambda > 2.2);
    CHECK(recs.front().lambda < 2.6);
}

TEST_CASE("nonconforming eigenvalue increases and stays below conforming") {
    const auto bp = make_partition(pi / 4);
    RunOptions opts;
    opts.target_triangles = 288;
    const auto nc = run_convergence(ElementKind::Nonconforming, bp, 3, 0.0, opts);
    const auto c = run_convergence(ElementKind::Conforming, bp, 3, 0.0, opts);
    REQUIRE(nc.size() == 3);
    for (std::size_t i = 1; i < nc.size(); ++i) CHECK(nc[i].lambda > nc[i - 1].lambda);
    for (std::size_t i = 0; i < nc.size(); ++i) CHECK(nc[i].lambda < c[i].lambda);
}

TEST_CASE("convergence driver validates the level count") {
    const auto bp = make_partition(pi / 4);
    CHECK_THROWS_AS(run_convergence(ElementKind::Conforming, bp, 0, 0.0), ConfigError);
    CHECK_THROWS_AS(run_convergence(ElementKind::Conforming, bp, 99, 0.0), ConfigError);
}

TEST_CASE("extrapolation recovers a synthetic geometric sequence") {
    std::vector<ConvergenceRecord> recs;
    for (int l = 0; l < 4; ++l) {
        ConvergenceRecord r;
        r.level = l;
        r.lambda = 2.0 + 3.0 * std::pow(4.0, -l); // order p = 2
        recs.push_back(r);
    }
    const auto ex = extrapolate(recs);
    REQUIRE(ex.lambda_inf.has_value());
    CHECK(*ex.lambda_inf == Catch::Approx(2.0).margin(1e-12));
    CHECK(ex.rate == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("extrapolation declines a non-monotone tail") {
    std::vector<ConvergenceRecord> recs(3);
    recs[0].lambda = 2.3;
    recs[1].lambda = 2.2;
    recs[2].lambda = 2.25;
    const auto ex = extrapolate(recs);
    CHECK_FALSE(ex.lambda_inf.has_value());
    CHECK_THROWS_AS(extrapolate({recs[0], recs[1]}), std::domain_error);
}

TEST_CASE("extrapolating the frozen reference tail lands near 2.275") {
    // A frozen first-order reference tail: three successive uniform refinements.
    std::vector<ConvergenceRecord> recs(3);
    recs[0].lambda = 2.29039772121374;
    recs[1].lambda = 2.28276090970583;
    recs[2].lambda = 2.27895954902635;
    const auto ex = extrapolate(recs);
    REQUIRE(ex.lambda_inf.has_value());
    CHECK(ex.rate == Catch::Approx(1.0).margin(0.05));
    CHECK(*ex.lambda_inf > 2.270);
    CHECK(*ex.lambda_inf < 2.280);
}

TEST_CASE("sweep handles good and bad parameters in one pass") {
    RunOptions opts;
    opts.target_triangles = 120;
    const auto recs = sweep_t({pi / 4, 2.0}, 0, ElementKind::Conforming, opts);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].error.empty());
    CHECK(std::isfinite(recs[0].lambda_13));
    CHECK(std::isfinite(recs[0].lambda_14));
    CHECK(recs[0].lambda_min() <= recs[0].lambda_13);
    CHECK_FALSE(recs[1].error.empty()); // t = 2.0 is outside (0, pi/2)
}

TEST_CASE("both sweep variants agree at the self-symmetric point t = pi/4") {
    RunOptions opts;
    opts.target_triangles = 200;
    const auto rec = solve_sweep_point(pi / 4, 1, ElementKind::Conforming, opts);
    // The swap is an exact isometry of the continuous problem; discretely the
    // two values differ only by the mesh asymmetry.
    CHECK(rec.lambda_13 == Catch::Approx(rec.lambda_14).margin(0.05));
}

TEST_CASE("the eigenvalue is monotone along a coarse t-sweep") {
    RunOptions opts;
    opts.target_triangles = 120;
    std::vector<double> ts;
    for (int i = 1; i <= 5; ++i) ts.push_back(i * pi / 12.0);
    const auto recs = sweep_t(ts, 0, ElementKind::Conforming, opts);
    for (std::size_t i = 0; i < recs.size(); ++i) REQUIRE(recs[i].error.empty());
    for (std::size_t i = 1; i < recs.size(); ++i)
        CHECK(recs[i].lambda_13 > recs[i - 1].lambda_13);
}

TEST_CASE("critical t bisection brackets the crossing") {
    RunOptions opts;
    opts.target_triangles = 120;
    const auto hit = find_critical_t(2.0, {0.15, pi / 4}, 0, 1e-3,
                                     ElementKind::Conforming, opts);
    CHECK(hit.t_star > 0.15);
    CHECK(hit.t_star < pi / 4);
    CHECK(hit.lambda_at_star == Catch::Approx(2.0).margin(0.05));
    CHECK(hit.evaluations >= 3);
    CHECK_THROWS_AS(
        find_critical_t(99.0, {0.15, pi / 4}, 0, 1e-3, ElementKind::Conforming, opts),
        BracketError);
}

TEST_CASE("swap report shrinks the spectral gap under refinement") {
    RunOptions opts;
    opts.target_triangles = 200;
    const auto rows = swap_isospectrality_report(2, 3, opts);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].lambda_13.size() == 3);
    REQUIRE(rows[1].lambda_14.size() == 3);
    CHECK(rows[0].level + 1 == rows[1].level);
    CHECK(rows[1].gap(0) < 0.05);
    CHECK_THROWS_AS(swap_isospectrality_report(0, 3, opts), ConfigError);
    CHECK_THROWS_AS(swap_isospectrality_report(2, 0, opts), ConfigError);
}

TEST_CASE("contour export emits one row per vertex, positive part first") {
    const auto bp = make_partition(pi / 4);
    RunOptions opts;
    opts.target_triangles = 120;
    TriMesh m = generate_initial(bp, opts.target_triangles, opts.grading);
    SolverConfig cfg;
    cfg.shift = default_shift(ElementKind::Conforming);
    const auto sol = solve_on_mesh(m, ElementKind::Conforming, cfg);
    const Eigen::VectorXd vfull = sol.map.restore(sol.eigs.front().vec);
    std::stringstream ss;
    contour_export(vfull, m, ElementKind::Conforming, ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "x,y,value");
    std::size_t rows = 0;
    double pos = 0, neg = 0;
    while (std::getline(ss, line) && line.rfind("#", 0) != 0) {
        ++rows;
        const auto c = line.rfind(',');
        const double v = std::stod(line.substr(c + 1));
        (v >= 0 ? pos : neg) += std::abs(v);
    }
    CHECK(rows == m.vertices.size());
    CHECK(pos >= neg);
}

TEST_CASE("CSV writers emit the documented headers") {
    std::vector<ConvergenceRecord> recs(1);
    std::stringstream a;
    write_convergence_csv(recs, a);
    CHECK(a.str().rfind("level,lambda,err,dofs,triangles,iterations,seconds\n", 0) == 0);
    std::vector<SweepRecord> srecs(1);
    std::stringstream b;
    write_sweep_csv(srecs, b);
    CHECK(b.str().rfind("t,lambda_13,lambda_14,lambda_min,level,error\n", 0) == 0);
}
