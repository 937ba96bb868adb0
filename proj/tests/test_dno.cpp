#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "drop/dno.hpp"
#include "test_util.hpp"

using namespace drop;

namespace {

SphCoeffs constant_h(int lmax, double c) {
    SphCoeffs h(lmax);
    h.at(0, 0) = c * std::sqrt(4.0 * M_PI);
    return h;
}

double rel_mode_error(const SphCoeffs& got, int l, int m, double expect) {
    double worst = 0.0;
    for (int ll = 0; ll <= got.lmax(); ++ll)
        for (int mm = -ll; mm <= ll; ++mm) {
            double want = (ll == l && mm == m) ? expect : 0.0;
            worst = std::max(worst, std::abs(got.at(ll, mm) - want));
        }
    return worst / std::abs(expect);
}

}  // namespace

TEST_CASE("matrix P for flat and scaled spheres") {
    BasisTable tab = build_basis(10, 1.5);
    BallCoefficientField P0 = assemble_P(tab, SphCoeffs(10));
    for (int k = 0; k < tab.ntheta * tab.nphi; ++k) {
        CHECK(P0.comp[0][k] == doctest::Approx(1.0));
        CHECK(P0.comp[3][k] == doctest::Approx(1.0));
        CHECK(P0.comp[5][k] == doctest::Approx(1.0));
        CHECK(std::abs(P0.comp[1][k]) < 1e-14);
        CHECK(std::abs(P0.comp[2][k]) < 1e-14);
        CHECK(std::abs(P0.comp[4][k]) < 1e-14);
    }
    BallCoefficientField Pc = assemble_P(tab, constant_h(10, 0.4));
    for (int k = 0; k < tab.ntheta * tab.nphi; ++k) {
        CHECK(Pc.comp[0][k] == doctest::Approx(1.4));
        CHECK(std::abs(Pc.comp[1][k]) < 1e-13);
    }
}

TEST_CASE("matrix P is positive definite for small h") {
    BasisTable tab = build_basis(12, 1.5);
    SphCoeffs h = test::random_coeffs(12, 8, 0.15, 7);
    BallCoefficientField P = assemble_P(tab, h);
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            Vec3 dirs[4] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.57, -0.57, 0.59}};
            for (const Vec3& d : dirs) {
                Vec3 Pd = P.apply(i, j, d);
                CHECK(dot(Pd, d) > 0.2);
            }
        }
    }
}

TEST_CASE("harmonic extension profiles") {
    BasisTable tab = build_basis(8, 1.5);
    DnoSolver solver(tab, 20);
    SphCoeffs psi(8);
    psi.at(3, 2) = 1.0;
    BallField u = solver.harmonic_extension(psi);
    const auto& r = solver.radial_points();
    for (int k = 0; k < solver.radial_nodes(); ++k)
        CHECK(u.at(SphCoeffs::index(3, 2), k) ==
              doctest::Approx(std::pow(r[k], 3)).epsilon(1e-13));

    SphCoeffs c(8);
    c.at(0, 0) = 2.0;
    BallField uc = solver.harmonic_extension(c);
    for (int k = 0; k < solver.radial_nodes(); ++k) CHECK(uc.at(0, k) == doctest::Approx(2.0));
}

TEST_CASE("radial poisson solver") {
    BasisTable tab = build_basis(8, 1.5);
    DnoSolver solver(tab, 24);
    int nr = solver.radial_nodes();
    const auto& r = solver.radial_points();

    // Delta u = -1 on the (0,0) mode: u = (1 - r^2)/6
    BallField rhs(8, nr);
    for (int k = 0; k < nr; ++k) rhs.at(0, k) = -1.0;
    BallField u = solver.poisson_solve_ball(rhs);
    for (int k = 0; k < nr; ++k)
        CHECK(u.at(0, k) == doctest::Approx((1.0 - r[k] * r[k]) / 6.0).epsilon(1e-12));

    BallField z(8, nr);
    BallField uz = solver.poisson_solve_ball(z);
    for (int k = 0; k < nr; ++k) CHECK(uz.at(0, k) == 0.0);

    // manufactured solution u* = (1 - r^2) r^2 phi_{2,0}: Delta u* = -14 r^2
    BallField rhs2(8, nr);
    int mode = SphCoeffs::index(2, 0);
    for (int k = 0; k < nr; ++k) rhs2.at(mode, k) = -14.0 * r[k] * r[k];
    BallField u2 = solver.poisson_solve_ball(rhs2);
    double worst = 0.0;
    for (int k = 0; k < nr; ++k) {
        double expect = (1.0 - r[k] * r[k]) * r[k] * r[k];
        worst = std::max(worst, std::abs(u2.at(mode, k) - expect));
    }
    CHECK(worst < 1e-8);

    // boundary derivative: d/dr (r^2 - r^4) at 1 = -2
    SphCoeffs d = solver.poisson_boundary_derivative(rhs2);
    CHECK(d.at(2, 0) == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("flat spectrum G(0) phi_lm = l phi_lm") {
    BasisTable tab = build_basis(16, 1.5);
    DnoSolver solver(tab);
    double worst = 0.0;
    for (int l = 1; l <= 14; ++l) {
        for (int m : {-l, 0, l / 2}) {
            SphCoeffs psi(16);
            psi.at(l, m) = 1.0;
            SphCoeffs g = solver.dirichlet_neumann(SphCoeffs(16), psi, DnoOptions{}).Gpsi;
            SphCoeffs expect(16);
            expect.at(l, m) = double(l);
            worst = std::max(worst, sobolev_norm(g - expect, 0.0));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("scaled sphere eigenvalues l/(1+c)") {
    BasisTable tab = build_basis(16, 1.5);
    DnoSolver solver(tab);
    SphCoeffs psi(16);
    psi.at(3, 2) = 1.0;
    SphCoeffs g = solver.dirichlet_neumann(constant_h(16, 0.1), psi, DnoOptions{}).Gpsi;
    CHECK(rel_mode_error(g, 3, 2, 3.0 / 1.1) < 1e-8);

    SphCoeffs psi2 = test::random_coeffs(16, 10, 1.0, 71);
    SphCoeffs g0 = solver.dirichlet_neumann(SphCoeffs(16), psi2, DnoOptions{}).Gpsi;
    SphCoeffs gc = solver.dirichlet_neumann(constant_h(16, 0.25), psi2, DnoOptions{}).Gpsi;
    SphCoeffs expect = (1.0 / 1.25) * g0;
    CHECK(sobolev_norm(gc - expect, 0.0) < 1e-8);
}

TEST_CASE("convergence failure outside the contraction regime") {
    BasisTable tab = build_basis(10, 1.5);
    DnoSolver solver(tab);
    SphCoeffs h(10);
    h.at(2, 0) = 0.9;  // |grad h| is O(1) here
    SphCoeffs psi(10);
    psi.at(2, 1) = 1.0;
    DnoOptions opts;
    opts.maxiter = 3;
    opts.tol = 1e-12;
    CHECK_THROWS_AS(solver.dirichlet_neumann(h, psi, opts), convergence_failure);
}

TEST_CASE("self-adjointness") {
    BasisTable tab = build_basis(16, 1.5);
    DnoSolver solver(tab);
    DnoOptions opts;

    SphCoeffs p1(16), p2(16);
    p1.at(1, 0) = 1.0;
    p2.at(2, 0) = 1.0;
    CHECK(solver.self_adjointness_defect(SphCoeffs(16), p1, p2, opts) < 1e-12);
    CHECK(solver.self_adjointness_defect(constant_h(16, 0.2), p1, p2, opts) < 1e-10);

    SphCoeffs h = test::random_coeffs(16, 8, 0.03, 101);
    h *= 0.05 / sobolev_norm(h, 3.0);
    SphCoeffs q1 = test::random_coeffs(16, 10, 1.0, 102);
    SphCoeffs q2 = test::random_coeffs(16, 10, 1.0, 103);
    CHECK(solver.self_adjointness_defect(h, q1, q2, opts) < 1e-8);
}

TEST_CASE("kinetic form is nonnegative") {
    BasisTable tab = build_basis(12, 1.5);
    DnoSolver solver(tab);
    SphCoeffs h = test::random_coeffs(12, 6, 0.05, 201);
    SurfaceGeometry g = build_geometry(tab, h);
    for (unsigned seed : {11u, 12u, 13u}) {
        SphCoeffs psi = test::random_coeffs(12, 9, 1.0, seed);
        SphCoeffs gp = solver.dirichlet_neumann(h, psi, DnoOptions{}).Gpsi;
        GridField pg = synthesize(tab, psi);
        GridField gg = synthesize(tab, gp);
        GridField integrand(tab.ntheta, tab.nphi);
        for (int k = 0; k < integrand.size(); ++k)
            integrand.data()[k] =
                pg.data()[k] * gg.data()[k] * (1.0 + g.h_grid.data()[k]) * g.J.data()[k];
        CHECK(integrate(tab, integrand) >= -1e-12);
    }
}

TEST_CASE("extraction formulas agree") {
    BasisTable tab = build_basis(14, 1.5);
    DnoSolver solver(tab);
    SphCoeffs h = test::random_coeffs(14, 7, 0.04, 301);
    SphCoeffs psi = test::random_coeffs(14, 9, 1.0, 302);
    DnoOptions opts;
    SphCoeffs g1 = solver.dirichlet_neumann(h, psi, opts).Gpsi;
    SphCoeffs g2 = solver.extract_via_P(h, psi, opts);
    CHECK(sobolev_norm(g1 - g2, 0.0) < 1e-9);
}

TEST_CASE("series and fixed point agree") {
    BasisTable tab = build_basis(14, 1.5);
    DnoSolver solver(tab);
    SphCoeffs h = test::random_coeffs(14, 7, 0.03, 401);
    h *= 0.05 / sobolev_norm(h, 3.0);
    SphCoeffs psi = test::random_coeffs(14, 9, 1.0, 402);
    DnoOptions fp;
    fp.tol = 1e-10;
    DnoOptions ser;
    ser.mode = DnoOptions::Mode::series;
    ser.series_order = 8;
    SphCoeffs g1 = solver.dirichlet_neumann(h, psi, fp).Gpsi;
    SphCoeffs g2 = solver.dirichlet_neumann(h, psi, ser).Gpsi;
    CHECK(sobolev_norm(g1 - g2, 0.0) < 1e-8);
}

TEST_CASE("warm start reproduces the cold solve") {
    BasisTable tab = build_basis(12, 1.5);
    DnoSolver solver(tab);
    SphCoeffs h = test::random_coeffs(12, 6, 0.04, 501);
    SphCoeffs psi = test::random_coeffs(12, 8, 1.0, 502);
    DnoOptions opts;
    BallField warm;
    SphCoeffs g1 = solver.dirichlet_neumann(h, psi, opts, &warm).Gpsi;
    DnoResult second = solver.dirichlet_neumann(h, psi, opts, &warm);
    CHECK(sobolev_norm(g1 - second.Gpsi, 0.0) < 1e-11);
    CHECK(second.iterations <= 2);
}
