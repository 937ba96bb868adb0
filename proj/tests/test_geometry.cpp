#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "drop/geometry.hpp"
#include "test_util.hpp"

using namespace drop;

namespace {

SphCoeffs constant_h(int lmax, double c) {
    SphCoeffs h(lmax);
    h.at(0, 0) = c * std::sqrt(4.0 * M_PI);
    return h;
}

}  // namespace

TEST_CASE("flat and radially scaled geometry") {
    BasisTable tab = build_basis(10, 1.5);
    SurfaceGeometry g = build_geometry(tab, SphCoeffs(10));
    CHECK(test::max_abs(g.grad_h_sq) < 1e-24);
    for (int k = 0; k < g.J.size(); ++k) CHECK(g.J.data()[k] == doctest::Approx(1.0));
    double ndefect = 0.0;
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            Vec3 n = g.normal.at(i, j);
            Vec3 x = tab.node_position(i, j);
            for (int k = 0; k < 3; ++k) ndefect = std::max(ndefect, std::abs(n[k] - x[k]));
        }
    }
    CHECK(ndefect < 1e-13);

    SurfaceGeometry gc = build_geometry(tab, constant_h(10, 0.5));
    for (int k = 0; k < gc.J.size(); ++k) CHECK(gc.J.data()[k] == doctest::Approx(1.5));
}

TEST_CASE("normal has unit length for random h") {
    BasisTable tab = build_basis(12, 1.5);
    SphCoeffs h = test::random_coeffs(12, 8, 0.1, 5);
    SurfaceGeometry g = build_geometry(tab, h);
    double worst = 0.0;
    for (int i = 0; i < tab.ntheta; ++i)
        for (int j = 0; j < tab.nphi; ++j)
            worst = std::max(worst,
                             std::abs(std::sqrt(dot(g.normal.at(i, j), g.normal.at(i, j))) - 1.0));
    CHECK(worst < 1e-12);
}

TEST_CASE("degenerate surface is rejected") {
    BasisTable tab = build_basis(8, 1.5);
    CHECK_THROWS_AS(build_geometry(tab, constant_h(8, -1.0)), domain_degenerate);
    CHECK_THROWS_AS(build_geometry(tab, constant_h(8, -2.0)), domain_degenerate);
}

TEST_CASE("mean curvature of spheres") {
    BasisTable tab = build_basis(12, 1.5);
    SurfaceGeometry g0 = build_geometry(tab, SphCoeffs(12));
    GridField H0 = mean_curvature(tab, g0);
    for (int k = 0; k < H0.size(); ++k) CHECK(H0.data()[k] == doctest::Approx(2.0));

    SurfaceGeometry gc = build_geometry(tab, constant_h(12, 0.5));
    GridField Hc = mean_curvature(tab, gc);
    for (int k = 0; k < Hc.size(); ++k)
        CHECK(Hc.data()[k] == doctest::Approx(4.0 / 3.0).epsilon(1e-10));

    for (double c : {-0.3, 0.2, 1.0}) {
        SurfaceGeometry gg = build_geometry(tab, constant_h(12, c));
        GridField H = mean_curvature(tab, gg);
        for (int k = 0; k < H.size(); ++k)
            CHECK(std::abs(H.data()[k] - 2.0 / (1.0 + c)) < 1e-10);
    }
}

TEST_CASE("mean curvature linearization H'(0) = (l(l+1) - 2)") {
    BasisTable tab = build_basis(12, 1.5);
    double eps = 1e-4;
    SphCoeffs h(12);
    h.at(2, 0) = eps;
    SurfaceGeometry g = build_geometry(tab, h);
    GridField H = mean_curvature(tab, g);
    SphCoeffs unit(12);
    unit.at(2, 0) = 1.0;
    GridField mode = synthesize(tab, unit);
    // H - 2 ~ eps (l(l+1) - 2) phi_{2,0} = 4 eps phi_{2,0}
    double worst = 0.0;
    for (int k = 0; k < H.size(); ++k)
        worst = std::max(worst, std::abs(H.data()[k] - 2.0 - 4.0 * eps * mode.data()[k]));
    CHECK(worst < 50.0 * eps * eps);
}

TEST_CASE("surface laplacian pullback") {
    BasisTable tab = build_basis(12, 1.5);
    SurfaceGeometry g0 = build_geometry(tab, SphCoeffs(12));
    SphCoeffs f(12);
    f.at(2, 1) = 1.0;
    GridField lap = surface_laplacian_pullback(tab, g0, f);
    GridField expect = synthesize(tab, laplace_beltrami(f));
    double worst = 0.0;
    for (int k = 0; k < lap.size(); ++k)
        worst = std::max(worst, std::abs(lap.data()[k] - expect.data()[k]));
    CHECK(worst < 1e-11);

    SurfaceGeometry gc = build_geometry(tab, constant_h(12, 0.5));
    SphCoeffs f2(12);
    f2.at(3, -2) = 1.0;
    GridField lap2 = surface_laplacian_pullback(tab, gc, f2);
    GridField mode = synthesize(tab, f2);
    double worst2 = 0.0;
    for (int k = 0; k < lap2.size(); ++k)
        worst2 =
            std::max(worst2, std::abs(lap2.data()[k] + 12.0 * mode.data()[k] / (1.5 * 1.5)));
    CHECK(worst2 < 1e-10);

    SphCoeffs fc(12);
    fc.at(0, 0) = 2.0;
    SphCoeffs hr = test::random_coeffs(12, 6, 0.05, 11);
    SurfaceGeometry gr = build_geometry(tab, hr);
    GridField lapc = surface_laplacian_pullback(tab, gr, fc);
    CHECK(test::max_abs(lapc) < 1e-11);
}

TEST_CASE("two equivalent forms of the pulled-back laplacian agree") {
    BasisTable tab = build_basis(14, 1.5);
    SphCoeffs h = test::random_coeffs(14, 7, 0.05, 23);
    SphCoeffs f = test::random_coeffs(14, 7, 1.0, 24);
    SurfaceGeometry g = build_geometry(tab, h);
    GridField direct_form = surface_laplacian_pullback(tab, g, f);

    auto L_h = [&](const SphCoeffs& u) {
        GridField lap = synthesize(tab, laplace_beltrami(u));
        GridField hq = hessian_quadratic_form(tab, u, g.grad_h, g.grad_h);
        GridField out(tab.ntheta, tab.nphi);
        for (int k = 0; k < out.size(); ++k) {
            double J = g.J.data()[k];
            out.data()[k] = lap.data()[k] - hq.data()[k] / (J * J);
        }
        return out;
    };
    GridField Lf = L_h(f), Lh = L_h(h);
    GridField gfgh = dot(tangential_gradient(tab, f), g.grad_h);
    double worst = 0.0;
    for (int k = 0; k < Lf.size(); ++k) {
        double r = 1.0 + g.h_grid.data()[k];
        double J = g.J.data()[k];
        double other = Lf.data()[k] / (r * r) +
                       (-Lh.data()[k] / (r * r * J * J) +
                        g.grad_h_sq.data()[k] / (r * J * J * J * J)) *
                           gfgh.data()[k];
        worst = std::max(worst, std::abs(other - direct_form.data()[k]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("area and volume") {
    BasisTable tab = build_basis(12, 1.5);
    CHECK(area(tab, SphCoeffs(12)) == doctest::Approx(4.0 * M_PI).epsilon(1e-13));
    CHECK(volume(tab, SphCoeffs(12)) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-13));
    double c = 0.3;
    CHECK(area(tab, constant_h(12, c)) ==
          doctest::Approx(4.0 * M_PI * (1 + c) * (1 + c)).epsilon(1e-13));
    CHECK(volume(tab, constant_h(12, c)) ==
          doctest::Approx(4.0 * M_PI / 3.0 * std::pow(1 + c, 3)).epsilon(1e-13));

    SphCoeffs h(12);
    h.at(2, 0) = 0.1;
    BasisTable fine = build_basis(48, 2.0);
    double v_fine = volume(fine, h.truncated(48));
    CHECK(std::abs(volume(tab, h) - v_fine) < 1e-10);
}

TEST_CASE("area directional derivative equals the curvature pairing") {
    BasisTable tab = build_basis(12, 1.5);
    SphCoeffs h = test::random_coeffs(12, 5, 0.05, 31);
    SphCoeffs eta = test::random_coeffs(12, 5, 1.0, 32);
    double eps = 1e-5;
    double d_area = (area(tab, h + eps * eta) - area(tab, h - eps * eta)) / (2.0 * eps);
    SurfaceGeometry g = build_geometry(tab, h);
    GridField H = mean_curvature(tab, g);
    GridField eta_grid = synthesize(tab, eta);
    GridField integrand(tab.ntheta, tab.nphi);
    for (int k = 0; k < integrand.size(); ++k) {
        double r = 1.0 + g.h_grid.data()[k];
        integrand.data()[k] = eta_grid.data()[k] * r * r * H.data()[k];
    }
    double pairing = integrate(tab, integrand);
    CHECK(d_area == doctest::Approx(pairing).epsilon(1e-6));
}

TEST_CASE("normal velocity factor") {
    BasisTable tab = build_basis(10, 1.5);
    SurfaceGeometry g0 = build_geometry(tab, SphCoeffs(10));
    GridField f0 = normal_velocity_factor(g0);
    for (int k = 0; k < f0.size(); ++k) CHECK(f0.data()[k] == doctest::Approx(1.0));
    SurfaceGeometry gc = build_geometry(tab, constant_h(10, 0.7));
    GridField fc = normal_velocity_factor(gc);
    for (int k = 0; k < fc.size(); ++k) CHECK(fc.data()[k] == doctest::Approx(1.0));
    SphCoeffs h = test::random_coeffs(10, 6, 0.05, 41);
    SurfaceGeometry gr = build_geometry(tab, h);
    GridField fr = normal_velocity_factor(gr);
    for (int k = 0; k < fr.size(); ++k) {
        double kin = gr.J.data()[k] / (1.0 + gr.h_grid.data()[k]);
        CHECK(fr.data()[k] * kin == doctest::Approx(1.0).epsilon(1e-12));
    }
}
