#include "drop/geometry.hpp"

#include <cmath>

namespace drop {

namespace {
constexpr double kStarMargin = 1e-6;
}

SurfaceGeometry build_geometry(const BasisTable& tab, const SphCoeffs& h) {
    SurfaceGeometry g;
    g.h = h;
    g.h_grid = synthesize(tab, h);
    for (int k = 0; k < g.h_grid.size(); ++k) {
        if (1.0 + g.h_grid.data()[k] < kStarMargin)
            throw domain_degenerate("build_geometry: surface is not star-shaped (1 + h <= margin)");
    }
    g.grad_h = tangential_gradient(tab, h);
    g.grad_h_sq = dot(g.grad_h, g.grad_h);
    g.J = GridField(tab.ntheta, tab.nphi);
    g.normal = VectorGridField(tab.ntheta, tab.nphi);
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            double r = 1.0 + g.h_grid.at(i, j);
            double jj = std::sqrt(r * r + g.grad_h_sq.at(i, j));
            g.J.at(i, j) = jj;
            Vec3 x = tab.node_position(i, j);
            Vec3 gh = g.grad_h.at(i, j);
            g.normal.set(i, j, {(r * x[0] - gh[0]) / jj, (r * x[1] - gh[1]) / jj,
                                (r * x[2] - gh[2]) / jj});
        }
    }
    return g;
}

GridField mean_curvature(const BasisTable& tab, const SurfaceGeometry& g) {
    GridField lap_h = synthesize(tab, laplace_beltrami(g.h));
    GridField hess_hh = hessian_quadratic_form(tab, g.h, g.grad_h, g.grad_h);
    GridField H(tab.ntheta, tab.nphi);
    for (int k = 0; k < H.size(); ++k) {
        double r = 1.0 + g.h_grid.data()[k];
        double J = g.J.data()[k];
        double J3 = J * J * J;
        H.data()[k] = -lap_h.data()[k] / (r * J) + 2.0 / J + hess_hh.data()[k] / (r * J3) +
                      g.grad_h_sq.data()[k] / J3;
    }
    return H;
}

GridField surface_laplacian_pullback(const BasisTable& tab, const SurfaceGeometry& g,
                                     const SphCoeffs& f) {
    GridField lap_f = synthesize(tab, laplace_beltrami(f));
    VectorGridField grad_f = tangential_gradient(tab, f);
    GridField hess_fhh = hessian_quadratic_form(tab, f, g.grad_h, g.grad_h);
    GridField grad_fh = dot(grad_f, g.grad_h);
    GridField H = mean_curvature(tab, g);
    GridField out(tab.ntheta, tab.nphi);
    for (int k = 0; k < out.size(); ++k) {
        double r = 1.0 + g.h_grid.data()[k];
        double J = g.J.data()[k];
        out.data()[k] = lap_f.data()[k] / (r * r) - hess_fhh.data()[k] / (r * r * J * J) -
                        2.0 * grad_fh.data()[k] / (r * J * J) +
                        H.data()[k] * grad_fh.data()[k] / (r * J);
    }
    return out;
}

double area(const BasisTable& tab, const SphCoeffs& h) {
    SurfaceGeometry g = build_geometry(tab, h);
    GridField integrand(tab.ntheta, tab.nphi);
    for (int k = 0; k < integrand.size(); ++k)
        integrand.data()[k] = (1.0 + g.h_grid.data()[k]) * g.J.data()[k];
    return integrate(tab, integrand);
}

double volume(const BasisTable& tab, const SphCoeffs& h) {
    GridField hg = synthesize(tab, h);
    GridField integrand(tab.ntheta, tab.nphi);
    for (int k = 0; k < integrand.size(); ++k) {
        double r = 1.0 + hg.data()[k];
        if (r < kStarMargin) throw domain_degenerate("volume: surface is not star-shaped");
        integrand.data()[k] = r * r * r / 3.0;
    }
    return integrate(tab, integrand);
}

GridField normal_velocity_factor(const SurfaceGeometry& g) {
    GridField out(g.J.ntheta(), g.J.nphi());
    for (int k = 0; k < out.size(); ++k)
        out.data()[k] = (1.0 + g.h_grid.data()[k]) / g.J.data()[k];
    return out;
}

}  // namespace drop
