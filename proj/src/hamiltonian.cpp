#include "drop/hamiltonian.hpp"

#include <cmath>

namespace drop {

EnergyBreakdown energy(const DnoSolver& dno, const SurfaceState& s, const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, s.h);
    SphCoeffs Gpsi = dno.dirichlet_neumann(s.h, s.psi, opts).Gpsi;
    GridField psi_grid = synthesize(tab, s.psi);
    GridField G_grid = synthesize(tab, Gpsi);
    GridField kin(tab.ntheta, tab.nphi), pot(tab.ntheta, tab.nphi);
    for (int n = 0; n < kin.size(); ++n) {
        double mu = (1.0 + g.h_grid.data()[n]) * g.J.data()[n];
        kin.data()[n] = 0.5 * psi_grid.data()[n] * G_grid.data()[n] * mu;
        pot.data()[n] = mu;
    }
    EnergyBreakdown e;
    e.kinetic = integrate(tab, kin);
    e.potential = integrate(tab, pot);
    e.sigma0 = s.sigma0;
    e.total = e.kinetic + s.sigma0 * e.potential;
    return e;
}

SphCoeffs grad_psi(const DnoSolver& dno, const SurfaceState& s, const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, s.h);
    SphCoeffs Gpsi = dno.dirichlet_neumann(s.h, s.psi, opts).Gpsi;
    GridField G_grid = synthesize(tab, Gpsi);
    GridField out(tab.ntheta, tab.nphi);
    for (int n = 0; n < out.size(); ++n)
        out.data()[n] = (1.0 + g.h_grid.data()[n]) * g.J.data()[n] * G_grid.data()[n];
    return analyze(tab, out);
}

namespace {

// d/dh K on the grid (closed form).
GridField grad_h_kinetic(const DnoSolver& dno, const SurfaceState& s, const SurfaceGeometry& g,
                         const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    SphCoeffs Gpsi = dno.dirichlet_neumann(s.h, s.psi, opts).Gpsi;
    GridField G_grid = synthesize(tab, Gpsi);
    VectorGridField grad_psi_f = tangential_gradient(tab, s.psi);
    GridField gp2 = dot(grad_psi_f, grad_psi_f);
    GridField gpgh = dot(grad_psi_f, g.grad_h);
    GridField out(tab.ntheta, tab.nphi);
    for (int n = 0; n < out.size(); ++n) {
        double r = 1.0 + g.h_grid.data()[n];
        double J = g.J.data()[n];
        double w = r * G_grid.data()[n] + gpgh.data()[n] / J;
        out.data()[n] = 0.5 * gp2.data()[n] - 0.5 * w * w;
    }
    return out;
}

}  // namespace

SphCoeffs grad_h(const DnoSolver& dno, const SurfaceState& s, const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, s.h);
    GridField kin = grad_h_kinetic(dno, s, g, opts);
    GridField H = mean_curvature(tab, g);
    GridField out(tab.ntheta, tab.nphi);
    for (int n = 0; n < out.size(); ++n) {
        double r = 1.0 + g.h_grid.data()[n];
        out.data()[n] = kin.data()[n] + s.sigma0 * r * r * H.data()[n];
    }
    return analyze(tab, out);
}

std::pair<SphCoeffs, SphCoeffs> vector_field(const DnoSolver& dno, const SurfaceState& s,
                                             const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, s.h);
    GridField gp = synthesize(tab, grad_psi(dno, s, opts));
    GridField gh = synthesize(tab, grad_h(dno, s, opts));
    GridField dh(tab.ntheta, tab.nphi), dpsi(tab.ntheta, tab.nphi);
    for (int n = 0; n < dh.size(); ++n) {
        double r2 = (1.0 + g.h_grid.data()[n]) * (1.0 + g.h_grid.data()[n]);
        dh.data()[n] = gp.data()[n] / r2;
        dpsi.data()[n] = -gh.data()[n] / r2;
    }
    return {analyze(tab, dh), analyze(tab, dpsi)};
}

SurfaceState darboux_forward(const BasisTable& tab, const SurfaceState& s, DarbouxKind kind) {
    SurfaceState out = s;
    GridField hg = synthesize(tab, s.h);
    if (kind == DarbouxKind::psi_scaling) {
        GridField pg = synthesize(tab, s.psi);
        GridField w(tab.ntheta, tab.nphi);
        for (int n = 0; n < w.size(); ++n) {
            double r = 1.0 + hg.data()[n];
            w.data()[n] = r * r * pg.data()[n];
        }
        out.psi = analyze(tab, w);
    } else {
        GridField eta(tab.ntheta, tab.nphi);
        for (int n = 0; n < eta.size(); ++n) {
            double r = 1.0 + hg.data()[n];
            eta.data()[n] = (r * r * r - 1.0) / 3.0;
        }
        out.h = analyze(tab, eta);
    }
    return out;
}

SurfaceState darboux_backward(const BasisTable& tab, const SurfaceState& s, DarbouxKind kind) {
    SurfaceState out = s;
    if (kind == DarbouxKind::psi_scaling) {
        GridField hg = synthesize(tab, s.h);
        GridField wg = synthesize(tab, s.psi);
        GridField psi(tab.ntheta, tab.nphi);
        for (int n = 0; n < psi.size(); ++n) {
            double r = 1.0 + hg.data()[n];
            psi.data()[n] = wg.data()[n] / (r * r);
        }
        out.psi = analyze(tab, psi);
    } else {
        GridField eg = synthesize(tab, s.h);
        GridField h(tab.ntheta, tab.nphi);
        for (int n = 0; n < h.size(); ++n) {
            double t = 1.0 + 3.0 * eg.data()[n];
            if (t <= 0.0)
                throw domain_degenerate("darboux_backward: 1 + 3 eta must stay positive");
            h.data()[n] = std::cbrt(t) - 1.0;
        }
        out.h = analyze(tab, h);
    }
    return out;
}

}  // namespace drop
