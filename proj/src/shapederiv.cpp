#include "drop/shapederiv.hpp"

#include <cmath>

namespace drop {

ShapeDerivCoeffs shape_coefficients(const DnoSolver& dno, const SphCoeffs& h, const SphCoeffs& psi,
                                    const SphCoeffs& Gpsi) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, h);
    VectorGridField grad_psi = tangential_gradient(tab, psi);
    GridField gpgh = dot(grad_psi, g.grad_h);
    GridField Gg = synthesize(tab, Gpsi);

    ShapeDerivCoeffs out;
    out.W = GridField(tab.ntheta, tab.nphi);
    out.B = VectorGridField(tab.ntheta, tab.nphi);
    out.b = GridField(tab.ntheta, tab.nphi);

    for (int n = 0; n < out.W.size(); ++n) {
        double r = 1.0 + g.h_grid.data()[n];
        double J = g.J.data()[n];
        out.W.data()[n] = gpgh.data()[n] / (J * J) + r * Gg.data()[n] / J;
    }
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            double r = 1.0 + g.h_grid.at(i, j);
            double J = g.J.at(i, j);
            double c1 = gpgh.at(i, j) / (r * J * J * J);
            double c2 = 1.0 / (r * J);
            Vec3 gh = g.grad_h.at(i, j);
            Vec3 gp = grad_psi.at(i, j);
            out.B.set(i, j,
                      {c1 * gh[0] - c2 * gp[0], c1 * gh[1] - c2 * gp[1], c1 * gh[2] - c2 * gp[2]});
        }
    }
    // b needs div_{S2}{(1+h)(grad psi - W grad h)}, computed spectrally.
    VectorGridField flux(tab.ntheta, tab.nphi);
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            double r = 1.0 + g.h_grid.at(i, j);
            double W = out.W.at(i, j);
            Vec3 gh = g.grad_h.at(i, j);
            Vec3 gp = grad_psi.at(i, j);
            flux.set(i, j, {r * (gp[0] - W * gh[0]), r * (gp[1] - W * gh[1]),
                            r * (gp[2] - W * gh[2])});
        }
    }
    GridField div_flux = tangential_divergence(tab, flux);
    for (int n = 0; n < out.b.size(); ++n) {
        double r = 1.0 + g.h_grid.data()[n];
        double J = g.J.data()[n];
        out.b.data()[n] = gpgh.data()[n] / (J * J * J) - 2.0 * Gg.data()[n] / r -
                          div_flux.data()[n] / (r * r * J);
    }
    return out;
}

SphCoeffs shape_derivative(const DnoSolver& dno, const SphCoeffs& h, const SphCoeffs& eta,
                           const SphCoeffs& psi, const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    SphCoeffs Gpsi = dno.dirichlet_neumann(h, psi, opts).Gpsi;
    ShapeDerivCoeffs co = shape_coefficients(dno, h, psi, Gpsi);

    GridField eta_grid = synthesize(tab, eta);
    VectorGridField grad_eta = tangential_gradient(tab, eta);
    GridField Bgrad = dot(co.B, grad_eta);

    GridField Weta(tab.ntheta, tab.nphi);
    for (int n = 0; n < Weta.size(); ++n) Weta.data()[n] = co.W.data()[n] * eta_grid.data()[n];
    SphCoeffs GW = dno.dirichlet_neumann(h, analyze(tab, Weta), opts).Gpsi;
    GridField GW_grid = synthesize(tab, GW);

    GridField total(tab.ntheta, tab.nphi);
    for (int n = 0; n < total.size(); ++n)
        total.data()[n] =
            co.b.data()[n] * eta_grid.data()[n] + Bgrad.data()[n] - GW_grid.data()[n];
    return analyze(tab, total);
}

double fd_defect(const DnoSolver& dno, const SphCoeffs& h, const SphCoeffs& eta,
                 const SphCoeffs& psi, double eps, const DnoOptions& opts) {
    if (!(eps > 0.0)) throw std::invalid_argument("fd_defect: eps must be positive");
    SphCoeffs deriv = shape_derivative(dno, h, eta, psi, opts);
    SphCoeffs hp = h + eps * eta;
    SphCoeffs hm = h - eps * eta;
    SphCoeffs gp = dno.dirichlet_neumann(hp, psi, opts).Gpsi;
    SphCoeffs gm = dno.dirichlet_neumann(hm, psi, opts).Gpsi;
    SphCoeffs fd = (1.0 / (2.0 * eps)) * (gp - gm);
    return sobolev_norm(deriv - fd, 0.5);
}

}  // namespace drop
