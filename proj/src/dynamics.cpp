#include "drop/dynamics.hpp"

#include <cmath>

namespace drop {

std::pair<SphCoeffs, SphCoeffs> rhs(const DnoSolver& dno, const SurfaceState& s,
                                    const DnoOptions& opts, BallField* warm) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, s.h);
    SphCoeffs Gpsi = dno.dirichlet_neumann(s.h, s.psi, opts, warm).Gpsi;
    GridField G_grid = synthesize(tab, Gpsi);
    VectorGridField grad_psi = tangential_gradient(tab, s.psi);
    GridField gp2 = dot(grad_psi, grad_psi);
    GridField gpgh = dot(grad_psi, g.grad_h);
    GridField H = mean_curvature(tab, g);

    GridField dh(tab.ntheta, tab.nphi), dpsi(tab.ntheta, tab.nphi);
    for (int n = 0; n < dh.size(); ++n) {
        double r = 1.0 + g.h_grid.data()[n];
        double J = g.J.data()[n];
        double G = G_grid.data()[n];
        dh.data()[n] = J / r * G;
        double w = G + gpgh.data()[n] / (r * J);
        dpsi.data()[n] = 0.5 * w * w - gp2.data()[n] / (2.0 * r * r) - s.sigma0 * H.data()[n];
    }
    return {analyze(tab, dh), analyze(tab, dpsi)};
}

namespace {

void axpy(SphCoeffs& y, double a, const SphCoeffs& x) {
    for (int k = 0; k < y.size(); ++k) y.data()[k] += a * x.data()[k];
}

void apply_filter(SphCoeffs& c, double strength) {
    int L = c.lmax();
    int cutoff = (2 * L) / 3;
    for (int l = cutoff + 1; l <= L; ++l) {
        double x = double(l - cutoff) / double(L - cutoff);
        double damp = std::exp(-strength * std::pow(x, 4));
        for (int m = -l; m <= l; ++m) c.at(l, m) *= damp;
    }
}

}  // namespace

SurfaceState step_rk4(const DnoSolver& dno, const SurfaceState& s, double dt,
                      const EvolveOptions& opts, BallField* warm) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
    auto k1 = rhs(dno, s, opts.dno, warm);
    SurfaceState s2 = s;
    axpy(s2.h, 0.5 * dt, k1.first);
    axpy(s2.psi, 0.5 * dt, k1.second);
    auto k2 = rhs(dno, s2, opts.dno, warm);
    SurfaceState s3 = s;
    axpy(s3.h, 0.5 * dt, k2.first);
    axpy(s3.psi, 0.5 * dt, k2.second);
    auto k3 = rhs(dno, s3, opts.dno, warm);
    SurfaceState s4 = s;
    axpy(s4.h, dt, k3.first);
    axpy(s4.psi, dt, k3.second);
    auto k4 = rhs(dno, s4, opts.dno, warm);

    SurfaceState out = s;
    double c = dt / 6.0;
    axpy(out.h, c, k1.first);
    axpy(out.h, 2.0 * c, k2.first);
    axpy(out.h, 2.0 * c, k3.first);
    axpy(out.h, c, k4.first);
    axpy(out.psi, c, k1.second);
    axpy(out.psi, 2.0 * c, k2.second);
    axpy(out.psi, 2.0 * c, k3.second);
    axpy(out.psi, c, k4.second);
    if (opts.filter) {
        apply_filter(out.h, opts.filter_strength);
        apply_filter(out.psi, opts.filter_strength);
    }
    return out;
}

DiagnosticsRow diagnostics(const DnoSolver& dno, const SurfaceState& s, double t,
                           const DnoOptions& opts) {
    const BasisTable& tab = dno.table();
    DiagnosticsRow row;
    row.t = t;
    EnergyBreakdown e = energy(dno, s, opts);
    row.energy = e.total;
    row.kinetic = e.kinetic;
    row.potential = e.potential;
    row.volume = volume(tab, s.h);
    GridField hg = synthesize(tab, s.h);
    GridField bx(tab.ntheta, tab.nphi), by(tab.ntheta, tab.nphi), bz(tab.ntheta, tab.nphi);
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            double r = 1.0 + hg.at(i, j);
            double w = r * r * r * r / 4.0;
            Vec3 x = tab.node_position(i, j);
            bx.at(i, j) = w * x[0];
            by.at(i, j) = w * x[1];
            bz.at(i, j) = w * x[2];
        }
    }
    row.bary_x = integrate(tab, bx);
    row.bary_y = integrate(tab, by);
    row.bary_z = integrate(tab, bz);
    row.h_norm_H2 = sobolev_norm(s.h, 2.0);
    row.psi_norm_H1 = sobolev_norm(s.psi, 1.0);
    return row;
}

Trajectory evolve(const DnoSolver& dno, const SurfaceState& s0, double T, double dt,
                  int record_every, const EvolveOptions& opts) {
    if (!(T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("evolve: T and dt must be positive");
    if (record_every < 1) record_every = 1;

    Trajectory traj;
    SurfaceState s = s0;
    BallField warm;
    long nsteps = std::lround(T / dt);
    if (nsteps < 1) nsteps = 1;

    traj.times.push_back(0.0);
    traj.states.push_back(s);
    traj.diagnostics.push_back(diagnostics(dno, s, 0.0, opts.dno));

    for (long step = 1; step <= nsteps; ++step) {
        try {
            s = step_rk4(dno, s, dt, opts, &warm);
        } catch (const domain_degenerate& e) {
            traj.aborted = true;
            traj.abort_reason = e.what();
            return traj;
        }
        double t = step * dt;
        if (step % record_every == 0 || step == nsteps) {
            traj.times.push_back(t);
            traj.states.push_back(s);
            traj.diagnostics.push_back(diagnostics(dno, s, t, opts.dno));
        }
    }
    return traj;
}

}  // namespace drop
