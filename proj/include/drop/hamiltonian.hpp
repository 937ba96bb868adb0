#pragma once

#include "drop/dno.hpp"

namespace drop {

// Full phase-space point: elevation h, boundary potential psi, capillarity.
struct SurfaceState {
    SphCoeffs h;
    SphCoeffs psi;
    double sigma0 = 1.0;
};

struct EnergyBreakdown {
    double kinetic = 0.0;    // K = 1/2 int psi G(h)psi (1+h) J dsigma
    double potential = 0.0;  // U = int (1+h) J dsigma
    double total = 0.0;      // K + sigma0 U
    double sigma0 = 1.0;
};

EnergyBreakdown energy(const DnoSolver& dno, const SurfaceState& s, const DnoOptions& opts = {});

// d/dpsi H = (1+h) J G(h)psi, as L2(S2) Riesz representative.
SphCoeffs grad_psi(const DnoSolver& dno, const SurfaceState& s, const DnoOptions& opts = {});

// d/dh H = d/dh K + sigma0 (1+h)^2 H(h), with
// d/dh K = |grad psi|^2/2 - ((1+h) G(h)psi + <grad psi, grad h>/J)^2 / 2.
SphCoeffs grad_h(const DnoSolver& dno, const SurfaceState& s, const DnoOptions& opts = {});

// (dh/dt, dpsi/dt) = ((1+h)^{-2} d_psi H, -(1+h)^{-2} d_h H).
std::pair<SphCoeffs, SphCoeffs> vector_field(const DnoSolver& dno, const SurfaceState& s,
                                             const DnoOptions& opts = {});

enum class DarbouxKind {
    psi_scaling,  // (h, psi) -> (h, (1+h)^2 psi)
    cubic_eta,    // (h, psi) -> (((1+h)^3 - 1)/3, psi)
};

SurfaceState darboux_forward(const BasisTable& tab, const SurfaceState& s, DarbouxKind kind);
SurfaceState darboux_backward(const BasisTable& tab, const SurfaceState& s, DarbouxKind kind);

}  // namespace drop
