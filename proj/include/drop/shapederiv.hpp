#pragma once

#include "drop/dno.hpp"

namespace drop {

// Coefficients of the shape derivative G'(h)[eta]psi = b eta + <B, grad eta> - G(h)(W eta).
// At h = 0: W = G(0)psi, B = -grad psi, b = -2 G(0)psi - Lap psi.
struct ShapeDerivCoeffs {
    GridField W;
    VectorGridField B;
    GridField b;
};

ShapeDerivCoeffs shape_coefficients(const DnoSolver& dno, const SphCoeffs& h, const SphCoeffs& psi,
                                    const SphCoeffs& Gpsi);

SphCoeffs shape_derivative(const DnoSolver& dno, const SphCoeffs& h, const SphCoeffs& eta,
                           const SphCoeffs& psi, const DnoOptions& opts = {});

// H^{1/2} norm of (shape_derivative - central difference of G at step eps).
double fd_defect(const DnoSolver& dno, const SphCoeffs& h, const SphCoeffs& eta,
                 const SphCoeffs& psi, double eps, const DnoOptions& opts = {});

}  // namespace drop
