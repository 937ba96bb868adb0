#pragma once

#include <utility>
#include <vector>

#include "drop/dno.hpp"
#include "drop/hamiltonian.hpp"

namespace drop {

// Index supports of the parity-restricted spaces:
//   T_X = {0 <= m <= l, l - m even}   (even in x2, even in x3)
//   T_Y = {-l <= m <= -1, l - m even} (odd in x2, even in x3)
bool in_TX(int l, int m);
bool in_TY(int l, int m);

// Zeroes every coefficient outside the requested support.
SphCoeffs project_X(const SphCoeffs& c);
SphCoeffs project_Y(const SphCoeffs& c);

// Rotating-frame residual; lambda is the Bernoulli constant absorbing the
// rest-sphere curvature term (F2(omega, 0) with lambda = -2 sigma0 vanishes).
std::pair<SphCoeffs, SphCoeffs> residual_F(const DnoSolver& dno, double sigma0, double omega,
                                           const SphCoeffs& eta, const SphCoeffs& beta,
                                           double lambda, const DnoOptions& opts = {},
                                           BallField* warm = nullptr);

// Normalized kernel direction (l0 phi_{l0,m0}, -omega m0 phi_{l0,-m0}).
std::pair<SphCoeffs, SphCoeffs> kernel_vector(int l0, int m0, double omega, int lmax);

// SO(2) action about x3 on coefficients: f -> f(R(theta) .).
SphCoeffs rotate_state(const SphCoeffs& c, double theta);

// || F(omega, rotated u) - rotated F(omega, u) || at lambda = 0.
double equivariance_defect(const DnoSolver& dno, double sigma0, double omega,
                           const SphCoeffs& eta, const SphCoeffs& beta, double theta,
                           const DnoOptions& opts = {});

struct BranchPoint {
    double omega = 0.0;
    double a = 0.0;        // amplitude <u, kernel>
    double lambda = 0.0;   // Bernoulli constant
    double residual = 0.0; // spectral (L2) norm of the traveling-wave residual
    SphCoeffs eta, beta;
};

struct Branch {
    int l0 = 0, m0 = 0;
    double sigma0 = 1.0;
    std::vector<BranchPoint> points;  // points[0] is the trivial state at omega*
};

class continuation_failure : public std::runtime_error {
public:
    continuation_failure(const std::string& what, Branch partial)
        : std::runtime_error(what), partial(std::move(partial)) {}
    Branch partial;
};

struct ContinueOptions {
    double newton_tol = 1e-10;
    int newton_maxiter = 25;
    DnoOptions dno;
};

// Amplitude-parametrized continuation from the bifurcation point omega*.
// Requires resonance_set(l0, m0).simple (throws not_simple otherwise).
Branch continue_branch(const DnoSolver& dno, int l0, int m0, double sigma0, double a_max,
                       int n_steps, double tol, const ContinueOptions& opts = {});

// Reconstruct (h, psi)(t) from a branch point: h = eta(R(omega t) .),
// psi = beta(R(omega t) .) + lambda t.
SurfaceState travelling_to_timewave(const BranchPoint& p, double sigma0, double t);

}  // namespace drop
