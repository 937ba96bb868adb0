#pragma once

#include <vector>

#include "drop/geometry.hpp"
#include "drop/sphgrid.hpp"

namespace drop {

// Symmetric 3x3 coefficient matrix P of the transformed ball problem
// div(P grad u) = 0, stored on the angular grid (P is 0-homogeneous, so the
// values are independent of the radius).
struct BallCoefficientField {
    int ntheta = 0, nphi = 0;
    // xx, xy, xz, yy, yz, zz per node
    std::vector<double> comp[6];

    Vec3 apply(int i, int j, const Vec3& v) const {
        int k = i * nphi + j;
        return {comp[0][k] * v[0] + comp[1][k] * v[1] + comp[2][k] * v[2],
                comp[1][k] * v[0] + comp[3][k] * v[1] + comp[4][k] * v[2],
                comp[2][k] * v[0] + comp[4][k] * v[1] + comp[5][k] * v[2]};
    }
};

// P = (1+h) I - grad h (x) x - x (x) grad h + |grad h|^2/(1+h) x (x) x on S2.
BallCoefficientField assemble_P(const BasisTable& tab, const SphCoeffs& h);

// Modal radial samples u_{l,m}(r_k) on the open radial Gauss-Legendre node
// set; boundary values at r = 1 are carried separately where needed.
struct BallField {
    int lmax = 0, nr = 0;
    std::vector<double> data;  // [(lmax+1)^2][nr]

    BallField() = default;
    BallField(int lmax, int nr) : lmax(lmax), nr(nr), data((lmax + 1) * (lmax + 1) * nr, 0.0) {}
    double& at(int mode, int k) { return data[mode * nr + k]; }
    double at(int mode, int k) const { return data[mode * nr + k]; }
    int modes() const { return (lmax + 1) * (lmax + 1); }
};

struct DnoOptions {
    enum class Mode { fixed_point, series };
    Mode mode = Mode::fixed_point;
    int series_order = 8;   // highest power of h retained in series mode
    double tol = 1e-10;     // fixed-point increment tolerance (H^{1/2} of packed modal increments)
    int maxiter = 200;
    int radial_nodes = 0;   // 0 -> 2*lmax
};

struct DnoResult {
    SphCoeffs Gpsi;
    int iterations = 0;
    double final_increment = 0.0;
    double contraction = 0.0;  // observed ratio of consecutive increments
};

// Precomputes the radial grid, modal Green matrices and boundary-derivative
// rows for one basis table. Immutable after construction; the table must
// outlive the solver.
class DnoSolver {
public:
    DnoSolver(const BasisTable& tab, int radial_nodes = 0);

    int radial_nodes() const { return nr_; }
    const std::vector<double>& radial_points() const { return r_; }

    // u0_{l,m}(r) = psi_{l,m} r^l.
    BallField harmonic_extension(const SphCoeffs& psi) const;

    // Mode-wise Delta u = f with u(1) = 0 and u bounded at the origin, via the
    // Green-function quadrature; rhs holds modal samples of f.
    BallField poisson_solve_ball(const BallField& rhs) const;
    // d/dr at r = 1 of the same solution, as coefficients.
    SphCoeffs poisson_boundary_derivative(const BallField& rhs) const;
    // Variants acting on modal samples of r f (the solver-internal carrier).
    BallField poisson_solve_scaled(const BallField& rf) const;
    SphCoeffs boundary_derivative_scaled(const BallField& rf) const;

    // Full Dirichlet-Neumann solve. warm, if non-null, seeds the fixed point
    // with a previous solution and receives the converged ball field back.
    DnoResult dirichlet_neumann(const SphCoeffs& h, const SphCoeffs& psi, const DnoOptions& opts,
                                BallField* warm = nullptr) const;

    // Extraction through <P grad u, x>/((1+h)J); agrees with the standard
    // extraction to discretization accuracy (equivalence test hook).
    SphCoeffs extract_via_P(const SphCoeffs& h, const SphCoeffs& psi,
                            const DnoOptions& opts) const;

    // |int psi1 G(h)psi2 dmu - int psi2 G(h)psi1 dmu|, dmu = (1+h) J dsigma.
    double self_adjointness_defect(const SphCoeffs& h, const SphCoeffs& psi1,
                                   const SphCoeffs& psi2, const DnoOptions& opts) const;

    const BasisTable& table() const { return tab_; }

private:
    void apply_divergence(const SurfaceGeometry& geom, const BallCoefficientField& Q,
                          const BallField& u, BallField& rhs) const;

    const BasisTable& tab_;
    int nr_ = 0;
    std::vector<double> r_, rw_;          // radial nodes/weights on (0,1)
    std::vector<double> diff_;            // nr x nr differentiation matrix
    std::vector<std::vector<double>> green_;  // per l: nr x nr solve matrix
    std::vector<std::vector<double>> bnd_;    // per l: nr row, f -> u'(1)
};

// Convenience wrappers constructing a solver on the fly.
SphCoeffs dirichlet_neumann(const BasisTable& tab, const SphCoeffs& h, const SphCoeffs& psi,
                            const DnoOptions& opts = {});
double self_adjointness_defect(const BasisTable& tab, const SphCoeffs& h, const SphCoeffs& psi1,
                               const SphCoeffs& psi2, const DnoOptions& opts = {});

}  // namespace drop
