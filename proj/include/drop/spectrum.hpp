#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "drop/sphgrid.hpp"

namespace drop {

// 2x2 block of the linearized operator at zero on the (l, m) mode pair:
//   [ -omega m          -l      ]
//   [ sigma0 (l+2)(l-1)  omega m ]
struct BlockL {
    int l = 0, m = 0;
    double omega = 0.0, sigma0 = 1.0;
    double a11() const { return -omega * m; }
    double a12() const { return -double(l); }
    double a21() const { return sigma0 * double(l + 2) * double(l - 1); }
    double a22() const { return omega * m; }
    double det() const { return -omega * omega * m * m + sigma0 * double(l + 2) * (l - 1) * l; }
};

double dispersion_det(int l, int m, double omega, double sigma0);

// omega* = sqrt(sigma0) sqrt((l0+2)(l0-1) l0) / m0; requires l0 >= 2, 1 <= m0 <= l0.
double omega_star(int l0, int m0, double sigma0);

struct ResonanceReport {
    int l0 = 0, m0 = 0;
    std::int64_t c0_num = 0, c0_den = 1;  // c0 = (l0+2)(l0-1)l0 / m0^2, reduced
    double omega_star = 0.0;              // at sigma0 = 1
    std::vector<std::pair<int, int>> S;      // all solutions, lexicographic
    std::vector<std::pair<int, int>> S_res;  // l >= 1, m >= 0, l - m even
    bool simple = false;                     // S_res == {(l0, m0)}
};

// Exact-integer enumeration of m0^2 (l+2)(l-1) l = (l0+2)(l0-1) l0 m^2 over
// the triangle 0 <= |m| <= l <= floor(c0).
ResonanceReport resonance_set(int l0, int m0);

enum class FamilyKind {
    odd_prime_product,  // l0 = m0 = p1 ... pn, distinct odd primes
    prime_minus_two,    // l0 prime >= 11, m0 = l0 - 2
    twice_prime,        // l0 = m0 = 2p, p prime > 3
};

// Validates the family inputs (primality by trial division) and returns
// resonance_set(l0, m0).simple for the constructed pair.
bool verify_family(FamilyKind kind, const std::vector<int>& params);

// The operator M f = <J x, grad_{S2} f>: coefficient map (l,m) -> -m (l,-m).
SphCoeffs apply_M(const SphCoeffs& c);

// Solves the 2x2 block L_{l,m} (eta, beta) = (f, g). Off resonance this is the
// closed-form inverse; on resonance the minimal-norm (W-selected) solution is
// returned and any solvability defect above tol raises range_violation.
std::pair<double, double> invert_block(int l, int m, double omega, double sigma0, double f_hat,
                                       double g_hat, double tol = 1e-12);

struct RestrictedInverse {
    SphCoeffs eta, beta;
    double norm_diag = 0.0;  // max over blocks of l^3 / |det|
};

// Block-wise inverse on the parity-restricted spaces at omega = omega*(l0,m0):
// input (f, g) with f supported on T_Y and g on T_X; output (eta, beta) in
// T_X x T_Y. Resonant blocks are identified exactly from resonance_set.
RestrictedInverse invert_L_restricted(const SphCoeffs& f, const SphCoeffs& g, int l0, int m0,
                                      double sigma0, double tol = 1e-10);

}  // namespace drop
