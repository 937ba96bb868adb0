#pragma once

#include <array>
#include <vector>

#include "drop/errors.hpp"

namespace drop {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Real spherical-harmonic coefficients in the Legendre Cartesian basis
//
//   phi_{l,0}(x)  = c_l^(0) P_l(x3),
//   phi_{l,m}(x)  = c_l^(m) P_l^(m)(x3) Re[(x1 + i x2)^m],   m = 1..l,
//   phi_{l,-m}(x) = c_l^(m) P_l^(m)(x3) Im[(x1 + i x2)^m],   m = 1..l,
//
// where P_l^(m) is the m-th derivative of the Legendre polynomial and the
// normalizers c_l^(m) make the basis L2(S2)-orthonormal
// (c_l^(m) = sqrt(2) * sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!) for m >= 1,
//  c_l^(0) = sqrt((2l+1)/(4pi))).
// Storage is the flat triangle 0 <= l <= lmax, -l <= m <= l.
class SphCoeffs {
public:
    SphCoeffs() = default;
    explicit SphCoeffs(int lmax) : lmax_(lmax), data_((lmax + 1) * (lmax + 1), 0.0) {}

    int lmax() const { return lmax_; }
    int size() const { return static_cast<int>(data_.size()); }

    static int index(int l, int m) { return l * (l + 1) + m; }

    double& at(int l, int m) { return data_[index(l, m)]; }
    double at(int l, int m) const { return data_[index(l, m)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    SphCoeffs& operator+=(const SphCoeffs& o);
    SphCoeffs& operator-=(const SphCoeffs& o);
    SphCoeffs& operator*=(double s);

    // Copy into a (possibly different) truncation; dropped modes are lost,
    // new modes are zero.
    SphCoeffs truncated(int new_lmax) const;

private:
    int lmax_ = -1;
    std::vector<double> data_;
};

SphCoeffs operator+(SphCoeffs a, const SphCoeffs& b);
SphCoeffs operator-(SphCoeffs a, const SphCoeffs& b);
SphCoeffs operator*(double s, SphCoeffs a);

// Nodal values on the Gauss-Legendre (colatitude) x uniform (longitude) grid.
class GridField {
public:
    GridField() = default;
    GridField(int ntheta, int nphi) : ntheta_(ntheta), nphi_(nphi), data_(ntheta * nphi, 0.0) {}

    int ntheta() const { return ntheta_; }
    int nphi() const { return nphi_; }
    int size() const { return static_cast<int>(data_.size()); }

    double& at(int i, int j) { return data_[i * nphi_ + j]; }
    double at(int i, int j) const { return data_[i * nphi_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    int ntheta_ = 0;
    int nphi_ = 0;
    std::vector<double> data_;
};

struct VectorGridField {
    GridField x, y, z;

    VectorGridField() = default;
    VectorGridField(int ntheta, int nphi) : x(ntheta, nphi), y(ntheta, nphi), z(ntheta, nphi) {}

    Vec3 at(int i, int j) const { return {x.at(i, j), y.at(i, j), z.at(i, j)}; }
    void set(int i, int j, const Vec3& v) {
        x.at(i, j) = v[0];
        y.at(i, j) = v[1];
        z.at(i, j) = v[2];
    }
};

// Precomputed basis values, quadrature nodes/weights, and the tangent frame.
// Immutable after construction; shareable.
class BasisTable {
public:
    int lmax = 0;
    int ntheta = 0;
    int nphi = 0;

    std::vector<double> cos_theta;   // Gauss-Legendre nodes t_i on (-1,1), descending theta
    std::vector<double> sin_theta;   // sqrt(1 - t_i^2)
    std::vector<double> weight;      // GL weight * (2 pi / nphi) folded separately; this is the GL weight
    std::vector<double> cos_mphi;    // [(lmax+1) x nphi]
    std::vector<double> sin_mphi;    // [(lmax+1) x nphi]

    // Normalized associated Legendre values and theta-derivatives per node,
    // packed triangle m <= l. plm holds Pbar_{l,m}(t_i); dplm holds
    // d/dtheta Pbar_{l,m}(cos theta)|_{theta_i}.
    std::vector<double> plm;    // [ntheta x tri]
    std::vector<double> dplm;   // [ntheta x tri]

    static int tri_index(int l, int m) { return l * (l + 1) / 2 + m; }
    int tri_size() const { return (lmax + 1) * (lmax + 2) / 2; }

    double phi_node(int j) const;
    Vec3 node_position(int i, int j) const;
    // Orthonormal tangent frame (e_theta, e_phi) at node (i, j).
    Vec3 e_theta(int i, int j) const;
    Vec3 e_phi(int i, int j) const;

    // Quadrature weight of node (i, j) for integrals over S2.
    double node_weight(int i) const;
};

// Grid sizes are N_theta = ceil(pad*(lmax+1)), N_phi = ceil(pad*(2 lmax+1)).
// pad = 3/2 is the dealiasing default used by the nonlinear modules.
BasisTable build_basis(int lmax, double pad = 1.5);

GridField synthesize(const BasisTable& tab, const SphCoeffs& c);
SphCoeffs analyze(const BasisTable& tab, const GridField& f);

// nabla_{S2} f as a Cartesian vector field on the grid; tangent to the sphere
// at every node by construction.
VectorGridField tangential_gradient(const BasisTable& tab, const SphCoeffs& c);

// sum_k (nabla_{S2} c_k)_k for three scalar coefficient sets: the trace of the
// tangential differential of the vector field with components (c1, c2, c3).
GridField tangential_divergence(const BasisTable& tab, const SphCoeffs& c1,
                                const SphCoeffs& c2, const SphCoeffs& c3);
GridField tangential_divergence(const BasisTable& tab, const VectorGridField& v);

// Coefficient map (l,m) -> -l(l+1) * (l,m).
SphCoeffs laplace_beltrami(const SphCoeffs& c);

// D^2_{S2} f applied to a (tangent) vector field, and the quadratic form
// <D^2_{S2} f * v, u> on the grid.
VectorGridField tangential_hessian_apply(const BasisTable& tab, const SphCoeffs& c,
                                         const VectorGridField& v);
GridField hessian_quadratic_form(const BasisTable& tab, const SphCoeffs& c,
                                 const VectorGridField& u, const VectorGridField& v);

// (|c_{0,0}|^2 + sum_{l>=1} |c_{l,m}|^2 l^{2s})^{1/2}; requires s >= 0.
double sobolev_norm(const SphCoeffs& c, double s);

double integrate(const BasisTable& tab, const GridField& f);

// Pointwise helpers used throughout the nonlinear modules.
GridField pointwise(const GridField& a, const GridField& b,
                    double (*op)(double, double));
GridField dot(const VectorGridField& a, const VectorGridField& b);

}  // namespace drop
