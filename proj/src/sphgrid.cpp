#include "drop/sphgrid.hpp"

#include <cmath>
#include <cstring>

namespace drop {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

inline double n2(int m) { return m == 0 ? 1.0 : 1.4142135623730950488; }

}  // namespace

SphCoeffs& SphCoeffs::operator+=(const SphCoeffs& o) {
    for (int k = 0; k < size(); ++k) data_[k] += o.data_[k];
    return *this;
}
SphCoeffs& SphCoeffs::operator-=(const SphCoeffs& o) {
    for (int k = 0; k < size(); ++k) data_[k] -= o.data_[k];
    return *this;
}
SphCoeffs& SphCoeffs::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}
SphCoeffs operator+(SphCoeffs a, const SphCoeffs& b) { return a += b; }
SphCoeffs operator-(SphCoeffs a, const SphCoeffs& b) { return a -= b; }
SphCoeffs operator*(double s, SphCoeffs a) { return a *= s; }

SphCoeffs SphCoeffs::truncated(int new_lmax) const {
    SphCoeffs out(new_lmax);
    int l_top = std::min(new_lmax, lmax_);
    for (int l = 0; l <= l_top; ++l)
        for (int m = -l; m <= l; ++m) out.at(l, m) = at(l, m);
    return out;
}

double BasisTable::phi_node(int j) const { return 2.0 * kPi * j / nphi; }

Vec3 BasisTable::node_position(int i, int j) const {
    double c = cos_mphi[nphi + j];  // cos(phi_j)
    double s = sin_mphi[nphi + j];
    return {sin_theta[i] * c, sin_theta[i] * s, cos_theta[i]};
}

Vec3 BasisTable::e_theta(int i, int j) const {
    double c = cos_mphi[nphi + j];
    double s = sin_mphi[nphi + j];
    return {cos_theta[i] * c, cos_theta[i] * s, -sin_theta[i]};
}

Vec3 BasisTable::e_phi(int /*i*/, int j) const {
    double c = cos_mphi[nphi + j];
    double s = sin_mphi[nphi + j];
    return {-s, c, 0.0};
}

double BasisTable::node_weight(int i) const { return weight[i] * 2.0 * kPi / nphi; }

BasisTable build_basis(int lmax, double pad) {
    if (lmax < 1) throw std::invalid_argument("build_basis: lmax must be >= 1");
    if (pad < 1.0) throw std::invalid_argument("build_basis: pad must be >= 1");

    BasisTable tab;
    tab.lmax = lmax;
    tab.ntheta = static_cast<int>(std::ceil(pad * (lmax + 1)));
    tab.nphi = static_cast<int>(std::ceil(pad * (2 * lmax + 1)));

    gauss_legendre(tab.ntheta, tab.cos_theta, tab.weight);
    tab.sin_theta.resize(tab.ntheta);
    for (int i = 0; i < tab.ntheta; ++i)
        tab.sin_theta[i] = std::sqrt(1.0 - tab.cos_theta[i] * tab.cos_theta[i]);

    tab.cos_mphi.resize((lmax + 2) * tab.nphi);
    tab.sin_mphi.resize((lmax + 2) * tab.nphi);
    for (int m = 0; m <= lmax + 1; ++m) {
        for (int j = 0; j < tab.nphi; ++j) {
            double a = 2.0 * kPi * m * j / tab.nphi;
            tab.cos_mphi[m * tab.nphi + j] = std::cos(a);
            tab.sin_mphi[m * tab.nphi + j] = std::sin(a);
        }
    }

    // Normalized associated Legendre triangle per node:
    //   Pbar_{0,0} = 1/sqrt(4 pi),
    //   Pbar_{m,m} = sqrt((2m+1)/(2m)) sin(theta) Pbar_{m-1,m-1},
    //   Pbar_{m+1,m} = sqrt(2m+3) t Pbar_{m,m},
    //   Pbar_{l,m} = a_lm (t Pbar_{l-1,m} - b_lm Pbar_{l-2,m}),
    // with a_lm = sqrt((4l^2-1)/(l^2-m^2)), b_lm = sqrt(((l-1)^2-m^2)/(4(l-1)^2-1)).
    // Theta derivative from
    //   sin(theta) d/dtheta Pbar_{l,m} = l t Pbar_{l,m} - e_lm Pbar_{l-1,m},
    //   e_lm = sqrt((l^2-m^2)(2l+1)/(2l-1)).
    int tri = tab.tri_size();
    tab.plm.assign(tab.ntheta * tri, 0.0);
    tab.dplm.assign(tab.ntheta * tri, 0.0);
    for (int i = 0; i < tab.ntheta; ++i) {
        double t = tab.cos_theta[i];
        double st = tab.sin_theta[i];
        double* P = tab.plm.data() + i * tri;
        double* D = tab.dplm.data() + i * tri;
        P[BasisTable::tri_index(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
        for (int m = 1; m <= lmax; ++m) {
            P[BasisTable::tri_index(m, m)] =
                std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * P[BasisTable::tri_index(m - 1, m - 1)];
        }
        for (int m = 0; m < lmax; ++m) {
            P[BasisTable::tri_index(m + 1, m)] =
                std::sqrt(2.0 * m + 3.0) * t * P[BasisTable::tri_index(m, m)];
        }
        for (int m = 0; m <= lmax; ++m) {
            for (int l = m + 2; l <= lmax; ++l) {
                double alm = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
                double blm = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                       (4.0 * double(l - 1) * (l - 1) - 1.0));
                P[BasisTable::tri_index(l, m)] =
                    alm * (t * P[BasisTable::tri_index(l - 1, m)] -
                           blm * P[BasisTable::tri_index(l - 2, m)]);
            }
        }
        for (int m = 0; m <= lmax; ++m) {
            for (int l = m; l <= lmax; ++l) {
                double elm = (l == m)
                                 ? 0.0
                                 : std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) /
                                             (2.0 * l - 1.0));
                double low = (l == m) ? 0.0 : P[BasisTable::tri_index(l - 1, m)];
                D[BasisTable::tri_index(l, m)] =
                    (l * t * P[BasisTable::tri_index(l, m)] - elm * low) / st;
            }
        }
    }
    return tab;
}

GridField synthesize(const BasisTable& tab, const SphCoeffs& c) {
    if (c.lmax() != tab.lmax)
        throw std::invalid_argument("synthesize: coefficient truncation does not match table");
    GridField f(tab.ntheta, tab.nphi);
    int L = tab.lmax;
    std::vector<double> A(L + 1), B(L + 1);
    for (int i = 0; i < tab.ntheta; ++i) {
        const double* P = tab.plm.data() + i * tab.tri_size();
        for (int m = 0; m <= L; ++m) {
            double a = 0.0, b = 0.0;
            for (int l = m; l <= L; ++l) {
                double p = P[BasisTable::tri_index(l, m)];
                a += c.at(l, m) * p;
                if (m > 0) b += c.at(l, -m) * p;
            }
            A[m] = n2(m) * a;
            B[m] = n2(m) * b;
        }
        double* row = f.data() + i * tab.nphi;
        for (int j = 0; j < tab.nphi; ++j) {
            double v = A[0];
            for (int m = 1; m <= L; ++m) {
                v += A[m] * tab.cos_mphi[m * tab.nphi + j] + B[m] * tab.sin_mphi[m * tab.nphi + j];
            }
            row[j] = v;
        }
    }
    return f;
}

SphCoeffs analyze(const BasisTable& tab, const GridField& f) {
    if (f.ntheta() != tab.ntheta || f.nphi() != tab.nphi)
        throw std::invalid_argument("analyze: field shape does not match table");
    int L = tab.lmax;
    SphCoeffs c(L);
    double dphi = 2.0 * kPi / tab.nphi;
    std::vector<double> A(L + 1), B(L + 1);
    for (int i = 0; i < tab.ntheta; ++i) {
        const double* row = f.data() + i * tab.nphi;
        for (int m = 0; m <= L; ++m) {
            double a = 0.0, b = 0.0;
            const double* cm = tab.cos_mphi.data() + m * tab.nphi;
            const double* sm = tab.sin_mphi.data() + m * tab.nphi;
            for (int j = 0; j < tab.nphi; ++j) {
                a += row[j] * cm[j];
                b += row[j] * sm[j];
            }
            A[m] = a * dphi;
            B[m] = b * dphi;
        }
        const double* P = tab.plm.data() + i * tab.tri_size();
        double w = tab.weight[i];
        for (int m = 0; m <= L; ++m) {
            double s = w * n2(m);
            for (int l = m; l <= L; ++l) {
                double p = s * P[BasisTable::tri_index(l, m)];
                c.at(l, m) += p * A[m];
                if (m > 0) c.at(l, -m) += p * B[m];
            }
        }
    }
    return c;
}

namespace {

// Shared core for gradient-type syntheses: accumulates the (theta, phi)
// spherical components of nabla_{S2} at every node.
void gradient_components(const BasisTable& tab, const SphCoeffs& c, GridField& ft, GridField& fp) {
    int L = tab.lmax;
    std::vector<double> At(L + 1), Bt(L + 1), Ap(L + 1), Bp(L + 1);
    for (int i = 0; i < tab.ntheta; ++i) {
        const double* P = tab.plm.data() + i * tab.tri_size();
        const double* D = tab.dplm.data() + i * tab.tri_size();
        double inv_st = 1.0 / tab.sin_theta[i];
        for (int m = 0; m <= L; ++m) {
            double at = 0.0, bt = 0.0, ap = 0.0, bp = 0.0;
            for (int l = m; l <= L; ++l) {
                int k = BasisTable::tri_index(l, m);
                at += c.at(l, m) * D[k];
                if (m > 0) {
                    bt += c.at(l, -m) * D[k];
                    ap += c.at(l, m) * P[k];
                    bp += c.at(l, -m) * P[k];
                }
            }
            At[m] = n2(m) * at;
            Bt[m] = n2(m) * bt;
            Ap[m] = n2(m) * m * inv_st * ap;
            Bp[m] = n2(m) * m * inv_st * bp;
        }
        double* rt = ft.data() + i * tab.nphi;
        double* rp = fp.data() + i * tab.nphi;
        for (int j = 0; j < tab.nphi; ++j) {
            double vt = At[0];
            double vp = 0.0;
            for (int m = 1; m <= L; ++m) {
                double cm = tab.cos_mphi[m * tab.nphi + j];
                double sm = tab.sin_mphi[m * tab.nphi + j];
                vt += At[m] * cm + Bt[m] * sm;
                vp += -Ap[m] * sm + Bp[m] * cm;
            }
            rt[j] = vt;
            rp[j] = vp;
        }
    }
}

}  // namespace

VectorGridField tangential_gradient(const BasisTable& tab, const SphCoeffs& c) {
    if (c.lmax() != tab.lmax)
        throw std::invalid_argument("tangential_gradient: truncation does not match table");
    GridField ft(tab.ntheta, tab.nphi), fp(tab.ntheta, tab.nphi);
    gradient_components(tab, c, ft, fp);
    VectorGridField v(tab.ntheta, tab.nphi);
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            Vec3 et = tab.e_theta(i, j);
            Vec3 ep = tab.e_phi(i, j);
            double a = ft.at(i, j), b = fp.at(i, j);
            v.set(i, j, {a * et[0] + b * ep[0], a * et[1] + b * ep[1], a * et[2] + b * ep[2]});
        }
    }
    return v;
}

GridField tangential_divergence(const BasisTable& tab, const SphCoeffs& c1, const SphCoeffs& c2,
                                const SphCoeffs& c3) {
    GridField out(tab.ntheta, tab.nphi);
    GridField ft(tab.ntheta, tab.nphi), fp(tab.ntheta, tab.nphi);
    const SphCoeffs* comps[3] = {&c1, &c2, &c3};
    for (int k = 0; k < 3; ++k) {
        gradient_components(tab, *comps[k], ft, fp);
        for (int i = 0; i < tab.ntheta; ++i) {
            for (int j = 0; j < tab.nphi; ++j) {
                Vec3 et = tab.e_theta(i, j);
                Vec3 ep = tab.e_phi(i, j);
                out.at(i, j) += ft.at(i, j) * et[k] + fp.at(i, j) * ep[k];
            }
        }
    }
    return out;
}

GridField tangential_divergence(const BasisTable& tab, const VectorGridField& v) {
    return tangential_divergence(tab, analyze(tab, v.x), analyze(tab, v.y), analyze(tab, v.z));
}

SphCoeffs laplace_beltrami(const SphCoeffs& c) {
    SphCoeffs out(c.lmax());
    for (int l = 0; l <= c.lmax(); ++l) {
        double mult = -double(l) * (l + 1);
        for (int m = -l; m <= l; ++m) out.at(l, m) = mult * c.at(l, m);
    }
    return out;
}

VectorGridField tangential_hessian_apply(const BasisTable& tab, const SphCoeffs& c,
                                         const VectorGridField& v) {
    VectorGridField grad = tangential_gradient(tab, c);
    VectorGridField out(tab.ntheta, tab.nphi);
    GridField* comps[3] = {&out.x, &out.y, &out.z};
    const GridField* gcomp[3] = {&grad.x, &grad.y, &grad.z};
    for (int k = 0; k < 3; ++k) {
        VectorGridField gk = tangential_gradient(tab, analyze(tab, *gcomp[k]));
        for (int i = 0; i < tab.ntheta; ++i)
            for (int j = 0; j < tab.nphi; ++j)
                comps[k]->at(i, j) = dot(gk.at(i, j), v.at(i, j));
    }
    return out;
}

GridField hessian_quadratic_form(const BasisTable& tab, const SphCoeffs& c,
                                 const VectorGridField& u, const VectorGridField& v) {
    VectorGridField hv = tangential_hessian_apply(tab, c, v);
    GridField out(tab.ntheta, tab.nphi);
    for (int i = 0; i < tab.ntheta; ++i)
        for (int j = 0; j < tab.nphi; ++j) out.at(i, j) = dot(u.at(i, j), hv.at(i, j));
    return out;
}

double sobolev_norm(const SphCoeffs& c, double s) {
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("sobolev_norm: s must be finite and >= 0");
    double acc = c.at(0, 0) * c.at(0, 0);
    for (int l = 1; l <= c.lmax(); ++l) {
        double w = std::pow(double(l), 2.0 * s);
        for (int m = -l; m <= l; ++m) acc += w * c.at(l, m) * c.at(l, m);
    }
    return std::sqrt(acc);
}

double integrate(const BasisTable& tab, const GridField& f) {
    double acc = 0.0;
    for (int i = 0; i < tab.ntheta; ++i) {
        double row = 0.0;
        for (int j = 0; j < tab.nphi; ++j) row += f.at(i, j);
        acc += tab.weight[i] * row;
    }
    return acc * 2.0 * kPi / tab.nphi;
}

GridField pointwise(const GridField& a, const GridField& b, double (*op)(double, double)) {
    GridField out(a.ntheta(), a.nphi());
    for (int k = 0; k < a.size(); ++k) out.data()[k] = op(a.data()[k], b.data()[k]);
    return out;
}

GridField dot(const VectorGridField& a, const VectorGridField& b) {
    GridField out(a.x.ntheta(), a.x.nphi());
    for (int k = 0; k < out.size(); ++k)
        out.data()[k] = a.x.data()[k] * b.x.data()[k] + a.y.data()[k] * b.y.data()[k] +
                        a.z.data()[k] * b.z.data()[k];
    return out;
}

}  // namespace drop
