#include "drop/dno.hpp"

#include <algorithm>
#include <cmath>

namespace drop {

namespace {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    // Nodes/weights on (0,1), ascending.
    std::vector<double> xs(n), ws(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        xs[i] = t;
        ws[i] = 2.0 / ((1.0 - t * t) * pp * pp);
    }
    std::vector<std::pair<double, double>> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {0.5 * (1.0 - xs[i]), 0.5 * ws[i]};
    std::sort(pts.begin(), pts.end());
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = pts[i].first;
        w[i] = pts[i].second;
    }
}

// Barycentric weights for interpolation nodes.
std::vector<double> bary_weights(const std::vector<double>& x) {
    int n = static_cast<int>(x.size());
    std::vector<double> w(n, 1.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j) w[j] /= (x[j] - x[i]);
    return w;
}

// Values of all Lagrange basis polynomials at point s (s not a node).
void lagrange_all(const std::vector<double>& x, const std::vector<double>& bw, double s,
                  std::vector<double>& out) {
    int n = static_cast<int>(x.size());
    out.assign(n, 0.0);
    double denom = 0.0;
    for (int j = 0; j < n; ++j) denom += bw[j] / (s - x[j]);
    for (int j = 0; j < n; ++j) out[j] = (bw[j] / (s - x[j])) / denom;
}

}  // namespace

BallCoefficientField assemble_P(const BasisTable& tab, const SphCoeffs& h) {
    SurfaceGeometry g = build_geometry(tab, h);
    BallCoefficientField P;
    P.ntheta = tab.ntheta;
    P.nphi = tab.nphi;
    for (auto& c : P.comp) c.assign(tab.ntheta * tab.nphi, 0.0);
    for (int i = 0; i < tab.ntheta; ++i) {
        for (int j = 0; j < tab.nphi; ++j) {
            int k = i * tab.nphi + j;
            double r = 1.0 + g.h_grid.at(i, j);
            Vec3 x = tab.node_position(i, j);
            Vec3 gh = g.grad_h.at(i, j);
            double q = g.grad_h_sq.at(i, j) / r;
            P.comp[0][k] = r - 2.0 * gh[0] * x[0] + q * x[0] * x[0];
            P.comp[1][k] = -gh[0] * x[1] - gh[1] * x[0] + q * x[0] * x[1];
            P.comp[2][k] = -gh[0] * x[2] - gh[2] * x[0] + q * x[0] * x[2];
            P.comp[3][k] = r - 2.0 * gh[1] * x[1] + q * x[1] * x[1];
            P.comp[4][k] = -gh[1] * x[2] - gh[2] * x[1] + q * x[1] * x[2];
            P.comp[5][k] = r - 2.0 * gh[2] * x[2] + q * x[2] * x[2];
        }
    }
    return P;
}

DnoSolver::DnoSolver(const BasisTable& tab, int radial_nodes) : tab_(tab) {
    nr_ = radial_nodes > 0 ? radial_nodes : 2 * tab.lmax;
    if (nr_ < tab.lmax + 2) nr_ = tab.lmax + 2;
    gauss_legendre_01(nr_, r_, rw_);

    std::vector<double> bw = bary_weights(r_);
    // Differentiation matrix D_{kj} = L_j'(r_k).
    diff_.assign(nr_ * nr_, 0.0);
    for (int k = 0; k < nr_; ++k) {
        double rowsum = 0.0;
        for (int j = 0; j < nr_; ++j) {
            if (j == k) continue;
            double d = (bw[j] / bw[k]) / (r_[k] - r_[j]);
            diff_[k * nr_ + j] = d;
            rowsum += d;
        }
        diff_[k * nr_ + k] = -rowsum;
    }

    // Green matrices. For Delta u = f at mode l:
    //   u(r) = (2l+1)^{-1} [ r^l S(1) - T~(r) - S~(r) ],  u'(1) = S(1),
    // with S~(r) = r^{-l-1} int_0^r s^{l+1} (s f) ds and
    //      T~(r) = r^l int_r^1 s^{-l} (s f) ds.
    // The matrices act on nodal samples of F = r f; carrying the extra factor
    // of r in the data keeps the 1/r part of the divergence off the
    // interpolation path. Both running integrals are accumulated
    // panel-by-panel between consecutive radial nodes with the kernels kept
    // in ratio form, so every stored quantity stays O(1) for all l.
    int L = tab.lmax;
    int np = std::max(64, (L + nr_) / 2 + 6);
    std::vector<double> qx, qw;
    gauss_legendre_01(np, qx, qw);

    green_.assign(L + 1, std::vector<double>(nr_ * nr_, 0.0));
    bnd_.assign(L + 1, std::vector<double>(nr_, 0.0));

    std::vector<double> lag(nr_);
    std::vector<std::vector<double>> Srow(nr_, std::vector<double>(nr_, 0.0));
    std::vector<std::vector<double>> Trow(nr_, std::vector<double>(nr_, 0.0));
    std::vector<double> S1(nr_), prev(nr_), cur(nr_);

    for (int l = 0; l <= L; ++l) {
        // Forward sweep: S~ at each node, then S(1).
        std::fill(prev.begin(), prev.end(), 0.0);
        double a = 0.0;
        for (int k = 0; k < nr_; ++k) {
            double b = r_[k];
            double carry = (k == 0) ? 0.0 : std::pow(a / b, l + 1);
            for (int j = 0; j < nr_; ++j) cur[j] = carry * prev[j];
            for (int q = 0; q < np; ++q) {
                double s = a + (b - a) * qx[q];
                double wq = (b - a) * qw[q] * std::pow(s / b, l + 1);
                lagrange_all(r_, bw, s, lag);
                for (int j = 0; j < nr_; ++j) cur[j] += wq * lag[j];
            }
            Srow[k] = cur;
            prev = cur;
            a = b;
        }
        {
            double b = 1.0;
            double carry = std::pow(r_[nr_ - 1], l + 1);
            for (int j = 0; j < nr_; ++j) S1[j] = carry * prev[j];
            for (int q = 0; q < np; ++q) {
                double s = r_[nr_ - 1] + (b - r_[nr_ - 1]) * qx[q];
                double wq = (b - r_[nr_ - 1]) * qw[q] * std::pow(s, l + 1);
                lagrange_all(r_, bw, s, lag);
                for (int j = 0; j < nr_; ++j) S1[j] += wq * lag[j];
            }
        }
        // Backward sweep: T~ at each node (T(1) = 0).
        std::fill(prev.begin(), prev.end(), 0.0);
        for (int k = nr_ - 1; k >= 0; --k) {
            double lo = r_[k];
            double hi = (k == nr_ - 1) ? 1.0 : r_[k + 1];
            double carry = (k == nr_ - 1) ? 0.0 : std::pow(lo / hi, l);
            for (int j = 0; j < nr_; ++j) cur[j] = carry * prev[j];
            for (int q = 0; q < np; ++q) {
                double s = lo + (hi - lo) * qx[q];
                double wq = (hi - lo) * qw[q] * std::pow(lo / s, l);
                lagrange_all(r_, bw, s, lag);
                for (int j = 0; j < nr_; ++j) cur[j] += wq * lag[j];
            }
            Trow[k] = cur;
            prev = cur;
        }
        double inv = 1.0 / (2.0 * l + 1.0);
        for (int k = 0; k < nr_; ++k) {
            double rl = std::pow(r_[k], l);
            for (int j = 0; j < nr_; ++j)
                green_[l][k * nr_ + j] = inv * (rl * S1[j] - Trow[k][j] - Srow[k][j]);
        }
        bnd_[l] = S1;
    }
}

BallField DnoSolver::harmonic_extension(const SphCoeffs& psi) const {
    if (psi.lmax() != tab_.lmax)
        throw std::invalid_argument("harmonic_extension: truncation does not match table");
    BallField u(tab_.lmax, nr_);
    for (int l = 0; l <= tab_.lmax; ++l) {
        for (int m = -l; m <= l; ++m) {
            int mode = SphCoeffs::index(l, m);
            double c = psi.at(l, m);
            for (int k = 0; k < nr_; ++k) u.at(mode, k) = c * std::pow(r_[k], l);
        }
    }
    return u;
}

BallField DnoSolver::poisson_solve_ball(const BallField& rhs) const {
    BallField scaled = rhs;
    for (int mode = 0; mode < scaled.modes(); ++mode)
        for (int k = 0; k < nr_; ++k) scaled.at(mode, k) *= r_[k];
    return poisson_solve_scaled(scaled);
}

BallField DnoSolver::poisson_solve_scaled(const BallField& rf) const {
    BallField u(rf.lmax, nr_);
    for (int l = 0; l <= rf.lmax; ++l) {
        const std::vector<double>& G = green_[l];
        for (int m = -l; m <= l; ++m) {
            int mode = SphCoeffs::index(l, m);
            const double* f = rf.data.data() + mode * nr_;
            double* out = u.data.data() + mode * nr_;
            for (int k = 0; k < nr_; ++k) {
                double acc = 0.0;
                const double* row = G.data() + k * nr_;
                for (int j = 0; j < nr_; ++j) acc += row[j] * f[j];
                out[k] = acc;
            }
        }
    }
    return u;
}

SphCoeffs DnoSolver::poisson_boundary_derivative(const BallField& rhs) const {
    BallField scaled = rhs;
    for (int mode = 0; mode < scaled.modes(); ++mode)
        for (int k = 0; k < nr_; ++k) scaled.at(mode, k) *= r_[k];
    return boundary_derivative_scaled(scaled);
}

SphCoeffs DnoSolver::boundary_derivative_scaled(const BallField& rf) const {
    SphCoeffs d(rf.lmax);
    for (int l = 0; l <= rf.lmax; ++l) {
        const std::vector<double>& row = bnd_[l];
        for (int m = -l; m <= l; ++m) {
            int mode = SphCoeffs::index(l, m);
            const double* f = rf.data.data() + mode * nr_;
            double acc = 0.0;
            for (int j = 0; j < nr_; ++j) acc += row[j] * f[j];
            d.at(l, m) = acc;
        }
    }
    return d;
}

namespace {

// Gathers the modal slice of a ball field at one radial node.
SphCoeffs modal_slice(const BallField& u, int k) {
    SphCoeffs c(u.lmax);
    for (int mode = 0; mode < u.modes(); ++mode) c.data()[mode] = u.at(mode, k);
    return c;
}

}  // namespace

// rhs <- -r div((P - I) grad u), the scaled modal right-hand side of the
// correction problem, assembled spectrally node by node.
void DnoSolver::apply_divergence(const SurfaceGeometry& geom, const BallCoefficientField& Q,
                                 const BallField& u, BallField& rhs) const {
    (void)geom;
    int nth = tab_.ntheta, nph = tab_.nphi;
    // Radial derivative of all modal profiles.
    BallField du(u.lmax, nr_);
    for (int mode = 0; mode < u.modes(); ++mode) {
        const double* prof = u.data.data() + mode * nr_;
        double* out = du.data.data() + mode * nr_;
        for (int k = 0; k < nr_; ++k) {
            double acc = 0.0;
            const double* row = diff_.data() + k * nr_;
            for (int j = 0; j < nr_; ++j) acc += row[j] * prof[j];
            out[k] = acc;
        }
    }

    BallField gr_modal(u.lmax, nr_);           // modal profiles of <g, x>
    std::vector<GridField> trd(nr_);           // Tr D_{S2}(g) per radial node
    for (int k = 0; k < nr_; ++k) {
        GridField dur = synthesize(tab_, modal_slice(du, k));
        VectorGridField tg = tangential_gradient(tab_, modal_slice(u, k));
        double inv_r = 1.0 / r_[k];
        VectorGridField g(nth, nph);
        GridField gr(nth, nph);
        for (int i = 0; i < nth; ++i) {
            for (int j = 0; j < nph; ++j) {
                Vec3 x = tab_.node_position(i, j);
                Vec3 grad_u = {dur.at(i, j) * x[0] + inv_r * tg.x.at(i, j),
                               dur.at(i, j) * x[1] + inv_r * tg.y.at(i, j),
                               dur.at(i, j) * x[2] + inv_r * tg.z.at(i, j)};
                Vec3 gv = Q.apply(i, j, grad_u);
                g.set(i, j, gv);
                gr.at(i, j) = dot(gv, x);
            }
        }
        SphCoeffs grc = analyze(tab_, gr);
        for (int mode = 0; mode < gr_modal.modes(); ++mode) gr_modal.at(mode, k) = grc.data()[mode];
        trd[k] = tangential_divergence(tab_, analyze(tab_, g.x), analyze(tab_, g.y),
                                       analyze(tab_, g.z));
    }
    // d/dr of <g, x> profiles.
    BallField dgr(u.lmax, nr_);
    for (int mode = 0; mode < u.modes(); ++mode) {
        const double* prof = gr_modal.data.data() + mode * nr_;
        double* out = dgr.data.data() + mode * nr_;
        for (int k = 0; k < nr_; ++k) {
            double acc = 0.0;
            const double* row = diff_.data() + k * nr_;
            for (int j = 0; j < nr_; ++j) acc += row[j] * prof[j];
            out[k] = acc;
        }
    }
    // r F = -(r d/dr g_r + TrD), analyzed per node.
    for (int k = 0; k < nr_; ++k) {
        GridField dgr_k = synthesize(tab_, modal_slice(dgr, k));
        GridField F(nth, nph);
        for (int n = 0; n < F.size(); ++n)
            F.data()[n] = -(r_[k] * dgr_k.data()[n] + trd[k].data()[n]);
        SphCoeffs Fc = analyze(tab_, F);
        for (int mode = 0; mode < rhs.modes(); ++mode) rhs.at(mode, k) = Fc.data()[mode];
    }
}

DnoResult DnoSolver::dirichlet_neumann(const SphCoeffs& h, const SphCoeffs& psi,
                                       const DnoOptions& opts, BallField* warm) const {
    if (h.lmax() != tab_.lmax || psi.lmax() != tab_.lmax)
        throw std::invalid_argument("dirichlet_neumann: truncation does not match table");
    if (opts.tol <= 0.0 || opts.maxiter < 1 || opts.series_order < 0)
        throw std::invalid_argument("dirichlet_neumann: bad options");

    SurfaceGeometry geom = build_geometry(tab_, h);
    BallCoefficientField Q = assemble_P(tab_, h);
    // Q <- P - I
    for (int n = 0; n < tab_.ntheta * tab_.nphi; ++n) {
        Q.comp[0][n] -= 1.0;
        Q.comp[3][n] -= 1.0;
        Q.comp[5][n] -= 1.0;
    }

    BallField u0 = harmonic_extension(psi);
    BallField u = u0;
    if (warm && warm->lmax == u.lmax && warm->nr == nr_) u = *warm;

    SphCoeffs du1(tab_.lmax);  // boundary derivative of the correction
    DnoResult res;

    if (opts.mode == DnoOptions::Mode::fixed_point) {
        BallField rhs(tab_.lmax, nr_);
        double prev_inc = 0.0;
        bool converged = false;
        for (int it = 1; it <= opts.maxiter; ++it) {
            apply_divergence(geom, Q, u, rhs);
            BallField v = poisson_solve_scaled(rhs);
            // increment = packed modal max |u_new - u|, measured in H^{1/2}
            SphCoeffs inc_pack(tab_.lmax);
            for (int mode = 0; mode < u.modes(); ++mode) {
                double worst = 0.0;
                for (int k = 0; k < nr_; ++k) {
                    double nv = u0.at(mode, k) + v.at(mode, k);
                    worst = std::max(worst, std::abs(nv - u.at(mode, k)));
                    u.at(mode, k) = nv;
                }
                inc_pack.data()[mode] = worst;
            }
            double inc = sobolev_norm(inc_pack, 0.5);
            res.iterations = it;
            res.final_increment = inc;
            if (prev_inc > 0.0) res.contraction = inc / prev_inc;
            prev_inc = inc;
            if (inc < opts.tol) {
                du1 = boundary_derivative_scaled(rhs);
                converged = true;
                break;
            }
            if (!std::isfinite(inc) || inc > 1e8)
                throw convergence_failure("dirichlet_neumann: fixed point diverged", inc, it);
        }
        if (!converged)
            throw convergence_failure("dirichlet_neumann: no convergence within maxiter",
                                      res.final_increment, res.iterations);
    } else {
        // Series mode: u = sum_n u_n with -Delta u_n = div g_n,
        // g_n = P_1 grad u_{n-1} + |grad h|^2 (sum_{k<=n-2} (-h)^{n-2-k} d_r u_k) x.
        int nth = tab_.ntheta, nph = tab_.nphi;
        // P_1 = h I - grad h (x) x - x (x) grad h   (0-homogeneous)
        BallCoefficientField P1;
        P1.ntheta = nth;
        P1.nphi = nph;
        for (auto& c : P1.comp) c.assign(nth * nph, 0.0);
        for (int i = 0; i < nth; ++i) {
            for (int j = 0; j < nph; ++j) {
                int n = i * nph + j;
                double hv = geom.h_grid.at(i, j);
                Vec3 x = tab_.node_position(i, j);
                Vec3 gh = geom.grad_h.at(i, j);
                P1.comp[0][n] = hv - 2.0 * gh[0] * x[0];
                P1.comp[1][n] = -gh[0] * x[1] - gh[1] * x[0];
                P1.comp[2][n] = -gh[0] * x[2] - gh[2] * x[0];
                P1.comp[3][n] = hv - 2.0 * gh[1] * x[1];
                P1.comp[4][n] = -gh[1] * x[2] - gh[2] * x[1];
                P1.comp[5][n] = hv - 2.0 * gh[2] * x[2];
            }
        }
        u = u0;
        BallField u_prev = u0;  // u_{n-1}
        // acc(node, k) = sum_{k'<=n-2} (-h)^{n-2-k'} d_r u_{k'} on the ball grid
        std::vector<GridField> acc(nr_, GridField(nth, nph));
        std::vector<GridField> dr_prev(nr_, GridField(nth, nph));  // d_r u_{n-1} per node
        BallField rhs(tab_.lmax, nr_);
        for (int n = 1; n <= opts.series_order; ++n) {
            // radial derivative of u_{n-1}
            BallField du_prev(tab_.lmax, nr_);
            for (int mode = 0; mode < u_prev.modes(); ++mode) {
                const double* prof = u_prev.data.data() + mode * nr_;
                double* out = du_prev.data.data() + mode * nr_;
                for (int k = 0; k < nr_; ++k) {
                    double a2 = 0.0;
                    const double* row = diff_.data() + k * nr_;
                    for (int j = 0; j < nr_; ++j) a2 += row[j] * prof[j];
                    out[k] = a2;
                }
            }
            BallField gr_modal(tab_.lmax, nr_);
            std::vector<GridField> trd(nr_);
            for (int k = 0; k < nr_; ++k) {
                GridField dur = synthesize(tab_, modal_slice(du_prev, k));
                VectorGridField tg = tangential_gradient(tab_, modal_slice(u_prev, k));
                double inv_r = 1.0 / r_[k];
                // update acc for THIS order: acc_n = (-h) acc_{n-1} + d_r u_{n-2}
                if (n >= 2) {
                    for (int idx = 0; idx < nth * nph; ++idx) {
                        acc[k].data()[idx] = -geom.h_grid.data()[idx] * acc[k].data()[idx] +
                                             dr_prev[k].data()[idx];
                    }
                }
                VectorGridField g(nth, nph);
                GridField gr(nth, nph);
                for (int i = 0; i < nth; ++i) {
                    for (int j = 0; j < nph; ++j) {
                        int idx = i * nph + j;
                        Vec3 x = tab_.node_position(i, j);
                        Vec3 grad_u = {dur.at(i, j) * x[0] + inv_r * tg.x.at(i, j),
                                       dur.at(i, j) * x[1] + inv_r * tg.y.at(i, j),
                                       dur.at(i, j) * x[2] + inv_r * tg.z.at(i, j)};
                        Vec3 gv = P1.apply(i, j, grad_u);
                        double rad = geom.grad_h_sq.data()[idx] * acc[k].data()[idx];
                        gv = {gv[0] + rad * x[0], gv[1] + rad * x[1], gv[2] + rad * x[2]};
                        g.set(i, j, gv);
                        gr.at(i, j) = dot(gv, x);
                    }
                }
                dr_prev[k] = dur;
                SphCoeffs grc = analyze(tab_, gr);
                for (int mode = 0; mode < gr_modal.modes(); ++mode)
                    gr_modal.at(mode, k) = grc.data()[mode];
                trd[k] = tangential_divergence(tab_, analyze(tab_, g.x), analyze(tab_, g.y),
                                               analyze(tab_, g.z));
            }
            BallField dgr(tab_.lmax, nr_);
            for (int mode = 0; mode < dgr.modes(); ++mode) {
                const double* prof = gr_modal.data.data() + mode * nr_;
                double* out = dgr.data.data() + mode * nr_;
                for (int k = 0; k < nr_; ++k) {
                    double a2 = 0.0;
                    const double* row = diff_.data() + k * nr_;
                    for (int j = 0; j < nr_; ++j) a2 += row[j] * prof[j];
                    out[k] = a2;
                }
            }
            for (int k = 0; k < nr_; ++k) {
                GridField dgr_k = synthesize(tab_, modal_slice(dgr, k));
                GridField F(nth, nph);
                for (int idx = 0; idx < F.size(); ++idx)
                    F.data()[idx] = -(r_[k] * dgr_k.data()[idx] + trd[k].data()[idx]);
                SphCoeffs Fc = analyze(tab_, F);
                for (int mode = 0; mode < rhs.modes(); ++mode) rhs.at(mode, k) = Fc.data()[mode];
            }
            BallField un = poisson_solve_scaled(rhs);
            du1 += boundary_derivative_scaled(rhs);
            for (size_t idx = 0; idx < u.data.size(); ++idx) u.data[idx] += un.data[idx];
            u_prev = un;
            res.iterations = n;
        }
    }

    if (warm) *warm = u;

    // Boundary extraction: G = J <grad u, x>/(1+h)^2 - <grad psi, grad h>/((1+h) J).
    SphCoeffs dur1(tab_.lmax);
    for (int l = 0; l <= tab_.lmax; ++l)
        for (int m = -l; m <= l; ++m)
            dur1.at(l, m) = l * psi.at(l, m) + du1.at(l, m);
    GridField dur1_grid = synthesize(tab_, dur1);
    VectorGridField grad_psi = tangential_gradient(tab_, psi);
    GridField gpgh = dot(grad_psi, geom.grad_h);
    GridField G(tab_.ntheta, tab_.nphi);
    for (int n = 0; n < G.size(); ++n) {
        double r = 1.0 + geom.h_grid.data()[n];
        double J = geom.J.data()[n];
        G.data()[n] = J * dur1_grid.data()[n] / (r * r) - gpgh.data()[n] / (r * J);
    }
    res.Gpsi = analyze(tab_, G);
    return res;
}

SphCoeffs DnoSolver::extract_via_P(const SphCoeffs& h, const SphCoeffs& psi,
                                   const DnoOptions& opts) const {
    SurfaceGeometry geom = build_geometry(tab_, h);
    BallCoefficientField P = assemble_P(tab_, h);
    BallField sol(tab_.lmax, nr_);
    DnoOptions o = opts;
    DnoResult r = dirichlet_neumann(h, psi, o, &sol);
    (void)r;
    // u'(1) recovered through the Green boundary rows of the converged field;
    // grad u at r = 1 is then u'(1) x + grad_{S2} psi.
    BallCoefficientField Q = P;
    for (int n = 0; n < tab_.ntheta * tab_.nphi; ++n) {
        Q.comp[0][n] -= 1.0;
        Q.comp[3][n] -= 1.0;
        Q.comp[5][n] -= 1.0;
    }
    BallField rhs(tab_.lmax, nr_);
    apply_divergence(geom, Q, sol, rhs);
    SphCoeffs du1 = boundary_derivative_scaled(rhs);
    SphCoeffs dur1(tab_.lmax);
    for (int l = 0; l <= tab_.lmax; ++l)
        for (int m = -l; m <= l; ++m) dur1.at(l, m) = l * psi.at(l, m) + du1.at(l, m);
    GridField dur1_grid = synthesize(tab_, dur1);
    VectorGridField grad_psi = tangential_gradient(tab_, psi);
    GridField G(tab_.ntheta, tab_.nphi);
    for (int i = 0; i < tab_.ntheta; ++i) {
        for (int j = 0; j < tab_.nphi; ++j) {
            Vec3 x = tab_.node_position(i, j);
            Vec3 grad_u = {dur1_grid.at(i, j) * x[0] + grad_psi.x.at(i, j),
                           dur1_grid.at(i, j) * x[1] + grad_psi.y.at(i, j),
                           dur1_grid.at(i, j) * x[2] + grad_psi.z.at(i, j)};
            Vec3 Pg = P.apply(i, j, grad_u);
            double r1 = 1.0 + geom.h_grid.at(i, j);
            G.at(i, j) = dot(Pg, x) / (r1 * geom.J.at(i, j));
        }
    }
    return analyze(tab_, G);
}

double DnoSolver::self_adjointness_defect(const SphCoeffs& h, const SphCoeffs& psi1,
                                          const SphCoeffs& psi2, const DnoOptions& opts) const {
    SurfaceGeometry geom = build_geometry(tab_, h);
    SphCoeffs g1 = dirichlet_neumann(h, psi1, opts).Gpsi;
    SphCoeffs g2 = dirichlet_neumann(h, psi2, opts).Gpsi;
    GridField f1 = synthesize(tab_, psi1);
    GridField f2 = synthesize(tab_, psi2);
    GridField G1 = synthesize(tab_, g1);
    GridField G2 = synthesize(tab_, g2);
    GridField integrand(tab_.ntheta, tab_.nphi);
    for (int n = 0; n < integrand.size(); ++n) {
        double mu = (1.0 + geom.h_grid.data()[n]) * geom.J.data()[n];
        integrand.data()[n] = (f1.data()[n] * G2.data()[n] - f2.data()[n] * G1.data()[n]) * mu;
    }
    return std::abs(integrate(tab_, integrand));
}

SphCoeffs dirichlet_neumann(const BasisTable& tab, const SphCoeffs& h, const SphCoeffs& psi,
                            const DnoOptions& opts) {
    DnoSolver solver(tab, opts.radial_nodes);
    return solver.dirichlet_neumann(h, psi, opts).Gpsi;
}

double self_adjointness_defect(const BasisTable& tab, const SphCoeffs& h, const SphCoeffs& psi1,
                               const SphCoeffs& psi2, const DnoOptions& opts) {
    DnoSolver solver(tab, opts.radial_nodes);
    return solver.self_adjointness_defect(h, psi1, psi2, opts);
}

}  // namespace drop
