#include "drop/travelling.hpp"

#include <algorithm>
#include <cmath>

#include "drop/spectrum.hpp"

namespace drop {

namespace {
constexpr double kSqrt4Pi = 3.5449077018110320546;  // sqrt(4 pi)
}

bool in_TX(int l, int m) { return m >= 0 && ((l - m) % 2 == 0); }
bool in_TY(int l, int m) { return m <= -1 && ((l - m) % 2 == 0); }

SphCoeffs project_X(const SphCoeffs& c) {
    SphCoeffs out(c.lmax());
    for (int l = 0; l <= c.lmax(); ++l)
        for (int m = -l; m <= l; ++m)
            if (in_TX(l, m)) out.at(l, m) = c.at(l, m);
    return out;
}

SphCoeffs project_Y(const SphCoeffs& c) {
    SphCoeffs out(c.lmax());
    for (int l = 0; l <= c.lmax(); ++l)
        for (int m = -l; m <= l; ++m)
            if (in_TY(l, m)) out.at(l, m) = c.at(l, m);
    return out;
}

std::pair<SphCoeffs, SphCoeffs> residual_F(const DnoSolver& dno, double sigma0, double omega,
                                           const SphCoeffs& eta, const SphCoeffs& beta,
                                           double lambda, const DnoOptions& opts,
                                           BallField* warm) {
    const BasisTable& tab = dno.table();
    SurfaceGeometry g = build_geometry(tab, eta);
    SphCoeffs Gbeta = dno.dirichlet_neumann(eta, beta, opts, warm).Gpsi;
    GridField G_grid = synthesize(tab, Gbeta);
    VectorGridField grad_beta = tangential_gradient(tab, beta);
    GridField gb2 = dot(grad_beta, grad_beta);
    GridField gbgh = dot(grad_beta, g.grad_h);
    GridField H = mean_curvature(tab, g);

    GridField f1(tab.ntheta, tab.nphi), f2(tab.ntheta, tab.nphi);
    for (int n = 0; n < f1.size(); ++n) {
        double r = 1.0 + g.h_grid.data()[n];
        double J = g.J.data()[n];
        double G = G_grid.data()[n];
        f1.data()[n] = -J / r * G;
        double w = G + gbgh.data()[n] / (r * J);
        f2.data()[n] =
            -0.5 * w * w + gb2.data()[n] / (2.0 * r * r) + sigma0 * H.data()[n] + lambda;
    }
    SphCoeffs F1 = analyze(tab, f1);
    SphCoeffs F2 = analyze(tab, f2);
    SphCoeffs Meta = apply_M(eta);
    SphCoeffs Mbeta = apply_M(beta);
    for (int k = 0; k < F1.size(); ++k) {
        F1.data()[k] += omega * Meta.data()[k];
        F2.data()[k] += omega * Mbeta.data()[k];
    }
    return {F1, F2};
}

std::pair<SphCoeffs, SphCoeffs> kernel_vector(int l0, int m0, double omega, int lmax) {
    SphCoeffs eta(lmax), beta(lmax);
    eta.at(l0, m0) = double(l0);
    beta.at(l0, -m0) = -omega * m0;
    double norm = std::sqrt(double(l0) * l0 + omega * omega * m0 * m0);
    eta *= 1.0 / norm;
    beta *= 1.0 / norm;
    return {eta, beta};
}

SphCoeffs rotate_state(const SphCoeffs& c, double theta) {
    SphCoeffs out(c.lmax());
    for (int l = 0; l <= c.lmax(); ++l) {
        out.at(l, 0) = c.at(l, 0);
        for (int m = 1; m <= l; ++m) {
            double cm = std::cos(m * theta), sm = std::sin(m * theta);
            out.at(l, m) = cm * c.at(l, m) + sm * c.at(l, -m);
            out.at(l, -m) = -sm * c.at(l, m) + cm * c.at(l, -m);
        }
    }
    return out;
}

double equivariance_defect(const DnoSolver& dno, double sigma0, double omega,
                           const SphCoeffs& eta, const SphCoeffs& beta, double theta,
                           const DnoOptions& opts) {
    auto F = residual_F(dno, sigma0, omega, eta, beta, 0.0, opts);
    auto Frot = residual_F(dno, sigma0, omega, rotate_state(eta, theta),
                           rotate_state(beta, theta), 0.0, opts);
    SphCoeffs d1 = Frot.first - rotate_state(F.first, theta);
    SphCoeffs d2 = Frot.second - rotate_state(F.second, theta);
    return std::sqrt(sobolev_norm(d1, 0.0) * sobolev_norm(d1, 0.0) +
                     sobolev_norm(d2, 0.0) * sobolev_norm(d2, 0.0));
}

namespace {

// Dense LU with partial pivoting.
struct LU {
    int n = 0;
    std::vector<double> a;
    std::vector<int> piv;

    bool factor(std::vector<double> m, int dim) {
        n = dim;
        a = std::move(m);
        piv.resize(n);
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::abs(a[k * n + k]);
            for (int i = k + 1; i < n; ++i) {
                double v = std::abs(a[i * n + k]);
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (best == 0.0) return false;
            piv[k] = p;
            if (p != k)
                for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            double inv = 1.0 / a[k * n + k];
            for (int i = k + 1; i < n; ++i) {
                double f = a[i * n + k] * inv;
                a[i * n + k] = f;
                for (int j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            }
        }
        return true;
    }

    void solve(std::vector<double>& b) const {
        for (int k = 0; k < n; ++k) {
            if (piv[k] != k) std::swap(b[k], b[piv[k]]);
            for (int i = k + 1; i < n; ++i) b[i] -= a[i * n + k] * b[k];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) b[i] -= a[i * n + j] * b[j];
            b[i] /= a[i * n + i];
        }
    }
};

struct UnknownMap {
    int lmax = 0;
    std::vector<std::pair<int, int>> x_modes;  // T_X minus (0,0): eta unknowns
    std::vector<std::pair<int, int>> y_modes;  // T_Y: beta unknowns
    int n_eta = 0, n_beta = 0, total = 0;      // total = n_eta + n_beta + 2 (omega, lambda)

    explicit UnknownMap(int L) : lmax(L) {
        for (int l = 0; l <= L; ++l)
            for (int m = 0; m <= l; ++m)
                if (in_TX(l, m) && !(l == 0 && m == 0)) x_modes.emplace_back(l, m);
        for (int l = 0; l <= L; ++l)
            for (int m = -l; m <= -1; ++m)
                if (in_TY(l, m)) y_modes.emplace_back(l, m);
        n_eta = static_cast<int>(x_modes.size());
        n_beta = static_cast<int>(y_modes.size());
        total = n_eta + n_beta + 2;
    }

    void unpack(const std::vector<double>& x, SphCoeffs& eta, SphCoeffs& beta, double& omega,
                double& lambda) const {
        eta = SphCoeffs(lmax);
        beta = SphCoeffs(lmax);
        for (int i = 0; i < n_eta; ++i) eta.at(x_modes[i].first, x_modes[i].second) = x[i];
        for (int i = 0; i < n_beta; ++i)
            beta.at(y_modes[i].first, y_modes[i].second) = x[n_eta + i];
        omega = x[n_eta + n_beta];
        lambda = x[n_eta + n_beta + 1];
    }
};

struct EquationMap {
    // residual rows: F1 on T_Y, F2 on T_X (including (0,0)), amplitude row
    std::vector<std::pair<int, int>> f1_modes;  // T_Y
    std::vector<std::pair<int, int>> f2_modes;  // T_X
    int n1 = 0, n2 = 0, total = 0;

    explicit EquationMap(int L) {
        for (int l = 0; l <= L; ++l)
            for (int m = -l; m <= -1; ++m)
                if (in_TY(l, m)) f1_modes.emplace_back(l, m);
        for (int l = 0; l <= L; ++l)
            for (int m = 0; m <= l; ++m)
                if (in_TX(l, m)) f2_modes.emplace_back(l, m);
        n1 = static_cast<int>(f1_modes.size());
        n2 = static_cast<int>(f2_modes.size());
        total = n1 + n2 + 1;
    }
};

}  // namespace

Branch continue_branch(const DnoSolver& dno, int l0, int m0, double sigma0, double a_max,
                       int n_steps, double tol, const ContinueOptions& opts) {
    ResonanceReport rep = resonance_set(l0, m0);
    if (!rep.simple)
        throw not_simple("continue_branch: kernel not simple for (l0, m0)");
    if (!(a_max > 0.0) || n_steps < 1 || !(tol > 0.0))
        throw std::invalid_argument("continue_branch: bad parameters");

    const BasisTable& tab = dno.table();
    int L = tab.lmax;
    double om_star = omega_star(l0, m0, sigma0);
    auto [ker_eta, ker_beta] = kernel_vector(l0, m0, om_star, L);

    UnknownMap um(L);
    EquationMap em(L);
    if (um.total != em.total)
        throw std::logic_error("continue_branch: system is not square");
    int N = um.total;

    Branch branch;
    branch.l0 = l0;
    branch.m0 = m0;
    branch.sigma0 = sigma0;
    BranchPoint trivial;
    trivial.omega = om_star;
    trivial.a = 0.0;
    trivial.lambda = -2.0 * sigma0;
    trivial.residual = 0.0;
    trivial.eta = SphCoeffs(L);
    trivial.beta = SphCoeffs(L);
    branch.points.push_back(trivial);

    BallField warm;
    auto amplitude_of = [&](const SphCoeffs& eta, const SphCoeffs& beta) {
        double a = 0.0;
        for (int k = 0; k < eta.size(); ++k)
            a += eta.data()[k] * ker_eta.data()[k] + beta.data()[k] * ker_beta.data()[k];
        return a;
    };

    auto residual_vec = [&](const std::vector<double>& x, double a_target,
                            std::vector<double>& out, double* full_norm = nullptr) {
        SphCoeffs eta, beta;
        double omega, lambda;
        um.unpack(x, eta, beta, omega, lambda);
        auto [F1, F2] = residual_F(dno, sigma0, omega, eta, beta, lambda, opts.dno, &warm);
        out.assign(N, 0.0);
        for (int i = 0; i < em.n1; ++i)
            out[i] = F1.at(em.f1_modes[i].first, em.f1_modes[i].second);
        for (int i = 0; i < em.n2; ++i)
            out[em.n1 + i] = F2.at(em.f2_modes[i].first, em.f2_modes[i].second);
        out[em.n1 + em.n2] = amplitude_of(eta, beta) - a_target;
        if (full_norm) {
            double n1 = sobolev_norm(F1, 0.0);
            double n2 = sobolev_norm(F2, 0.0);
            *full_norm = std::sqrt(n1 * n1 + n2 * n2);
        }
    };

    // Analytic Jacobian of the linearization at u = 0 plus the exact omega and
    // lambda columns and the amplitude row; used as a chord matrix.
    auto analytic_jacobian = [&](const std::vector<double>& x, std::vector<double>& J) {
        SphCoeffs eta, beta;
        double omega, lambda;
        um.unpack(x, eta, beta, omega, lambda);
        J.assign(size_t(N) * N, 0.0);
        auto col_eta = [&](int l, int m) {
            for (int i = 0; i < um.n_eta; ++i)
                if (um.x_modes[i] == std::make_pair(l, m)) return i;
            return -1;
        };
        auto col_beta = [&](int l, int m) {
            for (int i = 0; i < um.n_beta; ++i)
                if (um.y_modes[i] == std::make_pair(l, m)) return um.n_eta + i;
            return -1;
        };
        int col_omega = um.n_eta + um.n_beta;
        int col_lambda = col_omega + 1;
        SphCoeffs Meta = apply_M(eta);
        SphCoeffs Mbeta = apply_M(beta);
        // F1 rows (mode (l, mu), mu < 0): omega*mu*eta_{l,-mu} - l*beta_{l,mu}
        for (int i = 0; i < em.n1; ++i) {
            auto [l, mu] = em.f1_modes[i];
            int ce = col_eta(l, -mu);
            if (ce >= 0) J[size_t(i) * N + ce] = omega * mu;
            int cb = col_beta(l, mu);
            if (cb >= 0) J[size_t(i) * N + cb] = -double(l);
            J[size_t(i) * N + col_omega] = Meta.at(l, mu);
        }
        // F2 rows (mode (l, nu), nu >= 0): omega*nu*beta_{l,-nu}
        //   + sigma0 (l+2)(l-1) eta_{l,nu} + lambda sqrt(4pi) delta_{(0,0)}
        for (int i = 0; i < em.n2; ++i) {
            auto [l, nu] = em.f2_modes[i];
            int row = em.n1 + i;
            int ce = col_eta(l, nu);
            if (ce >= 0) J[size_t(row) * N + ce] = sigma0 * double(l + 2) * (l - 1);
            int cb = col_beta(l, -nu);
            if (cb >= 0) J[size_t(row) * N + cb] = omega * nu;
            if (l == 0 && nu == 0) J[size_t(row) * N + col_lambda] = kSqrt4Pi;
            J[size_t(row) * N + col_omega] = Mbeta.at(l, nu);
        }
        // amplitude row
        int row = em.n1 + em.n2;
        for (int i = 0; i < um.n_eta; ++i)
            J[size_t(row) * N + i] = ker_eta.at(um.x_modes[i].first, um.x_modes[i].second);
        for (int i = 0; i < um.n_beta; ++i)
            J[size_t(row) * N + um.n_eta + i] =
                ker_beta.at(um.y_modes[i].first, um.y_modes[i].second);
    };

    auto fd_jacobian = [&](const std::vector<double>& x, double a_target,
                           std::vector<double>& J) {
        std::vector<double> r0(N), r1(N);
        residual_vec(x, a_target, r0);
        std::vector<double> xp = x;
        J.assign(size_t(N) * N, 0.0);
        for (int c = 0; c < N; ++c) {
            double step = 1e-7 * std::max(1.0, std::abs(x[c]));
            xp[c] = x[c] + step;
            residual_vec(xp, a_target, r1);
            xp[c] = x[c];
            for (int r = 0; r < N; ++r) J[size_t(r) * N + c] = (r1[r] - r0[r]) / step;
        }
    };

    auto norm2 = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double t : v) acc += t * t;
        return std::sqrt(acc);
    };

    std::vector<double> x(N, 0.0);
    // seed at the first amplitude step from the kernel direction
    double da = a_max / n_steps;
    {
        SphCoeffs eta0 = da * ker_eta;
        SphCoeffs beta0 = da * ker_beta;
        for (int i = 0; i < um.n_eta; ++i)
            x[i] = eta0.at(um.x_modes[i].first, um.x_modes[i].second);
        for (int i = 0; i < um.n_beta; ++i)
            x[um.n_eta + i] = beta0.at(um.y_modes[i].first, um.y_modes[i].second);
        x[um.n_eta + um.n_beta] = om_star;
        x[um.n_eta + um.n_beta + 1] = -2.0 * sigma0;
    }
    std::vector<double> x_prev = x;

    for (int k = 1; k <= n_steps; ++k) {
        double a_target = k * da;
        if (k >= 3) {
            // linear extrapolation predictor
            std::vector<double> xp(N);
            for (int i = 0; i < N; ++i) xp[i] = 2.0 * x[i] - x_prev[i];
            x_prev = x;
            x = xp;
        } else if (k == 2) {
            x_prev = x;
            for (int i = 0; i < um.n_eta; ++i)
                x[i] += da * ker_eta.at(um.x_modes[i].first, um.x_modes[i].second);
            for (int i = 0; i < um.n_beta; ++i)
                x[um.n_eta + i] += da * ker_beta.at(um.y_modes[i].first, um.y_modes[i].second);
        }

        std::vector<double> r(N), Jm;
        LU lu;
        bool use_fd = false;
        bool factored = false;
        double full_norm = 0.0;
        residual_vec(x, a_target, r, &full_norm);
        double rn = norm2(r);
        bool converged = rn < tol;
        int iters_left = opts.newton_maxiter;
        while (!converged && iters_left-- > 0) {
            if (!factored) {
                if (use_fd)
                    fd_jacobian(x, a_target, Jm);
                else
                    analytic_jacobian(x, Jm);
                if (!lu.factor(Jm, N))
                    throw continuation_failure("continue_branch: singular Jacobian", branch);
                factored = true;
            }
            std::vector<double> dx = r;
            lu.solve(dx);
            double damp = 1.0;
            double rn_new = rn;
            std::vector<double> x_new(N), r_new(N);
            for (int attempt = 0; attempt < 8; ++attempt) {
                for (int i = 0; i < N; ++i) x_new[i] = x[i] - damp * dx[i];
                residual_vec(x_new, a_target, r_new, &full_norm);
                rn_new = norm2(r_new);
                if (rn_new < rn || rn_new < tol) break;
                damp *= 0.5;
            }
            if (rn_new >= rn && !(rn_new < tol)) {
                if (!use_fd) {
                    use_fd = true;  // fall back to the FD Jacobian
                    factored = false;
                    continue;
                }
                throw continuation_failure("continue_branch: Newton stalled", branch);
            }
            // slow chord convergence: refresh with the FD Jacobian
            if (!use_fd && rn_new > 0.7 * rn && rn_new >= tol) {
                use_fd = true;
                factored = false;
            }
            x = x_new;
            r = r_new;
            rn = rn_new;
            converged = rn < tol;
        }
        if (!converged)
            throw continuation_failure("continue_branch: Newton did not converge", branch);

        BranchPoint p;
        um.unpack(x, p.eta, p.beta, p.omega, p.lambda);
        p.a = amplitude_of(p.eta, p.beta);
        p.residual = full_norm;
        branch.points.push_back(p);
        if (k == 1) x_prev = x;
    }
    return branch;
}

SurfaceState travelling_to_timewave(const BranchPoint& p, double sigma0, double t) {
    SurfaceState s;
    s.sigma0 = sigma0;
    double theta = p.omega * t;
    s.h = rotate_state(p.eta, theta);
    s.psi = rotate_state(p.beta, theta);
    s.psi.at(0, 0) += p.lambda * t * kSqrt4Pi;
    return s;
}

}  // namespace drop
