#include "drop/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drop {

namespace {

using i128 = __int128;

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// X-side index set of the parity restriction.
bool in_X(int l, int m) { return m >= 0 && ((l - m) % 2 == 0); }

}  // namespace

double dispersion_det(int l, int m, double omega, double sigma0) {
    return -omega * omega * double(m) * m + sigma0 * double(l + 2) * double(l - 1) * double(l);
}

double omega_star(int l0, int m0, double sigma0) {
    if (l0 < 2 || m0 < 1 || m0 > l0)
        throw std::invalid_argument("omega_star: need l0 >= 2 and 1 <= m0 <= l0");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("omega_star: sigma0 must be positive");
    return std::sqrt(sigma0) * std::sqrt(double(l0 + 2) * double(l0 - 1) * double(l0)) / m0;
}

ResonanceReport resonance_set(int l0, int m0) {
    if (l0 < 2 || m0 < 1 || m0 > l0)
        throw std::invalid_argument("resonance_set: need l0 >= 2 and 1 <= m0 <= l0");
    ResonanceReport rep;
    rep.l0 = l0;
    rep.m0 = m0;

    std::int64_t D = std::int64_t(l0 + 2) * (l0 - 1) * l0;
    std::int64_t M2 = std::int64_t(m0) * m0;
    std::int64_t g = std::gcd(D, M2);
    rep.c0_num = D / g;
    rep.c0_den = M2 / g;
    rep.omega_star = omega_star(l0, m0, 1.0);

    // Every solution has l <= c0 = D / m0^2.
    std::int64_t lcap = D / M2;
    for (std::int64_t l = 0; l <= lcap; ++l) {
        i128 lhs_base = i128(M2) * (l + 2) * (l - 1) * l;
        for (std::int64_t m = 0; m <= l; ++m) {
            if (lhs_base == i128(D) * m * m) {
                if (m == 0) {
                    rep.S.emplace_back(int(l), 0);
                } else {
                    rep.S.emplace_back(int(l), int(-m));
                    rep.S.emplace_back(int(l), int(m));
                }
            }
        }
    }
    std::sort(rep.S.begin(), rep.S.end());
    for (auto [l, m] : rep.S)
        if (l >= 1 && m >= 0 && (l - m) % 2 == 0) rep.S_res.emplace_back(l, m);
    rep.simple = rep.S_res.size() == 1 && rep.S_res[0] == std::make_pair(l0, m0);
    return rep;
}

bool verify_family(FamilyKind kind, const std::vector<int>& params) {
    switch (kind) {
        case FamilyKind::odd_prime_product: {
            if (params.empty())
                throw std::invalid_argument("verify_family: need at least one prime");
            std::int64_t prod = 1;
            for (size_t i = 0; i < params.size(); ++i) {
                int p = params[i];
                if (p <= 2 || !is_prime(p))
                    throw std::invalid_argument("verify_family: inputs must be odd primes");
                for (size_t j = 0; j < i; ++j)
                    if (params[j] == p)
                        throw std::invalid_argument("verify_family: primes must be distinct");
                prod *= p;
            }
            return resonance_set(int(prod), int(prod)).simple;
        }
        case FamilyKind::prime_minus_two: {
            if (params.size() != 1)
                throw std::invalid_argument("verify_family: need exactly one prime");
            int l0 = params[0];
            if (l0 < 11 || !is_prime(l0))
                throw std::invalid_argument("verify_family: l0 must be a prime >= 11");
            return resonance_set(l0, l0 - 2).simple;
        }
        case FamilyKind::twice_prime: {
            if (params.size() != 1)
                throw std::invalid_argument("verify_family: need exactly one prime");
            int p = params[0];
            if (p <= 3 || !is_prime(p))
                throw std::invalid_argument("verify_family: p must be a prime > 3");
            return resonance_set(2 * p, 2 * p).simple;
        }
    }
    throw std::invalid_argument("verify_family: unknown family");
}

SphCoeffs apply_M(const SphCoeffs& c) {
    SphCoeffs out(c.lmax());
    for (int l = 0; l <= c.lmax(); ++l)
        for (int m = -l; m <= l; ++m) out.at(l, -m) += -double(m) * c.at(l, m);
    return out;
}

std::pair<double, double> invert_block(int l, int m, double omega, double sigma0, double f_hat,
                                       double g_hat, double tol) {
    double det = dispersion_det(l, m, omega, sigma0);
    double scale = omega * omega * double(m) * m +
                   sigma0 * std::abs(double(l + 2) * double(l - 1) * double(l)) + sigma0;
    if (std::abs(det) > 1e-9 * scale) {
        double eta = (omega * m * f_hat + l * g_hat) / det;
        double beta = (-sigma0 * double(l + 2) * (l - 1) * f_hat - omega * m * g_hat) / det;
        return {eta, beta};
    }
    // Resonant block.
    if (l == 0) {
        if (std::abs(f_hat) > tol)
            throw range_violation("invert_block: (0,0) block requires f = 0", std::abs(f_hat));
        return {-g_hat / (2.0 * sigma0), 0.0};
    }
    double defect = omega * m * f_hat + l * g_hat;
    if (std::abs(defect) > tol)
        throw range_violation("invert_block: resonant block solvability violated",
                              std::abs(defect));
    double denom = double(l) * l + omega * omega * m * m;
    return {-omega * m * f_hat / denom, -double(l) * f_hat / denom};
}

RestrictedInverse invert_L_restricted(const SphCoeffs& f, const SphCoeffs& g, int l0, int m0,
                                      double sigma0, double tol) {
    ResonanceReport rep = resonance_set(l0, m0);
    double omega = omega_star(l0, m0, sigma0);
    int L = f.lmax();
    RestrictedInverse out;
    out.eta = SphCoeffs(L);
    out.beta = SphCoeffs(L);

    auto resonant = [&rep](int l, int m) {
        return std::binary_search(rep.S.begin(), rep.S.end(), std::make_pair(l, m));
    };

    // Block (l, m >= 0) couples eta_{l,m}, beta_{l,-m} with rhs (f_{l,-m}, g_{l,m}).
    for (int l = 0; l <= L; ++l) {
        for (int m = 0; m <= l; ++m) {
            if (!in_X(l, m)) continue;
            double fh = (m >= 1) ? f.at(l, -m) : 0.0;  // f lives in Y: no m = 0 slot
            double gh = g.at(l, m);
            if (resonant(l, m)) {
                auto [eta, beta] = invert_block(l, m, omega, sigma0, fh, gh, tol);
                out.eta.at(l, m) = eta;
                if (m >= 1) out.beta.at(l, -m) = beta;
            } else {
                double det = dispersion_det(l, m, omega, sigma0);
                out.eta.at(l, m) = (omega * m * fh + l * gh) / det;
                if (m >= 1)
                    out.beta.at(l, -m) =
                        (-sigma0 * double(l + 2) * (l - 1) * fh - omega * m * gh) / det;
                if (l >= 1)
                    out.norm_diag = std::max(out.norm_diag,
                                             double(l) * l * l / std::abs(det));
            }
        }
    }
    return out;
}

}  // namespace drop
