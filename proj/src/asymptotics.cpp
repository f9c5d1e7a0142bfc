#include "ibd/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace ibd {

namespace {

constexpr double two_pi = 6.2831853071795864769252867665590058;

void require_mu(double mu) {
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument(
            "asymptotics: mu must lie in (0, 1) (mu = 0 makes the return sums diverge)");
    }
}

void require_nu(double nu) {
    if (!(nu > 0.0) || nu > 1.0) {
        throw std::invalid_argument("asymptotics: nu must lie in (0, 1]");
    }
}

struct abg_hat {
    double alpha, beta, gamma;
};

abg_hat hat_values(double m, double phat) {
    const double mp = m * phat;
    const double mp2 = m * phat * phat;
    abg_hat h{};
    h.alpha = mp2 / (1.0 - mp2);
    h.beta = mp2 * mp / ((1.0 - mp) * (1.0 - mp2));
    h.gamma = mp2 / ((1.0 - mp2) * (1.0 - mp2));
    return h;
}

} // namespace

abg_triple abg_spectral(const site& x, double mu, double nu, const torus_spec& torus,
                        const migration_kernel& kernel) {
    require_mu(mu);
    require_nu(nu);
    torus.validate();
    const double m = (1.0 - mu) * (1.0 - mu);
    const std::int64_t n = torus.n_sites();
    abg_triple out{};
    for (std::int64_t idx = 0; idx < n; ++idx) {
        const site k = torus.site_of(idx);
        const double qh = kernel.qhat(torus, k);
        const double phat = 1.0 - nu + nu * qh;
        const abg_hat h = hat_values(m, phat);
        double dot = 0.0;
        for (int j = 0; j < torus.d; ++j) {
            dot += static_cast<double>(k[static_cast<std::size_t>(j)]) *
                   static_cast<double>(x[static_cast<std::size_t>(j)]);
        }
        const double c = std::cos(two_pi * dot / static_cast<double>(torus.L));
        out.alpha += c * h.alpha;
        out.beta += c * h.beta;
        out.gamma += c * h.gamma;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.alpha *= inv_n;
    out.beta *= inv_n;
    out.gamma *= inv_n;
    return out;
}

std::vector<abg_triple> abg_spectral_field(double mu, double nu, const torus_spec& torus,
                                           const migration_kernel& kernel) {
    require_mu(mu);
    require_nu(nu);
    torus.validate();
    const double m = (1.0 - mu) * (1.0 - mu);
    const std::int64_t n = torus.n_sites();
    std::vector<abg_hat> hats(static_cast<std::size_t>(n));
    for (std::int64_t idx = 0; idx < n; ++idx) {
        const site k = torus.site_of(idx);
        const double phat = 1.0 - nu + nu * kernel.qhat(torus, k);
        hats[static_cast<std::size_t>(idx)] = hat_values(m, phat);
    }
    std::vector<abg_triple> out(static_cast<std::size_t>(n));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::int64_t xi = 0; xi < n; ++xi) {
        const site x = torus.site_of(xi);
        abg_triple t{};
        for (std::int64_t idx = 0; idx < n; ++idx) {
            const site k = torus.site_of(idx);
            double dot = 0.0;
            for (int j = 0; j < torus.d; ++j) {
                dot += static_cast<double>(k[static_cast<std::size_t>(j)]) *
                       static_cast<double>(x[static_cast<std::size_t>(j)]);
            }
            const double c = std::cos(two_pi * dot / static_cast<double>(torus.L));
            const abg_hat& h = hats[static_cast<std::size_t>(idx)];
            t.alpha += c * h.alpha;
            t.beta += c * h.beta;
            t.gamma += c * h.gamma;
        }
        t.alpha *= inv_n;
        t.beta *= inv_n;
        t.gamma *= inv_n;
        out[static_cast<std::size_t>(xi)] = t;
    }
    return out;
}

abg_triple abg_green(const site& x, double mu, double nu, const green_query& geometry) {
    require_mu(mu);
    require_nu(nu);
    const double a = (1.0 - mu) * nu;
    const double b = (1.0 - mu) * (1.0 - nu);
    const double z1 = a / (1.0 - b);
    const double z2 = -a / (1.0 + b);
    const double z3 = (1.0 - mu) * a / (1.0 - (1.0 - mu) * b);

    bool at_origin = true;
    for (int j = 0; j < geometry.d; ++j) {
        std::int64_t c = x[static_cast<std::size_t>(j)];
        if (geometry.L != infinite_lattice) c = ((c % geometry.L) + geometry.L) % geometry.L;
        if (c != 0) at_origin = false;
    }
    const double d0 = at_origin ? 1.0 : 0.0;

    const double g1 = green(geometry, x, z1);
    const double g2 = green(geometry, x, z2);
    const double g3 = green(geometry, x, z3);
    const double dg1 = green_derivative(geometry, x, z1);
    const double dg2 = green_derivative(geometry, x, z2);

    abg_triple out{};
    out.alpha = g1 / (2.0 * (1.0 - b)) + g2 / (2.0 * (1.0 + b)) - d0;
    out.beta = (1.0 - mu) / (2.0 * mu) * g1 / (1.0 - b) -
               (1.0 - mu) / (2.0 * (2.0 - mu)) * g2 / (1.0 + b) -
               g3 / ((1.0 - (1.0 - mu) * (1.0 - mu)) * (1.0 - (1.0 - mu) * b)) + d0;
    out.gamma = b * g1 / (4.0 * (1.0 - b) * (1.0 - b)) +
                a * dg1 / (4.0 * (1.0 - b) * (1.0 - b) * (1.0 - b)) -
                b * g2 / (4.0 * (1.0 + b) * (1.0 + b)) -
                a * dg2 / (4.0 * (1.0 + b) * (1.0 + b) * (1.0 + b));
    return out;
}

double lag_kernel(const site& x, double mu, double nu, const green_query& geometry) {
    require_mu(mu);
    require_nu(nu);
    const double a = (1.0 - mu) * nu;
    const double b = (1.0 - mu) * (1.0 - nu);
    const double z3 = (1.0 - mu) * a / (1.0 - (1.0 - mu) * b);
    bool at_origin = true;
    for (int j = 0; j < geometry.d; ++j) {
        std::int64_t c = x[static_cast<std::size_t>(j)];
        if (geometry.L != infinite_lattice) c = ((c % geometry.L) + geometry.L) % geometry.L;
        if (c != 0) at_origin = false;
    }
    const double d0 = at_origin ? 1.0 : 0.0;
    return green(geometry, x, z3) / (1.0 - (1.0 - mu) * b) - d0;
}

double psi4_delta0(double alpha_x, double alpha_0, double N) {
    return alpha_x / (N + alpha_0);
}

vec4 phi_correction(const abg_triple& at_x, const abg_triple& at_0, double N) {
    const double denom = N + at_0.alpha;
    vec4 phi{};
    phi[0] = 0.0;
    phi[1] = at_x.beta / denom;
    phi[2] = at_x.beta / denom;
    phi[3] = 2.0 *
             ((at_x.alpha * at_0.gamma - at_0.alpha * at_x.gamma) - N * at_x.gamma) /
             (denom * denom);
    return phi;
}

vec4 psi_small_delta(const abg_triple& at_x, const abg_triple& at_0, double N, double delta) {
    const vec4 phi = phi_correction(at_x, at_0, N);
    vec4 out{};
    out[3] = psi4_delta0(at_x.alpha, at_0.alpha, N);
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] += delta * phi[static_cast<std::size_t>(i)];
    return out;
}

namespace {

void require_symmetric_small_delta(const model_params& p) {
    if (p.N != p.M) {
        throw std::invalid_argument("small-delta expansion requires M = N");
    }
    if (!(p.eps == p.delta)) {
        throw std::invalid_argument("small-delta expansion requires eps = delta");
    }
}

} // namespace

vec4 phi_correction(const model_params& p, const site& x, const torus_spec& torus,
                    const migration_kernel& kernel) {
    require_symmetric_small_delta(p);
    const abg_triple at_x = abg_spectral(x, p.mu, p.nu, torus, kernel);
    const abg_triple at_0 = abg_spectral(site{}, p.mu, p.nu, torus, kernel);
    return phi_correction(at_x, at_0, static_cast<double>(p.N));
}

vec4 psi_small_delta(const model_params& p, const site& x, const torus_spec& torus,
                     const migration_kernel& kernel) {
    require_symmetric_small_delta(p);
    const abg_triple at_x = abg_spectral(x, p.mu, p.nu, torus, kernel);
    const abg_triple at_0 = abg_spectral(site{}, p.mu, p.nu, torus, kernel);
    return psi_small_delta(at_x, at_0, static_cast<double>(p.N), p.delta_d());
}

uv_expansion rho_expansion_uv(double rho, double nu) {
    require_nu(nu);
    const double mu = rho * nu;
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument("rho_expansion_uv: rho*nu must lie in (0, 1)");
    }
    const double om = 1.0 - mu;
    uv_expansion out{};
    out.u_exact = om * nu / (1.0 - om * (1.0 - nu));
    out.v_exact = om * om * nu / (1.0 - om * om * (1.0 - nu));
    out.u_cubic = 1.0 - rho + (1.0 - nu) * rho * rho - (1.0 - nu) * (1.0 - nu) * rho * rho * rho;
    out.v_cubic = 1.0 - 2.0 * rho + (4.0 - 3.0 * nu) * rho * rho -
                  4.0 * (1.0 - nu) * (2.0 - nu) * rho * rho * rho;
    return out;
}

} // namespace ibd
