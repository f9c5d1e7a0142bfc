#include "ibd/second_moment.hpp"

#include "ibd/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace ibd {

namespace {

void require_mutation(const model_params& p) {
    if (!(p.mu > 0.0)) {
        throw std::invalid_argument(
            "mu must be positive for the second moment (mu = 0 is singular)");
    }
}

void require_symmetric(const model_params& p) {
    if (!(p.eps == p.delta)) {
        throw std::invalid_argument("slow-seed-bank expansion requires eps = delta");
    }
}

} // namespace

mat4 u_matrix(const model_params& p) {
    p.validate();
    require_mutation(p);
    const double m = p.m();
    const double d = p.delta_d();
    const double e = p.eps_d();
    const double A = 1.0 - m * (1.0 - d - e);
    const double B = 1.0 - m * (1.0 - d - e) * (1.0 - d - e);
    const double u0 = (1.0 - m) * A * B;
    const double s1 = m * (1.0 - d - m * (1.0 - e) * (1.0 - d - e));
    const double s2 = m * (1.0 + m * (1.0 - d - e));
    const double s3 = m * ((1.0 - m) * (1.0 - e) + d * m * (2.0 - d - e));
    const double t1 = (1.0 - m * (1.0 - e) * (1.0 - e)) * A - 2.0 * m * d * e;
    const double t2 = (1.0 - m * (1.0 - d) * (1.0 - e)) * A - m * (d * d + e * e);
    const double t4 = (1.0 - m * (1.0 - d) * (1.0 - d)) * A - 2.0 * m * d * e;

    mat4 u = mat4::zero();
    u(0, 0) = t1;
    u(0, 1) = e * s1;
    u(0, 2) = e * s1;
    u(0, 3) = e * e * s2;
    u(1, 0) = d * s1;
    u(1, 1) = t2;
    u(1, 2) = d * e * s2;
    u(1, 3) = e * s3;
    u(2, 0) = d * s1;
    u(2, 1) = d * e * s2;
    u(2, 2) = t2;
    u(2, 3) = e * s3;
    u(3, 0) = d * d * s2;
    u(3, 1) = d * s3;
    u(3, 2) = d * s3;
    u(3, 3) = t4;
    return u.scaled(1.0 / u0);
}

mat4 u_matrix_inverse_route(const model_params& p) {
    p.validate();
    require_mutation(p);
    const mat4 b0 = build_bhat(p, 1.0, 1.0);
    return inverse(mat4::identity() - b0);
}

mat4 u_matrix_first_order(const model_params& p) {
    p.validate();
    require_mutation(p);
    require_symmetric(p);
    const double m = p.m();
    const double c = 1.0 / (1.0 - m);
    const double swap = p.delta_d();
    static constexpr double stencil[16] = {-2, 1, 1, 0, 1, -2, 0, 1, 1, 0, -2, 1, 0, 1, 1, -2};
    mat4 u = mat4::identity().scaled(c);
    for (int i = 0; i < 16; ++i) u.a[static_cast<std::size_t>(i)] += swap * m * c * c * stencil[i];
    return u;
}

mat4 delta0_matrix(const model_params& p) {
    p.validate();
    const double m = p.m();
    const double d = p.delta_d();
    const double e = p.eps_d();
    mat4 out = mat4::zero();
    out(1, 1) = 1.0 - d;
    out(1, 3) = e;
    out(2, 2) = 1.0 - d;
    out(2, 3) = e;
    out(3, 1) = d;
    out(3, 2) = d;
    out(3, 3) = 2.0 * (1.0 - e);
    return out.scaled(m * (1.0 - e));
}

vec4 gamma0_vector(const model_params& p) {
    p.validate();
    const double e = p.eps_d();
    return vec4{0.0, 0.0, 0.0, p.m() * (1.0 - e) * (1.0 - e)};
}

vec4 zeta_closed_form(const model_params& p, const torus_spec& torus,
                      const migration_kernel& kernel, ibd_method method) {
    require_mutation(p);
    const vec4 same = psi00(p, torus, kernel, method);
    const mat4 u = u_matrix(p);
    const mat4 d0 = delta0_matrix(p);
    const mat4 inner = mat4::identity().scaled(2.0) + d0 * u;
    const vec4 g0 = gamma0_vector(p);
    vec4 z = mat_vec(u * inner, g0);
    const double pref = (1.0 - same[3]) / static_cast<double>(p.N) * p.nu;
    for (double& v : z) v *= pref;
    return z;
}

vec4 zeta_empirical(const model_params& p, const torus_spec& torus,
                    const migration_kernel& kernel, int threads) {
    const ibd_field f = compute_ibd_field(p, torus, kernel, ibd_method::closed_form, threads);
    vec4 acc{};
    const std::int64_t n = torus.n_sites();
    for (std::int64_t idx = 0; idx < n; ++idx) {
        const double w = torus.norm2_centered(torus.site_of(idx));
        const vec4& psi = f.psi[static_cast<std::size_t>(idx)];
        for (int i = 0; i < 4; ++i) acc[static_cast<std::size_t>(i)] += w * psi[static_cast<std::size_t>(i)];
    }
    return acc;
}

vec4 zeta_quadratic_fit(const model_params& p, const torus_spec& torus,
                        const migration_kernel& kernel, int threads) {
    if (torus.L < 5) {
        throw std::invalid_argument("quadratic-frequency fit needs L >= 5 (two distinct small frequencies)");
    }
    const ibd_field f = compute_ibd_field(p, torus, kernel, ibd_method::closed_form, threads);
    site k0{}, k1{}, k2{};
    k1[0] = 1;
    k2[0] = 2;
    const vec4& h0 = f.psi_hat[static_cast<std::size_t>(torus.index_of(k0))];
    const vec4& h1 = f.psi_hat[static_cast<std::size_t>(torus.index_of(k1))];
    const vec4& h2 = f.psi_hat[static_cast<std::size_t>(torus.index_of(k2))];
    const double w1 = 1.0 - kernel.qhat(torus, k1);
    const double w2 = 1.0 - kernel.qhat(torus, k2);
    vec4 out{};
    for (int i = 0; i < 4; ++i) {
        const auto s = static_cast<std::size_t>(i);
        const double f1 = (h0[s] - h1[s]) / w1;
        const double f2 = (h0[s] - h2[s]) / w2;
        out[s] = (4.0 * f1 - f2) / 3.0;
    }
    return out;
}

vec4 zeta_first_order(const model_params& p, const torus_spec& torus,
                      const migration_kernel& kernel) {
    require_mutation(p);
    require_symmetric(p);
    const double m = p.m();
    const double c = 1.0 / (1.0 - m);
    const double swap = p.delta_d();
    const abg_triple at0 = abg_spectral(site{}, p.mu, p.nu, torus, kernel);
    const double cn = 1.0 / (static_cast<double>(p.N) + at0.alpha);
    const double pref = cn * p.nu * (1.0 + 2.0 * swap * at0.gamma * cn) * m * c * c;
    vec4 out{};
    out[1] = pref * swap * 3.0 * m * c;
    out[2] = out[1];
    out[3] = pref * (2.0 - 4.0 * swap * (2.0 * c - 1.0));
    return out;
}

second_moment_report second_moment(const model_params& p, const torus_spec& torus,
                                   const migration_kernel& kernel, int threads) {
    second_moment_report rep{};
    rep.zeta_closed = zeta_closed_form(p, torus, kernel);
    rep.zeta_empirical = zeta_empirical(p, torus, kernel, threads);
    rep.zeta_fit = zeta_quadratic_fit(p, torus, kernel, threads);
    rep.rel_diff = std::abs(rep.zeta_empirical[3] - rep.zeta_closed[3]) /
                   std::abs(rep.zeta_closed[3]);
    rep.rel_diff_fit = std::abs(rep.zeta_fit[3] - rep.zeta_closed[3]) /
                       std::abs(rep.zeta_closed[3]);
    rep.expected_tau = rep.zeta_closed[3] / (2.0 * p.nu);
    rep.tail_mass = std::pow(1.0 - p.mu, 2.0 * static_cast<double>(torus.L));
    rep.L = torus.L;
    rep.tail_ok = rep.tail_mass < 1e-12;
    return rep;
}

double expected_coalescence_time(const model_params& p, const torus_spec& torus,
                                 const migration_kernel& kernel) {
    const vec4 z = zeta_closed_form(p, torus, kernel);
    return z[3] / (2.0 * p.nu);
}

} // namespace ibd
