#include "ibd/spectral.hpp"

#include "ibd/parallel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "r_polynomials.inc"

namespace ibd {

mat4 build_c_matrix(const model_params& p) {
    const double m = p.m();
    const double d = p.delta_d();
    const double e = p.eps_d();
    mat4 c;
    // rows/cols ordered: both dormant, (dormant,active), (active,dormant), both active
    c(0, 0) = (1 - d) * (1 - d);
    c(0, 1) = (1 - d) * e;
    c(0, 2) = (1 - d) * e;
    c(0, 3) = e * e;
    c(1, 0) = d * (1 - d);
    c(1, 2) = d * e;
    c(2, 0) = d * (1 - d);
    c(2, 1) = d * e;
    c(3, 0) = d * d;
    return c.scaled(m);
}

mat4 build_bhat(const model_params& p, double P, double Q) {
    const double m = p.m();
    const double d = p.delta_d();
    const double e = p.eps_d();
    mat4 b = build_c_matrix(p);
    const double w = m * (1 - e);
    b(1, 1) += w * (1 - d) * Q;
    b(1, 3) += w * e * Q;
    b(2, 2) += w * (1 - d) * P;
    b(2, 3) += w * e * P;
    b(3, 1) += w * d * Q;
    b(3, 2) += w * d * P;
    b(3, 3) += w * (1 - e) * P * Q;
    return b;
}

vec4 svec_closed_form(const model_params& p, double P, double Q) {
    const double m = p.m();
    const double d = p.delta_d();
    const double e = p.eps_d();
    const double K = m * (1 - e) * (1 - e) / static_cast<double>(p.N);
    const double det = rpoly::r_det(m, d, e, P, Q);
    const double f = K * P * Q / det;
    return vec4{f * rpoly::r_adj14(m, d, e, P, Q), f * rpoly::r_adj24(m, d, e, P, Q),
                f * rpoly::r_adj34(m, d, e, P, Q), f * rpoly::r_adj44(m, d, e, P, Q)};
}

vec4 svec_matrix_inverse(const model_params& p, double P, double Q) {
    const double e = p.eps_d();
    const double K = p.m() * (1 - e) * (1 - e) / static_cast<double>(p.N);
    const mat4 a = mat4::identity() - build_bhat(p, P, Q);
    const vec4 rhs{0.0, 0.0, 0.0, K * P * Q};
    return solve(a, rhs);
}

namespace {

void require_mutation(const model_params& p) {
    if (!(p.mu > 0.0))
        throw std::invalid_argument("mu must be positive for the IBD field (mu = 0 is singular)");
}

// s(theta) for every frequency on the grid, in flat lexicographic order
std::vector<vec4> svec_grid(const model_params& p, const torus_spec& torus,
                            const migration_kernel& kernel, ibd_method method, int threads) {
    const std::int64_t n = torus.n_sites();
    std::vector<vec4> s(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const site k = torus.site_of(i);
            const double P = kernel.phat(torus, k);
            s[static_cast<std::size_t>(i)] = (method == ibd_method::matrix_inverse)
                                                 ? svec_matrix_inverse(p, P, P)
                                                 : svec_closed_form(p, P, P);
        }
    });
    return s;
}

vec4 mean_svec(const std::vector<vec4>& s) {
    vec4 acc{};
    for (const vec4& v : s)
        for (int c = 0; c < 4; ++c) acc[static_cast<std::size_t>(c)] += v[static_cast<std::size_t>(c)];
    const double inv_n = 1.0 / static_cast<double>(s.size());
    for (int c = 0; c < 4; ++c) acc[static_cast<std::size_t>(c)] *= inv_n;
    return acc;
}

// direct inverse DFT: psi(x) = (1/n) sum_k psi_hat(k) exp(-2 pi i k.x / L)
void inverse_dft_direct(const torus_spec& torus, const std::vector<vec4>& hat,
                        std::vector<vec4>& out, double& max_imag, int threads) {
    const std::int64_t n = torus.n_sites();
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> imag_max(static_cast<std::size_t>(n), 0.0);
    parallel_for(n, threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t xi = b; xi < e; ++xi) {
            const site x = torus.site_of(xi);
            std::complex<double> acc[4] = {};
            for (std::int64_t ki = 0; ki < n; ++ki) {
                const site k = torus.site_of(ki);
                double phase = 0.0;
                for (int i = 0; i < torus.d; ++i)
                    phase += static_cast<double>(k[i]) * static_cast<double>(x[i]);
                const std::complex<double> w =
                    std::exp(std::complex<double>(0.0, -two_pi * phase / static_cast<double>(torus.L)));
                for (int c = 0; c < 4; ++c)
                    acc[c] += hat[static_cast<std::size_t>(ki)][static_cast<std::size_t>(c)] * w;
            }
            double im = 0.0;
            for (int c = 0; c < 4; ++c) {
                out[static_cast<std::size_t>(xi)][static_cast<std::size_t>(c)] =
                    acc[c].real() / static_cast<double>(n);
                im = std::max(im, std::abs(acc[c].imag()) / static_cast<double>(n));
            }
            imag_max[static_cast<std::size_t>(xi)] = im;
        }
    });
    for (double v : imag_max) max_imag = std::max(max_imag, v);
}

// separable inverse DFT: one axis at a time, O(d * n * L) instead of O(n^2)
void inverse_dft_separable(const torus_spec& torus, const std::vector<vec4>& hat,
                           std::vector<vec4>& out, double& max_imag, int threads) {
    const std::int64_t n = torus.n_sites();
    const std::int64_t L = torus.L;
    const double two_pi = 2.0 * std::numbers::pi;
    // twiddle table exp(-2 pi i j / L), j = 0..L-1
    std::vector<std::complex<double>> tw(static_cast<std::size_t>(L));
    for (std::int64_t j = 0; j < L; ++j)
        tw[static_cast<std::size_t>(j)] =
            std::exp(std::complex<double>(0.0, -two_pi * static_cast<double>(j) / static_cast<double>(L)));

    using cvec4 = std::array<std::complex<double>, 4>;
    std::vector<cvec4> buf(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        for (int c = 0; c < 4; ++c)
            buf[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                hat[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];

    // stride of axis a in the row-major flat index
    for (int axis = torus.d - 1; axis >= 0; --axis) {
        std::int64_t stride = 1;
        for (int a = torus.d - 1; a > axis; --a) stride *= L;
        const std::int64_t n_lines = n / L;
        std::vector<cvec4> next(static_cast<std::size_t>(n));
        parallel_for(n_lines, threads, [&](std::int64_t b, std::int64_t e) {
            std::vector<cvec4> line(static_cast<std::size_t>(L));
            for (std::int64_t li = b; li < e; ++li) {
                // decompose line index into (outer, inner) around the axis
                const std::int64_t outer = li / stride;
                const std::int64_t inner = li % stride;
                const std::int64_t base = outer * stride * L + inner;
                for (std::int64_t j = 0; j < L; ++j)
                    line[static_cast<std::size_t>(j)] = buf[static_cast<std::size_t>(base + j * stride)];
                for (std::int64_t x = 0; x < L; ++x) {
                    cvec4 acc{};
                    for (std::int64_t j = 0; j < L; ++j) {
                        const std::complex<double> w = tw[static_cast<std::size_t>((j * x) % L)];
                        for (int c = 0; c < 4; ++c)
                            acc[static_cast<std::size_t>(c)] += line[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] * w;
                    }
                    next[static_cast<std::size_t>(base + x * stride)] = acc;
                }
            }
        });
        buf.swap(next);
    }
    std::vector<double> imag_by_site(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double im = 0.0;
        for (int c = 0; c < 4; ++c) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                buf[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].real() / static_cast<double>(n);
            im = std::max(im, std::abs(buf[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].imag()) /
                                  static_cast<double>(n));
        }
        imag_by_site[static_cast<std::size_t>(i)] = im;
    }
    for (double v : imag_by_site) max_imag = std::max(max_imag, v);
}

} // namespace

vec4 psi00(const model_params& p, const torus_spec& torus, const migration_kernel& kernel,
           ibd_method method) {
    require_mutation(p);
    p.validate();
    torus.validate();
    const std::vector<vec4> s = svec_grid(p, torus, kernel, method, 1);
    const vec4 sbar = mean_svec(s);
    const double denom = 1.0 + sbar[3];
    return vec4{sbar[0] / denom, sbar[1] / denom, sbar[2] / denom, sbar[3] / denom};
}

ibd_field compute_ibd_field(const model_params& p, const torus_spec& torus,
                            const migration_kernel& kernel, ibd_method method, int threads) {
    p.validate();
    torus.validate();
    require_mutation(p);
    if (method == ibd_method::fixed_point) {
        const pair_field pf = ibd_fixed_point(p, torus, kernel);
        const reduced_field rf = reduce_pair_field(pf);
        ibd_field f;
        f.torus = torus;
        f.psi = rf.psi;
        f.psi_same_colony = rf.psi[0];
        // Fourier transform of the reduced field, for parity with the
        // spectral routes (forward DFT of a real even field)
        const std::int64_t n = torus.n_sites();
        f.psi_hat.assign(static_cast<std::size_t>(n), vec4{});
        const double two_pi = 2.0 * std::numbers::pi;
        for (std::int64_t ki = 0; ki < n; ++ki) {
            const site k = torus.site_of(ki);
            vec4 acc{};
            for (std::int64_t xi = 0; xi < n; ++xi) {
                const site x = torus.site_of(xi);
                double phase = 0.0;
                for (int i = 0; i < torus.d; ++i)
                    phase += static_cast<double>(k[i]) * static_cast<double>(x[i]);
                const double c = std::cos(two_pi * phase / static_cast<double>(torus.L));
                for (int cc = 0; cc < 4; ++cc)
                    acc[static_cast<std::size_t>(cc)] +=
                        f.psi[static_cast<std::size_t>(xi)][static_cast<std::size_t>(cc)] * c;
            }
            f.psi_hat[static_cast<std::size_t>(ki)] = acc;
        }
        return f;
    }

    const std::int64_t n = torus.n_sites();
    ibd_field f;
    f.torus = torus;
    f.psi.assign(static_cast<std::size_t>(n), vec4{});
    f.psi_hat.assign(static_cast<std::size_t>(n), vec4{});

    const std::vector<vec4> s = svec_grid(p, torus, kernel, method, threads);
    const vec4 sbar = mean_svec(s);
    const double psi00_aa = sbar[3] / (1.0 + sbar[3]);
    const double pref = 1.0 - psi00_aa;
    for (std::int64_t i = 0; i < n; ++i)
        for (int c = 0; c < 4; ++c)
            f.psi_hat[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                pref * s[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];

    if (n <= 4096)
        inverse_dft_direct(torus, f.psi_hat, f.psi, f.max_imag, threads);
    else
        inverse_dft_separable(torus, f.psi_hat, f.psi, f.max_imag, threads);

    f.psi_same_colony = f.psi[0];
    return f;
}

} // namespace ibd
