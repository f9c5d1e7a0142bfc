#include "ibd/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace ibd {

namespace {

// dense n x n helpers on flat row-major storage
std::vector<double> mat_mul(const std::vector<double>& a, const std::vector<double>& b,
                            std::int64_t n) {
    std::vector<double> r(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t k = 0; k < n; ++k) {
            const double v = a[static_cast<std::size_t>(i * n + k)];
            if (v == 0.0) continue;
            const double* brow = &b[static_cast<std::size_t>(k * n)];
            double* rrow = &r[static_cast<std::size_t>(i * n)];
            for (std::int64_t j = 0; j < n; ++j) rrow[j] += v * brow[j];
        }
    return r;
}

// r = a * b^T (b symmetric in our use, but keep the transpose explicit)
std::vector<double> mat_mul_bt(const std::vector<double>& a, const std::vector<double>& b,
                               std::int64_t n) {
    std::vector<double> r(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            const double* arow = &a[static_cast<std::size_t>(i * n)];
            const double* brow = &b[static_cast<std::size_t>(j * n)];
            for (std::int64_t k = 0; k < n; ++k) acc += arow[k] * brow[k];
            r[static_cast<std::size_t>(i * n + j)] = acc;
        }
    return r;
}

} // namespace

pair_field ibd_fixed_point(const model_params& p, const torus_spec& torus,
                           const migration_kernel& kernel, double tol, std::int64_t max_iter) {
    p.validate();
    torus.validate();
    if (!(p.mu > 0.0))
        throw std::invalid_argument("mu must be positive for the IBD fixed point");
    const std::int64_t n = torus.n_sites();
    if (n * n > 1000000)
        throw std::invalid_argument("fixed-point oracle limited to (L^d)^2 <= 1e6 pair states");

    const double m = p.m();
    const double d = p.delta_d();
    const double e = p.eps_d();
    const double invN = 1.0 / static_cast<double>(p.N);

    // one-step colony transition matrix of a single active lineage
    std::vector<double> P(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        const site x = torus.site_of(i);
        for (std::int64_t j = 0; j < n; ++j)
            P[static_cast<std::size_t>(i * n + j)] = kernel.p_step(torus, x, torus.site_of(j));
    }

    pair_field f;
    f.torus = torus;
    for (int c = 0; c < 4; ++c) f.c[c].assign(static_cast<std::size_t>(n * n), 0.0);

    if (max_iter <= 0) {
        // geometric contraction at rate m: cap at a safe multiple
        max_iter = static_cast<std::int64_t>(std::ceil(10.0 * std::log(tol) / std::log(m)));
        max_iter = std::max<std::int64_t>(max_iter, 64);
    }

    std::vector<double> n1(static_cast<std::size_t>(n * n)), n2(n1), n3(n1), n4(n1);
    double delta_sup = 0.0;
    std::int64_t it = 0;
    for (; it < max_iter; ++it) {
        const std::vector<double>& c1 = f.c[0];
        const std::vector<double>& c2 = f.c[1];
        const std::vector<double>& c3 = f.c[2];
        const std::vector<double>& c4 = f.c[3];

        // lineage moves: component 2 moves the second lineage (columns),
        // component 3 the first (rows); component 4 moves both
        const std::vector<double> c2P = mat_mul_bt(c2, P, n);
        const std::vector<double> c4P = mat_mul_bt(c4, P, n);
        const std::vector<double> Pc3 = mat_mul(P, c3, n);
        const std::vector<double> Pc4 = mat_mul(P, c4, n);
        const std::vector<double> Pc4P = mat_mul_bt(Pc4, P, n);

        // both-moved coalescence/miss split: the only 1/N factor in the
        // recursion lives here (both lineages active, both land on z)
        std::vector<double> wz(static_cast<std::size_t>(n));
        for (std::int64_t z = 0; z < n; ++z)
            wz[static_cast<std::size_t>(z)] =
                invN * (1.0 - c4[static_cast<std::size_t>(z * n + z)]);
        // S[x][y] = sum_z P[x][z] wz[z] P[y][z]
        std::vector<double> Pw(static_cast<std::size_t>(n * n));
        for (std::int64_t x = 0; x < n; ++x)
            for (std::int64_t z = 0; z < n; ++z)
                Pw[static_cast<std::size_t>(x * n + z)] =
                    P[static_cast<std::size_t>(x * n + z)] * wz[static_cast<std::size_t>(z)];
        const std::vector<double> S = mat_mul_bt(Pw, P, n);

        delta_sup = 0.0;
        for (std::int64_t i = 0; i < n * n; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            const double v1 = m * ((1 - d) * (1 - d) * c1[ii] + e * (1 - d) * (c3[ii] + c2[ii]) +
                                   e * e * c4[ii]);
            const double v2 = m * (d * (1 - d) * c1[ii] + d * e * c3[ii] +
                                   (1 - e) * (1 - d) * c2P[ii] + e * (1 - e) * c4P[ii]);
            const double v3 = m * (d * (1 - d) * c1[ii] + d * e * c2[ii] +
                                   (1 - e) * (1 - d) * Pc3[ii] + e * (1 - e) * Pc4[ii]);
            const double v4 = m * (d * d * c1[ii] + d * (1 - e) * c2P[ii] + d * (1 - e) * Pc3[ii] +
                                   (1 - e) * (1 - e) * (Pc4P[ii] + S[ii]));
            delta_sup = std::max(delta_sup, std::abs(v1 - c1[ii]));
            delta_sup = std::max(delta_sup, std::abs(v2 - c2[ii]));
            delta_sup = std::max(delta_sup, std::abs(v3 - c3[ii]));
            delta_sup = std::max(delta_sup, std::abs(v4 - c4[ii]));
            n1[ii] = v1;
            n2[ii] = v2;
            n3[ii] = v3;
            n4[ii] = v4;
        }
        f.c[0].swap(n1);
        f.c[1].swap(n2);
        f.c[2].swap(n3);
        f.c[3].swap(n4);
        if (delta_sup < tol) {
            ++it;
            break;
        }
    }
    f.iterations = it;
    f.final_delta = delta_sup;
    return f;
}

reduced_field reduce_pair_field(const pair_field& f) {
    const std::int64_t n = f.torus.n_sites();
    reduced_field r;
    r.psi.assign(static_cast<std::size_t>(n), vec4{});
    for (std::int64_t y = 0; y < n; ++y)
        for (int c = 0; c < 4; ++c)
            r.psi[static_cast<std::size_t>(y)][static_cast<std::size_t>(c)] =
                f.c[c][static_cast<std::size_t>(y)]; // row x = 0
    // translation invariance: pair(x, y) should equal pair(0, y - x)
    for (std::int64_t x = 0; x < n; ++x) {
        const site sx = f.torus.site_of(x);
        for (std::int64_t y = 0; y < n; ++y) {
            const site sy = f.torus.site_of(y);
            const std::int64_t rel = f.torus.index_of(f.torus.diff(sy, sx));
            for (int c = 0; c < 4; ++c) {
                const double dev =
                    std::abs(f.c[c][static_cast<std::size_t>(x * n + y)] -
                             r.psi[static_cast<std::size_t>(rel)][static_cast<std::size_t>(c)]);
                r.max_translation_dev = std::max(r.max_translation_dev, dev);
            }
        }
    }
    return r;
}

} // namespace ibd
