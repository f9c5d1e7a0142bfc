#include "doctest.h"

#include "ibd/asymptotics.hpp"
#include "ibd/kernel.hpp"
#include "ibd/linalg4.hpp"
#include "ibd/params.hpp"
#include "ibd/rng.hpp"
#include "ibd/spectral.hpp"
#include "ibd/torus.hpp"

// the generated determinant/adjugate polynomials, pulled in directly so a
// deliberately corrupted copy can be evaluated next to the shipped one
#include "../src/r_polynomials.inc"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

using namespace ibd;

namespace {

model_params make_params(std::int64_t N, std::int64_t M, const std::string& eps,
                         const std::string& delta, double mu, double nu) {
    model_params p;
    p.N = N;
    p.M = M;
    p.eps = parse_rational(eps);
    p.delta = parse_rational(delta);
    p.mu = mu;
    p.nu = nu;
    return p;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

} // namespace

// ----------------------------------------------------- per-frequency routes

TEST_CASE("closed-form and LU s-vectors agree across random parameters") {
    // the per-frequency solvers take the migration symbols directly and do
    // not touch the balance condition, so eps and delta roam independently
    rng_stream rng(314159, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::int64_t k_eps = static_cast<std::int64_t>(rng.below(401));
        const std::int64_t k_del = static_cast<std::int64_t>(rng.below(401));
        auto p = make_params(2 + static_cast<std::int64_t>(rng.below(49)), 10,
                             std::to_string(k_eps) + "/1000",
                             std::to_string(k_del) + "/1000", 0.0, 0.5);
        p.mu = std::exp(std::log(1e-3) + (std::log(0.3) - std::log(1e-3)) * rng.next_double());
        const double P = -0.95 + 1.9 * rng.next_double();
        const double Q = -0.95 + 1.9 * rng.next_double();
        const vec4 a = svec_closed_form(p, P, Q);
        const vec4 b = svec_matrix_inverse(p, P, Q);
        for (int c = 0; c < 4; ++c) {
            INFO("rep ", rep, " component ", c, " P ", P, " Q ", Q);
            CHECK(rel_gap(a[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(c)]) < 1e-10);
        }
    }
}

TEST_CASE("a single-coefficient transcription typo is caught by the LU route") {
    // corrupted copy of the closed form: one integer coefficient of the P*Q
    // monomial group of the fourth adjugate polynomial is off by one unit
    auto svec4_with_typo = [](const model_params& p, double P, double Q) {
        const double m = p.m();
        const double d = p.delta_d();
        const double e = p.eps_d();
        const double K = m * (1 - e) * (1 - e) / static_cast<double>(p.N);
        const double det = rpoly::r_det(m, d, e, P, Q);
        const double adj44 = rpoly::r_adj44(m, d, e, P, Q) + m * m * d * e * P * Q;
        return K * P * Q * adj44 / det;
    };

    auto p = make_params(10, 10, "0.1", "0.1", 0.05, 0.3);
    torus_spec t{1, 8};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);

    double max_gap_shipped = 0.0;
    double max_gap_typo = 0.0;
    for (std::int64_t k = 0; k < t.L; ++k) {
        const double P = kernel.phat(t, site{k, 0, 0});
        const double lu = svec_matrix_inverse(p, P, P)[3];
        max_gap_shipped = std::max(max_gap_shipped, rel_gap(svec_closed_form(p, P, P)[3], lu));
        max_gap_typo = std::max(max_gap_typo, rel_gap(svec4_with_typo(p, P, P), lu));
    }
    // shipped polynomials pass the dual-route comparison ...
    CHECK(max_gap_shipped < 1e-10);
    // ... and the corrupted copy fails it by a wide margin, so the
    // comparison genuinely guards the transcription
    CHECK(max_gap_typo > 1e-6);
}

// ------------------------------------------------------------- B-hat shape

TEST_CASE("B-hat at theta = 0 is substochastic with spectral radius below 1") {
    auto p = make_params(10, 20, "0.2", "0.1", 0.05, 0.5);
    const mat4 b = build_bhat(p, 1.0, 1.0);
    // the recursion acts on the distribution side: each COLUMN of B-hat(0)
    // sums to m = (1-mu)^2 exactly, survival being the only mass loss
    for (int j = 0; j < 4; ++j) {
        double col = 0.0;
        for (int i = 0; i < 4; ++i) {
            col += b(i, j);
            CHECK(b(i, j) >= 0.0);
        }
        CHECK(col == doctest::Approx(p.m()).epsilon(1e-13));
    }
    CHECK(spectral_radius(b) < 1.0);
}

TEST_CASE("C-matrix columns carry the no-migration transitions") {
    auto p = make_params(10, 20, "0.2", "0.1", 0.05, 0.5);
    const mat4 c = build_c_matrix(p);
    const double m = p.m(), d = p.delta_d(), e = p.eps_d();
    CHECK(c(0, 0) == doctest::Approx(m * (1 - d) * (1 - d)).epsilon(1e-14));
    CHECK(c(0, 3) == doctest::Approx(m * e * e).epsilon(1e-14));
    CHECK(c(3, 0) == doctest::Approx(m * d * d).epsilon(1e-14));
    CHECK(c(1, 2) == doctest::Approx(m * d * e).epsilon(1e-14));
    CHECK(c(3, 3) == doctest::Approx(0.0));
    // D-hat = B-hat - C vanishes entirely when both migration symbols vanish
    const mat4 b0 = build_bhat(p, 0.0, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(b0(i, j) == doctest::Approx(c(i, j)).epsilon(1e-14));
}

// -------------------------------------------------------------- full field

TEST_CASE("three computation methods agree on the full field") {
    struct grid_case {
        int d;
        std::int64_t L;
    };
    const grid_case grids[] = {{1, 4}, {1, 8}, {2, 4}};
    rng_stream rng(777, 0);
    for (const auto& g : grids) {
        torus_spec t{g.d, g.L};
        for (int rep = 0; rep < 3; ++rep) {
            const std::int64_t k = static_cast<std::int64_t>(rng.below(401));
            auto p = make_params(2 + static_cast<std::int64_t>(rng.below(49)), 0,
                                 std::to_string(k) + "/1000", std::to_string(k) + "/1000",
                                 std::exp(std::log(0.01) +
                                          (std::log(0.3) - std::log(0.01)) * rng.next_double()),
                                 0.05 + 0.9 * rng.next_double());
            p.M = p.N;
            auto kernel = migration_kernel::nearest_neighbour(p.nu);
            const auto fa = compute_ibd_field(p, t, kernel, ibd_method::closed_form);
            const auto fb = compute_ibd_field(p, t, kernel, ibd_method::matrix_inverse);
            const auto fc = compute_ibd_field(p, t, kernel, ibd_method::fixed_point);
            double worst = 0.0;
            for (std::size_t i = 0; i < fa.psi.size(); ++i)
                for (std::size_t c = 0; c < 4; ++c) {
                    worst = std::max(worst, rel_gap(fa.psi[i][c], fb.psi[i][c]));
                    worst = std::max(worst, rel_gap(fa.psi[i][c], fc.psi[i][c]));
                }
            INFO("d ", g.d, " L ", g.L, " rep ", rep, " mu ", p.mu, " nu ", p.nu);
            CHECK(worst < 1e-10);
            CHECK(fa.max_imag < 1e-12);
        }
    }
}

TEST_CASE("frozen field values at a reference parameter point") {
    // d=1 L=4, N=M=10, eps=delta=0.1, mu=0.05, nu=0.3; values pinned after
    // cross-validation against the LU route, the real-space fixed point and
    // a 10^6-replica Monte Carlo run
    auto p = make_params(10, 10, "0.1", "0.1", 0.05, 0.3);
    torus_spec t{1, 4};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    const vec4 expect0{2.528792415543e-02, 3.580603249606e-02, 3.580603249606e-02,
                       1.091556144845e-01};
    for (std::size_t c = 0; c < 4; ++c)
        CHECK(f.psi_same_colony[c] == doctest::Approx(expect0[c]).epsilon(1e-11));
}

TEST_CASE("field symmetries: reflection, lineage exchange, bounds") {
    auto p = make_params(7, 14, "0.2", "0.1", 0.07, 0.6);
    torus_spec t{2, 5};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    for (std::int64_t i = 0; i < t.n_sites(); ++i) {
        const site x = t.site_of(i);
        const site neg = t.wrap(site{-x[0], -x[1], -x[2]});
        const auto& v = f.psi[static_cast<std::size_t>(i)];
        const auto& w = f.psi[static_cast<std::size_t>(t.index_of(neg))];
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(v[c] >= 0.0);
            CHECK(v[c] <= 1.0);
            // psi(x) = psi(-x) for the symmetric kernel
            CHECK(v[c] == doctest::Approx(w[c]).epsilon(1e-12));
        }
        // exchanging the two lineages swaps components 1 and 2 and flips x
        CHECK(v[1] == doctest::Approx(w[2]).epsilon(1e-12));
    }
}

TEST_CASE("DC frequency equals the field sum and psi00 matches the field") {
    auto p = make_params(10, 10, "0.1", "0.1", 0.05, 0.3);
    torus_spec t{1, 8};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    for (std::size_t c = 0; c < 4; ++c) {
        double total = 0.0;
        for (const auto& v : f.psi) total += v[c];
        CHECK(f.psi_hat[0][c] == doctest::Approx(total).epsilon(1e-12));
    }
    const vec4 p00 = psi00(p, t, kernel);
    for (std::size_t c = 0; c < 4; ++c)
        CHECK(p00[c] == doctest::Approx(f.psi_same_colony[c]).epsilon(1e-12));
}

TEST_CASE("separable inverse transform matches a direct per-site sum") {
    // n = 70^2 = 4900 > 4096 forces the separable path; re-derive a few
    // sites from the returned Fourier coefficients by the direct formula
    auto p = make_params(10, 10, "0.1", "0.1", 0.1, 0.5);
    torus_spec t{2, 70};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    CHECK(f.max_imag < 1e-12);
    const site probes[] = {{0, 0, 0}, {1, 0, 0}, {3, 5, 0}, {35, 35, 0}, {69, 1, 0}};
    for (const site& x : probes) {
        for (std::size_t c = 0; c < 4; ++c) {
            double acc = 0.0;
            for (std::int64_t ki = 0; ki < t.n_sites(); ++ki) {
                const site k = t.site_of(ki);
                const double phase = 2.0 * M_PI *
                                     (static_cast<double>(k[0] * x[0] + k[1] * x[1])) /
                                     static_cast<double>(t.L);
                acc += f.psi_hat[static_cast<std::size_t>(ki)][c] * std::cos(phase);
            }
            acc /= static_cast<double>(t.n_sites());
            CHECK(f.psi[static_cast<std::size_t>(t.index_of(x))][c] ==
                  doctest::Approx(acc).epsilon(1e-10));
        }
    }
}

TEST_CASE("fixed point reports tight convergence and translation invariance") {
    auto p = make_params(5, 5, "0.2", "0.2", 0.1, 0.4);
    torus_spec t{1, 6};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto pf = ibd_fixed_point(p, t, kernel);
    CHECK(pf.final_delta < 1e-13);
    const auto rf = reduce_pair_field(pf);
    CHECK(rf.max_translation_dev < 1e-12);
}

// -------------------------------------------------- structural limit cases

TEST_CASE("no seed-bank exchange reproduces the dormant-free closed form") {
    // at delta = eps = 0 the three configurations with a dormant member are
    // exactly zero and psi4 = alpha(x)/(N + alpha(0)) with alpha the weighted
    // return sum of the migration walk
    auto p = make_params(10, 10, "0", "0", 0.08, 0.45);
    torus_spec t{1, 10};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    const auto abg = abg_spectral_field(p.mu, p.nu, t, kernel);
    const double alpha0 = abg[0].alpha;
    for (std::int64_t i = 0; i < t.n_sites(); ++i) {
        const auto& v = f.psi[static_cast<std::size_t>(i)];
        CHECK(std::abs(v[0]) < 1e-15);
        CHECK(std::abs(v[1]) < 1e-15);
        CHECK(std::abs(v[2]) < 1e-15);
        const double expect =
            psi4_delta0(abg[static_cast<std::size_t>(i)].alpha, alpha0,
                        static_cast<double>(p.N));
        CHECK(v[3] == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("full exchange annihilates coalescence") {
    // eps = delta = 1 with N = M: the pair alternates layers in lockstep and
    // the both-active survival factor (1-eps)^2 vanishes, so psi = 0
    auto p = make_params(10, 10, "1", "1", 0.05, 0.3);
    torus_spec t{1, 6};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    for (const auto& v : f.psi)
        for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(v[c]) < 1e-15);
}

TEST_CASE("single-generation sandwich bound on psi4") {
    // the both-active field dominates its one-generation term
    //   g1(x) = m (1-eps)^2 p2(x) / N,   p2 = two-step displacement law,
    // and the remainder is at most sum_{t >= 2} m^t / N
    auto p = make_params(8, 8, "0.125", "0.125", 0.4, 0.6);
    torus_spec t{1, 8};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const auto f = compute_ibd_field(p, t, kernel);
    const double m = p.m();
    const double tail = m * m / ((1.0 - m) * static_cast<double>(p.N));
    for (std::int64_t i = 0; i < t.n_sites(); ++i) {
        const site x = t.site_of(i);
        double p2 = 0.0;
        for (const auto& y : t.all_sites())
            p2 += kernel.p_step(t, site{0, 0, 0}, y) * kernel.p_step(t, x, y);
        const double e = p.eps_d();
        const double g1 = m * (1 - e) * (1 - e) * p2 / static_cast<double>(p.N);
        const double psi4 = f.psi[static_cast<std::size_t>(i)][3];
        CHECK(psi4 >= g1 - 1e-14);
        CHECK(psi4 <= g1 + tail + 1e-14);
    }
}

TEST_CASE("tiny mutation: extended-precision evaluation stays on the manifold") {
    // at eps = delta = 0 the determinant collapses to (1-m)(1-mQ)(1-mP)(1-mPQ)
    // ~ 1e-23 at mu = 1e-6 while individual monomials are O(1); the shipped
    // polynomials evaluate in extended precision, so psi00_4 must sit within
    // 1e-3 of 1 and the deficit within 5% of 2 N L mu
    auto p = make_params(10, 10, "0", "0", 1e-6, 0.4);
    torus_spec t{1, 4};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    const vec4 p00 = psi00(p, t, kernel);
    CHECK(p00[3] == doctest::Approx(9.999200064666e-01).epsilon(1e-9));
    CHECK(std::abs(1.0 - p00[3]) < 1e-3);
    const double mass = 2.0 * static_cast<double>(p.N) * static_cast<double>(t.L) * p.mu;
    CHECK(std::abs((1.0 - p00[3]) - mass) / mass < 0.05);
}

// ----------------------------------------------------------------- guards

TEST_CASE("mu = 0 is rejected") {
    auto p = make_params(10, 10, "0.1", "0.1", 0.0, 0.3);
    torus_spec t{1, 4};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    CHECK_THROWS_WITH_AS(compute_ibd_field(p, t, kernel),
                         "mu must be positive for the IBD field (mu = 0 is singular)",
                         std::invalid_argument);
    CHECK_THROWS_AS(psi00(p, t, kernel), std::invalid_argument);
}

TEST_CASE("unbalanced exchange is rejected at the field level") {
    auto p = make_params(10, 10, "0.1", "0.3", 0.05, 0.3);
    torus_spec t{1, 4};
    auto kernel = migration_kernel::nearest_neighbour(p.nu);
    CHECK_THROWS_AS(compute_ibd_field(p, t, kernel), std::invalid_argument);
}
