#include "doctest.h"

#include "ibd/kernel.hpp"
#include "ibd/mc.hpp"
#include "ibd/params.hpp"
#include "ibd/rng.hpp"
#include "ibd/second_moment.hpp"
#include "ibd/spectral.hpp"
#include "ibd/torus.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace ibd;

namespace {

model_params make_params(std::int64_t N, const char* swap, double mu, double nu) {
    model_params p;
    p.N = N;
    p.M = N;
    p.eps = parse_rational(swap);
    p.delta = parse_rational(swap);
    p.mu = mu;
    p.nu = nu;
    return p;
}

// Exact probability that the backward pair walker coalesces within T
// generations on the two-colony ring (d = 1, L = 2), by dynamic programming
// over (colony difference, activity a, activity b).  Mirrors the sampler's
// event order: mutation kill, then per-lineage swap/move, then the
// coalescence draw gated on both lineages having been active and still
// being active in a shared colony.
double exact_coalesce_by(int T, int config, int x, double mu, double s, double nu, double N) {
    std::array<double, 8> prob{};
    prob[static_cast<std::size_t>(4 * x + 2 * ((config & 2) ? 1 : 0) + ((config & 1) ? 1 : 0))] =
        1.0;
    const double m = (1.0 - mu) * (1.0 - mu);
    struct tr {
        bool act;
        bool mv;
        double p;
    };
    auto transitions = [&](bool active) {
        std::vector<tr> v;
        if (active) {
            v.push_back({false, false, s});
            v.push_back({true, true, (1.0 - s) * nu});
            v.push_back({true, false, (1.0 - s) * (1.0 - nu)});
        } else {
            v.push_back({true, false, s});
            v.push_back({false, false, 1.0 - s});
        }
        return v;
    };
    double coal = 0.0;
    for (int g = 0; g < T; ++g) {
        std::array<double, 8> next{};
        for (int st = 0; st < 8; ++st) {
            const double w0 = prob[static_cast<std::size_t>(st)];
            if (w0 == 0.0) continue;
            const int diff = st >> 2;
            const bool aa = (st & 2) != 0;
            const bool ab = (st & 1) != 0;
            const double w = w0 * m;
            for (const auto& ta : transitions(aa)) {
                for (const auto& tb : transitions(ab)) {
                    const int ndiff = diff ^ static_cast<int>(ta.mv) ^ static_cast<int>(tb.mv);
                    double wp = w * ta.p * tb.p;
                    if (aa && ab && ta.act && tb.act && ndiff == 0) {
                        coal += wp / N;
                        wp *= 1.0 - 1.0 / N;
                    }
                    next[static_cast<std::size_t>(4 * ndiff + 2 * ta.act + tb.act)] += wp;
                }
            }
        }
        prob = next;
    }
    return coal;
}

} // namespace

TEST_CASE("sampler matches the exact three-generation path sum on two colonies") {
    auto p = make_params(2, "3/10", 0.1, 0.7);
    torus_spec t{1, 2};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const pair_walker walker(p, t, kern);
    const std::int64_t n = 150000;
    for (int x = 0; x < 2; ++x) {
        for (int config = 0; config < 4; ++config) {
            const double exact =
                exact_coalesce_by(3, config, x, p.mu, p.delta_d(), p.nu, static_cast<double>(p.N));
            std::int64_t hits = 0;
            for (std::int64_t r = 0; r < n; ++r) {
                rng_stream rng(4242, static_cast<std::uint64_t>(8 * r + 4 * x + config));
                site start{};
                start[0] = x;
                if (walker.run(start, config, 3, rng).kind == replica_kind::coalesced) ++hits;
            }
            const double phat = static_cast<double>(hits) / static_cast<double>(n);
            const double tol =
                4.0 * std::sqrt(exact * (1.0 - exact) / static_cast<double>(n)) + 1e-12;
            INFO("x ", x, " config ", config, " exact ", exact, " mc ", phat);
            CHECK(std::abs(phat - exact) < tol);
        }
    }
}

TEST_CASE("zero swap on a frozen difference walk is exactly geometric") {
    // nu = 1 on the two-colony ring flips both lineages every generation, so
    // two active lineages started together stay together; per generation the
    // pair survives mutation with m and coalesces with 1/N, giving
    //   psi_4(0) = m / (N(1-m) + m)
    auto p = make_params(4, "0", 0.05, 1.0);
    torus_spec t{1, 2};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const double m = p.m();
    const double exact = m / (static_cast<double>(p.N) * (1.0 - m) + m);

    const auto est = estimate_ibd(p, t, kern, site{}, 200000, 777);
    CHECK(std::abs(est.psi[3] - exact) < 4.0 * est.se[3] + 1e-12);

    // with no swap a dormant lineage never wakes: those starts cannot coalesce
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(est.psi[c] == 0.0);
        CHECK(est.se[c] == 0.0);
    }

    // and the closed-form field agrees with the bare geometric sum here
    const auto field = compute_ibd_field(p, t, kern);
    CHECK(field.psi_same_colony[3] == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("estimate agrees with the closed-form field at the reference point") {
    auto p = make_params(10, "1/10", 0.05, 0.3);
    torus_spec t{1, 4};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const auto field = compute_ibd_field(p, t, kern);
    for (std::int64_t xi : {0, 2}) {
        site x{};
        x[0] = xi;
        const auto est = estimate_ibd(p, t, kern, x, 400000, 20260815 + xi);
        const vec4 ref = field.psi[static_cast<std::size_t>(t.index_of(x))];
        for (std::size_t c = 0; c < 4; ++c) {
            INFO("x ", xi, " config ", c, " ref ", ref[c], " mc ", est.psi[c]);
            CHECK(std::abs(est.psi[c] - ref[c]) < 4.0 * est.se[c] + 1e-9);
        }
        CHECK(est.truncated_fraction[3] <= 5e-6);
    }
}

TEST_CASE("every lineage is killed in the first generation when mu = 1") {
    auto p = make_params(5, "0.2", 1.0, 0.5);
    torus_spec t{1, 4};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const pair_walker walker(p, t, kern);
    for (std::uint64_t seed : {1ULL, 99ULL, 123456ULL}) {
        rng_stream rng(seed, 0);
        const auto out = walker.run(site{}, 3, 5, rng);
        CHECK(out.kind == replica_kind::mutated);
        CHECK(out.generation == 1);
    }
}

TEST_CASE("generation cap tracks the mutation survival rate") {
    auto p = make_params(10, "0.1", 0.05, 0.3);
    torus_spec t{1, 4};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const pair_walker walker(p, t, kern);
    // ceil(log 1e-12 / log 0.9025) = 270
    CHECK(walker.default_cap() == 270);
    const auto est = estimate_ibd(p, t, kern, site{}, 100, 5);
    CHECK(est.cap == 270);
    CHECK(est.tail_bound <= 1e-12);
    CHECK(est.tail_bound > 1e-14);
}

TEST_CASE("results are bit-identical across seeds reruns and thread counts") {
    auto p = make_params(8, "0.15", 0.08, 0.4);
    torus_spec t{2, 3};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    site x{};
    x[0] = 1;
    const auto base = estimate_ibd(p, t, kern, x, 50000, 31337, 1);
    for (int threads : {3, 7}) {
        const auto again = estimate_ibd(p, t, kern, x, 50000, 31337, threads);
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(again.psi[c] == base.psi[c]);
            CHECK(again.se[c] == base.se[c]);
            CHECK(again.truncated_fraction[c] == base.truncated_fraction[c]);
        }
    }
    const auto other = estimate_ibd(p, t, kern, x, 50000, 31338, 2);
    CHECK(other.psi[3] != base.psi[3]);
}

TEST_CASE("standard error shrinks like the square root of the replica count") {
    auto p = make_params(4, "0", 0.05, 1.0);
    torus_spec t{1, 2};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const auto small = estimate_ibd(p, t, kern, site{}, 20000, 11);
    const auto big = estimate_ibd(p, t, kern, site{}, 80000, 11);
    const double ratio = small.se[3] / big.se[3];
    CHECK(ratio > 1.9);
    CHECK(ratio < 2.1);
}

TEST_CASE("time-and-moment report matches the lattice second moment") {
    auto p = make_params(5, "0.1", 0.05, 0.3);
    torus_spec t{1, 8};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    const auto rep = estimate_time_and_moment(p, t, kern, 120000, 909);
    const vec4 emp = zeta_empirical(p, t, kern);
    INFO("mc ", rep.second_moment, " lattice ", emp[3], " se ", rep.second_moment_se);
    CHECK(std::abs(rep.second_moment - emp[3]) < 4.0 * rep.second_moment_se + 1e-9);

    // origin coalescence fraction is psi_4(0)
    const auto field = compute_ibd_field(p, t, kern);
    const double p4 = field.psi_same_colony[3];
    const double se0 = std::sqrt(p4 * (1.0 - p4) / 120000.0);
    CHECK(std::abs(rep.coalesced_fraction - p4) < 4.0 * se0);

    CHECK(rep.mean_tau_conditional > 0.0);
    CHECK(rep.mean_tau_all_events > 0.0);
    CHECK(rep.mean_tau_all_events <= static_cast<double>(rep.cap));

    const auto rethreaded = estimate_time_and_moment(p, t, kern, 120000, 909, 5);
    CHECK(rethreaded.second_moment == rep.second_moment);
    CHECK(rethreaded.mean_tau_conditional == rep.mean_tau_conditional);
}

TEST_CASE("asymmetric swap fractions are rejected") {
    model_params p;
    p.N = 2;
    p.M = 1;
    p.eps = parse_rational("1/10");
    p.delta = parse_rational("1/5");
    p.mu = 0.1;
    p.nu = 0.5;
    torus_spec t{1, 4};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    CHECK_THROWS_WITH_AS(estimate_ibd(p, t, kern, site{}, 10, 1),
                         "MC requires symmetric swap", std::invalid_argument);
}

TEST_CASE("mu = 0 is rejected before any replica runs") {
    auto p = make_params(4, "0.1", 0.0, 0.5);
    torus_spec t{1, 4};
    auto kern = migration_kernel::nearest_neighbour(p.nu);
    CHECK_THROWS_WITH_AS(estimate_ibd(p, t, kern, site{}, 10, 1),
                         "mc requires mu > 0 (the generation cap diverges at mu = 0)",
                         std::invalid_argument);
    auto ok = make_params(4, "0.1", 0.1, 0.5);
    CHECK_THROWS_WITH_AS(estimate_ibd(ok, t, kern, site{}, 0, 1),
                         "mc: n_reps must be at least 1", std::invalid_argument);
}
