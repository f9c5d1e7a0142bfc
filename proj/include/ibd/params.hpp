#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ibd {

// Exact nonnegative rational, used for the exchange fractions so that the
// balance condition eps*N == delta*M can be checked without rounding.
struct rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    rational() = default;
    rational(std::int64_t n, std::int64_t d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    // this * k, reduced; throws on overflow
    rational times_int(std::int64_t k) const;

    bool operator==(const rational& o) const { return num == o.num && den == o.den; }
};

rational parse_rational(const std::string& text);

// Model parameters for the two-layer (active/dormant) population on each
// colony.  N active individuals, M dormant; eps = fraction of the active
// layer replaced from the seed-bank each generation, delta = fraction of the
// seed-bank replaced from the active layer; mu = per-generation mutation
// probability per lineage; nu = migration probability of an active lineage
// (shared with migration_kernel: the one-step law is (1-nu) I + nu q).
struct model_params {
    std::int64_t N = 1;
    std::int64_t M = 1;
    rational eps;    // active-layer exchange fraction
    rational delta;  // dormant-layer exchange fraction
    double mu = 0.0;
    double nu = 1.0;

    // (1-mu)^2: survival factor for the unordered pair per generation
    double m() const { return (1.0 - mu) * (1.0 - mu); }

    double eps_d() const { return eps.value(); }
    double delta_d() const { return delta.value(); }

    // exact check of the exchange balance eps*N == delta*M
    bool balanced() const;

    // throws std::invalid_argument with a user-facing message on bad input
    void validate() const;
};

} // namespace ibd
