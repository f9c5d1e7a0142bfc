#include "ibd/single_colony.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ibd {

double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

double binomial_pmf(std::int64_t n, double prob, std::int64_t k) {
    if (k < 0 || k > n) return 0.0;
    if (prob <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (prob >= 1.0) return k == n ? 1.0 : 0.0;
    const double lp = log_choose(n, k) + static_cast<double>(k) * std::log(prob) +
                      static_cast<double>(n - k) * std::log1p(-prob);
    return std::exp(lp);
}

double hypergeometric_pmf(std::int64_t population, std::int64_t successes,
                          std::int64_t draws, std::int64_t k) {
    if (k < 0 || k > successes || k > draws || draws - k > population - successes) return 0.0;
    const double lp = log_choose(successes, k) + log_choose(population - successes, draws - k) -
                      log_choose(population, draws);
    return std::exp(lp);
}

double wf_transition_prob(std::int64_t N, std::int64_t i, std::int64_t j) {
    if (i < 0 || i > N) throw std::invalid_argument("wf_transition_prob: i out of range");
    return binomial_pmf(N, static_cast<double>(i) / static_cast<double>(N), j);
}

std::int64_t exchange_count(const model_params& p) {
    if (!p.balanced()) throw std::invalid_argument("\xce\xb5N \xe2\x89\xa0 \xce\xb4M");
    const __int128 prod = static_cast<__int128>(p.eps.num) * p.N;
    if (prod % p.eps.den != 0)
        throw std::invalid_argument("eps*N must be an integer exchange count");
    const std::int64_t c = static_cast<std::int64_t>(prod / p.eps.den);
    if (c < 0 || c > p.N || c > p.M)
        throw std::invalid_argument("exchange count out of range");
    return c;
}

double seedbank_transition_prob(const model_params& p, colony_state now, colony_state next) {
    if (now.i < 0 || now.i > p.N || now.j < 0 || now.j > p.M)
        throw std::invalid_argument("seedbank_transition_prob: state out of range");
    if (next.i < 0 || next.i > p.N || next.j < 0 || next.j > p.M) return 0.0;
    const std::int64_t c = exchange_count(p);
    const double x = static_cast<double>(now.i) / static_cast<double>(p.N);
    double total = 0.0;
    const std::int64_t zlo = std::max<std::int64_t>(0, c - (p.M - now.j));
    const std::int64_t zhi = std::min(c, now.j);
    for (std::int64_t z = zlo; z <= zhi; ++z) {
        const double pz = hypergeometric_pmf(p.M, now.j, c, z);
        const double pu = binomial_pmf(p.N - c, x, next.i - z);
        const double pv = binomial_pmf(c, x, (next.j - now.j) + z);
        total += pz * pu * pv;
    }
    return total;
}

namespace {

std::int64_t sample_binomial(std::int64_t n, double prob, rng_stream& rng) {
    // n stays small here (<= population sizes used in tests); direct loop
    std::int64_t k = 0;
    for (std::int64_t t = 0; t < n; ++t)
        if (rng.bernoulli(prob)) ++k;
    return k;
}

std::int64_t sample_hypergeometric(std::int64_t population, std::int64_t successes,
                                   std::int64_t draws, rng_stream& rng) {
    // sequential draws without replacement
    std::int64_t k = 0, pop = population, suc = successes;
    for (std::int64_t t = 0; t < draws; ++t) {
        if (rng.bernoulli(static_cast<double>(suc) / static_cast<double>(pop))) {
            ++k;
            --suc;
        }
        --pop;
    }
    return k;
}

} // namespace

colony_state forward_step(const model_params& p, colony_state now, rng_stream& rng) {
    const std::int64_t c = exchange_count(p);
    const double x = static_cast<double>(now.i) / static_cast<double>(p.N);
    const std::int64_t z = sample_hypergeometric(p.M, now.j, c, rng);
    const std::int64_t u = sample_binomial(p.N - c, x, rng);
    const std::int64_t v = sample_binomial(c, x, rng);
    return colony_state{u + z, now.j - z + v};
}

} // namespace ibd
