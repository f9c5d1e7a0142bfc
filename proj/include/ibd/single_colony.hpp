#pragma once

#include "ibd/params.hpp"
#include "ibd/rng.hpp"

#include <cstdint>

namespace ibd {

// One colony, two layers: i of N active individuals carry the focal type,
// j of M dormant ones do.  Each generation a fixed number c = eps*N = delta*M
// of individuals is exchanged between the layers.
struct colony_state {
    std::int64_t i = 0; // active count, 0..N
    std::int64_t j = 0; // dormant count, 0..M
};

// standard Wright-Fisher transition: P(j next | i now) = C(N,j) (i/N)^j (1-i/N)^(N-j)
double wf_transition_prob(std::int64_t N, std::int64_t i, std::int64_t j);

// the integer exchange count c = eps*N (= delta*M); throws if not integral
std::int64_t exchange_count(const model_params& p);

// Two-layer transition probability.  Decomposition per generation:
//   Z ~ Hypergeometric(M, j, c): focal-type count among the c individuals
//       waking from the seed-bank (drawn without replacement),
//   U ~ Binomial(N - c, i/N):    focal-type offspring filling the rest of
//       the active layer,
//   V ~ Binomial(c, i/N):        focal-type offspring entering the bank.
// Next state: i' = U + Z, j' = j - Z + V, so
//   P(i', j' | i, j) = sum_z P(Z = z) P(U = i' - z) P(V = (j' - j) + z).
double seedbank_transition_prob(const model_params& p, colony_state now, colony_state next);

// Sample one forward generation (used by tests; exact same decomposition)
colony_state forward_step(const model_params& p, colony_state now, rng_stream& rng);

// log C(n, k); -inf when k out of range
double log_choose(std::int64_t n, std::int64_t k);

double binomial_pmf(std::int64_t n, double prob, std::int64_t k);
double hypergeometric_pmf(std::int64_t population, std::int64_t successes,
                          std::int64_t draws, std::int64_t k);

} // namespace ibd
