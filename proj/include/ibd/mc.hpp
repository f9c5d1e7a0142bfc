#pragma once

#include "ibd/kernel.hpp"
#include "ibd/linalg4.hpp"
#include "ibd/params.hpp"
#include "ibd/rng.hpp"
#include "ibd/torus.hpp"

#include <cstdint>

namespace ibd {

// Backward-in-time two-lineage sampler.  Per generation, with m = (1-mu)^2:
//   1. each lineage is independently killed by mutation with probability mu;
//   2. a surviving dormant lineage wakes (same colony) with probability
//      swap, else stays dormant; a surviving active lineage goes dormant
//      (same colony) with probability swap, else stays active and moves by
//      the lazy kernel p = (1-nu) I + nu q;
//   3. if both lineages were active, stayed active, and now share a colony,
//      they coalesce with probability 1/N.
// The symmetric swap fraction (eps = delta) is a hard requirement: the
// asymmetric case does not define a probability transition for a lineage.
enum class replica_kind { coalesced, mutated, truncated };

struct replica_outcome {
    replica_kind kind = replica_kind::truncated;
    std::int64_t generation = 0;
};

struct lineage_pair_state {
    site pos_a{};
    site pos_b{};
    bool active_a = true;
    bool active_b = true;
    std::int64_t generation = 0;
};

class pair_walker {
  public:
    pair_walker(const model_params& p, const torus_spec& torus, const migration_kernel& kernel);

    // one backward generation; returns true while the pair is still alive
    bool step(lineage_pair_state& s, replica_outcome& out, rng_stream& rng) const;

    // run a full replica from (0, x) with activity configuration
    // config = 2*(lineage a active) + (lineage b active), capped at `cap`
    replica_outcome run(const site& x, int config, std::int64_t cap, rng_stream& rng) const;

    // generation cap with un-truncated mass below 1e-12: ceil(log 1e-12/log m)
    std::int64_t default_cap() const;

  private:
    model_params params_;
    torus_spec torus_;
    migration_kernel kernel_;
    double swap_ = 0.0;
    // cumulative displacement table of q for sampling one migration step
    std::vector<site> disp_;
    std::vector<double> disp_cdf_;
};

struct mc_estimate {
    vec4 psi{};                 // fraction of replicas coalesced, per start config
    vec4 se{};                  // binomial standard errors
    vec4 truncated_fraction{};  // replicas that hit the cap
    std::int64_t n_reps = 0;
    std::int64_t cap = 0;
    double tail_bound = 0.0; // m^cap
};

// n_reps replicas for each of the four start configurations at displacement x
mc_estimate estimate_ibd(const model_params& p, const torus_spec& torus,
                         const migration_kernel& kernel, const site& x, std::int64_t n_reps,
                         std::uint64_t seed, int threads = 0);

struct mc_moment_report {
    double second_moment = 0.0;      // sum_x |x|^2 psi4_hat(x), stratified starts
    double second_moment_se = 0.0;   // from per-site binomial errors
    double mean_tau_conditional = 0.0; // mean coalescence generation given coalescence (x = 0)
    double mean_tau_all_events = 0.0;  // mean event generation over all replicas (x = 0)
    double coalesced_fraction = 0.0;   // both-active x = 0 replicas that coalesced
    std::int64_t n_reps = 0;
    std::int64_t cap = 0;
    double tail_bound = 0.0;
};

// time-to-coalescence and spatial-moment estimates (both-active starts)
mc_moment_report estimate_time_and_moment(const model_params& p, const torus_spec& torus,
                                          const migration_kernel& kernel, std::int64_t n_reps,
                                          std::uint64_t seed, int threads = 0);

} // namespace ibd
