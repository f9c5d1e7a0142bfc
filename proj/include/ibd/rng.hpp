#pragma once

#include <cstdint>

namespace ibd {

// splitmix64 finalizer; full-period, statistically solid for simulation use
std::uint64_t splitmix64(std::uint64_t x);

// Counter-based stream: the state is derived from (seed, key) once, then
// advanced by the splitmix64 increment.  Streams with distinct keys are
// independent for any fixed seed, which makes parallel Monte Carlo
// reproducible regardless of the thread partition.
class rng_stream {
public:
    rng_stream(std::uint64_t seed, std::uint64_t key);

    std::uint64_t next_u64();

    // uniform double in [0, 1), 53-bit resolution
    double next_double();

    // Bernoulli(p)
    bool bernoulli(double p) { return next_double() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

} // namespace ibd
