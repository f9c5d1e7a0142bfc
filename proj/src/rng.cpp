#include "ibd/rng.hpp"

namespace ibd {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

rng_stream::rng_stream(std::uint64_t seed, std::uint64_t key) {
    // mix seed and key through two finalizer rounds to decorrelate streams
    state_ = splitmix64(splitmix64(seed) ^ (key * 0x9e3779b97f4a7c15ULL));
}

std::uint64_t rng_stream::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double rng_stream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t rng_stream::below(std::uint64_t n) {
    // rejection-free modulo with 64-bit multiply-shift (Lemire)
    const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace ibd
