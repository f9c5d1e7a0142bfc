#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ibd {

inline constexpr int max_dim = 3;

// Point on the discrete torus (Z/L)^d, stored with d <= 3.
using site = std::array<std::int64_t, max_dim>;

// Finite torus (Z/L)^d.  Frequencies are indexed by integer vectors
// k in {0,..,L-1}^d, i.e. theta = k/L in the dual torus.
struct torus_spec {
    int d = 1;
    std::int64_t L = 2;

    void validate() const;

    // number of colonies L^d
    std::int64_t n_sites() const;

    // flat index <-> coordinates, row-major over the d used entries
    std::int64_t index_of(const site& x) const;
    site site_of(std::int64_t idx) const;

    // componentwise reduction mod L into [0, L)
    site wrap(const site& x) const;
    // x - y mod L
    site diff(const site& x, const site& y) const;

    // representative of x in [-L/2, L/2]^d (ties to +L/2), used for |x|^2
    site centered(const site& x) const;

    // squared Euclidean norm of the centered representative
    double norm2_centered(const site& x) const;

    std::vector<site> all_sites() const;
};

} // namespace ibd
