#pragma once

#include "ibd/params.hpp"
#include "ibd/torus.hpp"

#include <map>
#include <vector>

namespace ibd {

// Migration kernel q on the torus.  The full one-step displacement law of an
// active lineage is p = (1-nu)*I + nu*q ("stay with probability 1-nu, else
// jump by q").  Default q: uniform nearest-neighbour, q(0,+-e_j) = 1/(2d).
// A custom kernel is a displacement table q(0,z) that must be symmetric
// (q(0,z) = q(0,-z)) and a probability distribution.
struct migration_kernel {
    enum class kind_t { nearest_neighbour, custom };

    kind_t kind = kind_t::nearest_neighbour;
    double nu = 1.0;
    // displacement -> probability, keyed by wrapped site (custom only)
    std::map<site, double> table;

    static migration_kernel nearest_neighbour(double nu);
    static migration_kernel custom(double nu, const torus_spec& torus,
                                   const std::map<site, double>& displacement_table);

    // characteristic function of q at frequency theta = k/L
    double qhat(const torus_spec& torus, const site& k) const;

    // characteristic function of the lazy step p: 1 - nu + nu*qhat
    double phat(const torus_spec& torus, const site& k) const;

    // one-step displacement probability q(0, z)
    double q_disp(const torus_spec& torus, const site& z) const;

    // p(x, y) = (1-nu) [x==y] + nu q(0, y-x)
    double p_step(const torus_spec& torus, const site& x, const site& y) const;
};

} // namespace ibd
