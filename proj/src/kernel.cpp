#include "ibd/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ibd {

migration_kernel migration_kernel::nearest_neighbour(double nu) {
    migration_kernel k;
    k.kind = kind_t::nearest_neighbour;
    k.nu = nu;
    return k;
}

migration_kernel migration_kernel::custom(double nu, const torus_spec& torus,
                                          const std::map<site, double>& displacement_table) {
    migration_kernel k;
    k.kind = kind_t::custom;
    k.nu = nu;
    double mass = 0.0;
    for (const auto& [z, p] : displacement_table) {
        if (p < 0.0) throw std::invalid_argument("custom kernel: negative probability");
        const site w = torus.wrap(z);
        k.table[w] += p;
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-12)
        throw std::invalid_argument("custom kernel: probabilities must sum to 1");
    // symmetry q(0,z) = q(0,-z)
    for (const auto& [z, p] : k.table) {
        site neg{0, 0, 0};
        for (int i = 0; i < torus.d; ++i) neg[i] = -z[i];
        const site nz = torus.wrap(neg);
        const auto it = k.table.find(nz);
        const double pneg = (it == k.table.end()) ? 0.0 : it->second;
        if (std::abs(p - pneg) > 1e-12)
            throw std::invalid_argument("custom kernel: table must be symmetric");
    }
    return k;
}

double migration_kernel::qhat(const torus_spec& torus, const site& k) const {
    if (kind == kind_t::nearest_neighbour) {
        double s = 0.0;
        for (int i = 0; i < torus.d; ++i)
            s += std::cos(2.0 * std::numbers::pi * static_cast<double>(k[i]) /
                          static_cast<double>(torus.L));
        return s / torus.d;
    }
    double s = 0.0;
    for (const auto& [z, p] : table) {
        double phase = 0.0;
        for (int i = 0; i < torus.d; ++i)
            phase += static_cast<double>(k[i]) * static_cast<double>(z[i]);
        s += p * std::cos(2.0 * std::numbers::pi * phase / static_cast<double>(torus.L));
    }
    return s;
}

double migration_kernel::phat(const torus_spec& torus, const site& k) const {
    return 1.0 - nu + nu * qhat(torus, k);
}

double migration_kernel::q_disp(const torus_spec& torus, const site& z) const {
    const site w = torus.wrap(z);
    if (kind == kind_t::custom) {
        const auto it = table.find(w);
        return it == table.end() ? 0.0 : it->second;
    }
    // nearest neighbour: displacement +-e_j, with wrap-around aliasing on
    // small tori (L = 2 folds +1 and -1 onto the same site)
    double p = 0.0;
    for (int i = 0; i < torus.d; ++i) {
        site e{0, 0, 0};
        e[i] = 1;
        if (torus.wrap(e) == w) p += 1.0 / (2.0 * torus.d);
        e[i] = -1;
        if (torus.wrap(e) == w) p += 1.0 / (2.0 * torus.d);
    }
    return p;
}

double migration_kernel::p_step(const torus_spec& torus, const site& x, const site& y) const {
    const site z = torus.diff(y, x);
    double p = nu * q_disp(torus, z);
    if (torus.wrap(z) == site{0, 0, 0}) p += 1.0 - nu;
    return p;
}

} // namespace ibd
