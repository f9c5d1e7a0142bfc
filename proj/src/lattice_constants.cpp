#include "ibd/green.hpp"

#include <cmath>
#include <numbers>

namespace ibd {

namespace {
constexpr double pi = std::numbers::pi;
}

double c2_potential(const site& x, double h) {
    // pi G_x(1-h) = log(8/h) - C(x) + O(h log h)
    const double g = green_2d_infinite(x, 1.0 - h);
    return std::log(8.0 / h) - pi * g;
}

double c3_potential(const site& x, std::int64_t L_coarse) {
    const torus_spec ta{3, L_coarse};
    const torus_spec tb{3, 2 * L_coarse};
    const double va = c_coeff_torus(ta, x);
    const double vb = c_coeff_torus(tb, x);
    // C_L = C + a/L: eliminate the 1/L term
    const double La = static_cast<double>(L_coarse), Lb = static_cast<double>(2 * L_coarse);
    return (Lb * vb - La * va) / (Lb - La);
}

lattice_constants_2d compute_lattice_constants_2d() {
    // f(L) = Cbar_L(0) + log(L)/pi = c L^2 + e: least squares over {32,64,128}
    const std::int64_t Ls[3] = {32, 64, 128};
    double f[3];
    for (int i = 0; i < 3; ++i) {
        const torus_spec t{2, Ls[i]};
        f[i] = cbar_coeff_torus(t, site{0, 0, 0}) + std::log(static_cast<double>(Ls[i])) / pi;
    }
    // 2x2 normal equations for f = c L^2 + e
    double sxx = 0.0, sx = 0.0, sxy = 0.0, sy = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double u = static_cast<double>(Ls[i]) * static_cast<double>(Ls[i]);
        sxx += u * u;
        sx += u;
        sxy += u * f[i];
        sy += f[i];
    }
    const double det = 3.0 * sxx - sx * sx;
    lattice_constants_2d out;
    out.c_torus = (3.0 * sxy - sx * sy) / det;
    const torus_spec t{2, 256};
    out.cl0_offset = c_coeff_torus(t, site{0, 0, 0}) - (2.0 / pi) * std::log(256.0);
    return out;
}

lattice_constants_3d compute_lattice_constants_3d() {
    lattice_constants_3d out;
    out.c0 = c3_potential(site{0, 0, 0}, 24);
    out.cbar0 = 3.0 * std::sqrt(3.0) / (pi * std::sqrt(2.0));
    return out;
}

} // namespace ibd
