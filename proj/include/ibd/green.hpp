#pragma once

#include "ibd/torus.hpp"

#include <cstdint>

namespace ibd {

// Lattice geometry for Green-function evaluation: finite torus (L >= 2) or
// infinite lattice (L == infinite_lattice).
inline constexpr std::int64_t infinite_lattice = 0;

struct green_query {
    int d = 1;
    std::int64_t L = infinite_lattice;
};

// Green function of the uniform nearest-neighbour walk,
//   G_x(z) = sum_{t>=0} z^t P_t(0, x),
// evaluated at real z with |z| <= 1 - 1e-12 (values closer to 1 are
// rejected; the z -> 1 behaviour is exposed through the expansion
// coefficients below).
double green(const green_query& g, const site& x, double z);

// dG_x/dz
double green_derivative(const green_query& g, const site& x, double z);

// finite-torus Fourier sums (any d)
double green_torus(const torus_spec& t, const site& x, double z);
double green_torus_derivative(const torus_spec& t, const site& x, double z);

// d = 1 infinite-lattice closed forms:
//   G_x(z) = y^{|x|} / sqrt(1-z^2),  y = (1 - sqrt(1-z^2)) / z
double green_1d_infinite(std::int64_t x, double z);
double green_1d_infinite_derivative(std::int64_t x, double z);

// d = 1 torus closed form (image sum of the infinite-lattice formula):
//   G_x(z) = [y^x + y^{L-x}] / ((1 - y^L) sqrt(1-z^2)),  0 <= x < L
double green_1d_torus(std::int64_t L, std::int64_t x, double z);

// d = 1 series oracle: sum_{l <= l_max} z^l P(walk at x after l steps),
// computed by iterating the one-step averaging; remainder bounded by
// |z|^{l_max+1}/(1-|z|)
double green_1d_series(std::int64_t x, double z, int l_max = 200);

// both sides of the resolvent convolution identity on a finite torus,
//   sum_y G_{x-y}(z) G_y(z') = [z G_x(z) - z' G_x(z')] / (z - z')
struct convolution_check {
    double lhs = 0.0;
    double rhs = 0.0;
};
convolution_check convolution_identity_check(const torus_spec& t, const site& x, double z,
                                             double zp);

// d = 2 infinite lattice: single periodic trapezoid over theta_1 with the
// theta_2 sum in closed form (geometric/residue formula)
double green_2d_infinite(const site& x, double z);

// d = 3 infinite lattice: torus value minus the theta = 0 pole, with an
// L-doubling ladder until the change drops below tol
double green_3d_infinite(const site& x, double z, double tol = 1e-9);

// Torus expansion about z = 1 (exact finite sums over theta != 0):
//   G_x(z) = L^{-d}/(1-z) + C_L(x) - Cbar_L(x) (1-z) + O((1-z)^2)
double c_coeff_torus(const torus_spec& t, const site& x);
double cbar_coeff_torus(const torus_spec& t, const site& x);

// d = 1 closed forms for the same coefficients
double c_coeff_1d(std::int64_t L, std::int64_t x);    // (L^2-1)/(6L) - x(L-x)/L
double cbar_coeff_1d(std::int64_t L, std::int64_t x); // see implementation

// d = 2 potential-kernel expansion
//   pi G_x(z) = log(8/(1-z)) - C(x) + Cbar(x) (1-z) log(1/(1-z)) + O(1-z),
// C extracted numerically at small 1-z; Cbar(x) = ||x||^2 + 1/2
double c2_potential(const site& x, double h = 1e-8);

// d = 3: C(x) = G_x(1), via pole-excluded torus sums with 1/L Richardson
double c3_potential(const site& x, std::int64_t L_coarse = 24);

// modified Bessel function K0 (series for u <= 2, cosh-substitution
// trapezoid above); relative error < 2e-12 on [1e-3, 50]
double bessel_k0(double u);
double bessel_k0_derivative(double u); // = -K1, via central difference

// ---- named lattice constants -------------------------------------------

struct lattice_constants_2d {
    double c_torus;      // growth coefficient: Cbar_L(0) = c L^2 - (1/pi) log L + O(1)
    double cl0_offset;   // limit of C_L(0) - (2/pi) log L
};

struct lattice_constants_3d {
    double c0;    // C(0) = G_0(1), Watson-type constant ~ 1.51638
    double cbar0; // sqrt(1-z) coefficient, = 3 sqrt(3) / (pi sqrt(2))
};

lattice_constants_2d compute_lattice_constants_2d();
lattice_constants_3d compute_lattice_constants_3d();

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

} // namespace ibd
