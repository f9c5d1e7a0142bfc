#pragma once

#include "ibd/torus.hpp"

#include <cstdint>

namespace ibd {

// Slow-mutation predictions for the IBD field at delta = 0 (both-active
// component, psi4) and for its first-order-in-delta correction (phi2 = phi3
// and phi4), parametrised by rho = mu/nu.  The colony size N enters as a
// real parameter: the regime constructions pick N from a target effective
// ratio r, so no integrality is assumed here.
//
// Conventions for the lattice constants that appear below:
//   d=1 torus:    C_L(x) = (L^2-1)/(6L) - x(L-x)/L  (and its second-order
//                 companion Cbar_L), exact finite sums for general d;
//   d=2 infinite: potential-kernel constant C(x) with C(0) = 0,
//                 C(x) = log||x||^2 + 2 gamma_E + log 8 + O(||x||^-2),
//                 and Cbar+(x) = ||x||^2 + 1/2;
//   d=3 infinite: C(x) = G_x(1) (so C(0) ~ 1.516386) and the constant
//                 sqrt(1-z) coefficient Cbar(0) = 3 sqrt(3)/(pi sqrt(2)).

// ---- finite-rho predictions ---------------------------------------------

double psi4_slow_mutation_infinite(int d, const site& x, double rho, double nu, double N);
double psi4_slow_mutation_torus(const torus_spec& t, const site& x, double rho, double nu,
                                double N);

struct phi_pair {
    double phi2 = 0.0; // = phi3
    double phi4 = 0.0;
};

phi_pair phi_slow_mutation_infinite(int d, const site& x, double rho, double nu, double N);
phi_pair phi_slow_mutation_torus(const torus_spec& t, const site& x, double rho, double nu,
                                 double N);

// Variant of the d=2 infinite-lattice phi4 prediction whose denominator
// carries the x-dependent constant C(x).  Kept for comparison only: it
// contradicts the exact first-order route (whose denominator (N+alpha(0))^2
// does not depend on x), and the scaled-window ladder refutes it.
double phi4_slow_mutation_2d_printed(const site& x, double rho, double nu, double N);

// ---- limit laws (explicit scaled arguments) ------------------------------
// Each function returns the limiting value of the indicated scaled quantity.

// d=1 infinite, x = y/sqrt(2 rho), N = r/(nu sqrt(2 rho)):
//   psi4 -> e^{-|y|}/(1+2r)
double law_psi4_d1(double y, double r);

// d=2 infinite, x = y/rho^chi (0 < chi < 1/2), N = r log(1/rho)/nu:
//   psi4 -> (1-2 chi)/(1+2 pi r)
double law_psi4_d2_window(double chi, double r);

// refinement: limit of (1-2 chi) log(1/rho) [psi4 - (1-2 chi)/(1+2 pi r)]
double law_psi4_d2_window_refined(double y_norm, double chi, double r, double nu);

// d=2 infinite, x = y/sqrt(rho): log(1/rho) psi4 -> 2 K0(2||y||)/(1+2 pi r)
double law_psi4_d2_k0(double y_norm, double r);

// d=3 infinite, fixed x, N = r/nu: psi4 -> C(x)/(C(0)+2r)
double law_psi4_d3(const site& x, double r);

// d=1 torus, N nu/L -> r, L^2 rho -> s, x = y L^chi (0 < chi < 1):
// psi4 -> center; L^{1-chi}(psi4 - center) -> slope * (sign conventions:
// slope is negative, the profile decays away from x = 0)
struct torus_limit_profile {
    double center_bracket = 0.0; // (1+s/6)/(1+(1/6+2r)s): small-s form
    double center_coth = 0.0;    // c coth c/(2rs + c coth c), c = sqrt(s/2)
    double slope_bracket = 0.0;  // -y s/(1+(1/6+2r)s)
    double slope_coth = 0.0;     // -y s/(2rs + c coth c)
};
torus_limit_profile law_psi4_torus(double y, double r, double s);

// d=1 infinite: nu rho Phi2_{y/sqrt(2 rho)} -> [e^{-|y|} - e^{-sqrt2 |y|}/sqrt2]/(1+2r)
double law_phi2_d1(double y, double r);
// d=1 infinite: 2 nu rho Phi4 -> -e^{-|y|}[(1+2r)|y| + 2r]/(1+2r)^2
double law_phi4_d1(double y, double r);

// d=2 window x = y/rho^chi: nu rho log(1/rho) Phi2 -> log2/(1+2 pi r)
double law_phi2_d2_window(double r);
// d=2, x = y/sqrt(rho): nu rho log(1/rho) Phi2 -> 2[K0(2||y||)-K0(2 sqrt2 ||y||)]/(1+2 pi r)
double law_phi2_d2_k0(double y_norm, double r);
// d=3 fixed x: nu sqrt(rho) Phi2 -> (sqrt2 - 1) Cbar(0)/(C(0)+2r)
double law_phi2_d3(double r);

// d=2 window: nu rho log(1/rho) Phi4 -> -(2 chi + 2 pi r)/(1+2 pi r)^2
double law_phi4_d2_window(double chi, double r);
// d=2, x = y/sqrt(rho): nu rho log(1/rho) Phi4 -> 2||y|| K0'(2||y||)/(1+2 pi r)
double law_phi4_d2_k0(double y_norm, double r);
// d=3 fixed x: 4 nu sqrt(rho) Phi4 -> 2 Cbar(0)[C(x)-C(0)-2r]/(C(0)+2r)^2
double law_phi4_d3(const site& x, double r);

// d=1 torus (r, s as above): 2 nu rho Phi2_{y L^chi} -> 1/(1+(1/6+2r)s)
double law_phi2_torus(double r, double s);
// derived:  nu rho Phi4 -> -2 r s/(1+(1/6+2r)s)^2
double law_phi4_torus_derived(double r, double s);
// as printed: nu sqrt(rho) Phi4 -> r sqrt(s)/(1/6+2r); the scaling and sign
// disagree with the finite-rho expansion and the ladder test refutes it —
// retained so the comparison can be reported.
double law_phi4_torus_printed(double r, double s);

// ---- regime query dispatchers --------------------------------------------

struct regime_query {
    int d = 1;
    bool on_torus = false;
    std::int64_t L = 0; // torus size when on_torus
    site x{};           // lattice displacement
    double rho = 0.0;   // mu/nu
    double nu = 0.0;
    double N = 0.0;     // real-valued colony-size parameter
};

// finite-rho prediction of psi4 at delta = 0
double predict_psi4_no_seedbank(const regime_query& q);
// finite-rho prediction of (phi2, phi4)
phi_pair predict_phi_slow_seedbank(const regime_query& q);
// d=1 finite-torus law: limiting psi4 value given r = N nu/L, s = L^2 rho
double predict_finite_torus_panmictic(double r, double s);

// effective ratio r for each regime construction:
//   d=1 infinite N nu sqrt(2 rho); d=2 N nu/log(1/rho); d=3 N nu; torus N nu/L
double r_effective(int d, bool on_torus, double N, double nu, double rho, double L);
// inverse: the N that realises a target r along the same path
double n_for_r(int d, bool on_torus, double r, double nu, double rho, double L);

} // namespace ibd
