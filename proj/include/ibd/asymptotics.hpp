#pragma once

#include "ibd/green.hpp"
#include "ibd/kernel.hpp"
#include "ibd/linalg4.hpp"
#include "ibd/params.hpp"
#include "ibd/torus.hpp"

#include <vector>

namespace ibd {

// Weighted return-probability sums of the migration walk that drive the
// slow-seed-bank expansion of the IBD field:
//   alpha-hat(theta) = m phat^2 / (1 - m phat^2)
//   beta-hat(theta)  = m^2 phat^3 / ((1 - m phat)(1 - m phat^2))
//   gamma-hat(theta) = m phat^2 / (1 - m phat^2)^2
// with m = (1-mu)^2 and phat = 1 - nu + nu qhat(theta).  alpha(x) etc. are
// their inverse Fourier transforms.
struct abg_triple {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

// Route 1: direct inversion of the dual-grid sums (finite torus, any kernel).
abg_triple abg_spectral(const site& x, double mu, double nu, const torus_spec& torus,
                        const migration_kernel& kernel);
std::vector<abg_triple> abg_spectral_field(double mu, double nu, const torus_spec& torus,
                                           const migration_kernel& kernel);

// Route 2: Green-function evaluations at the three poles of the alpha/beta/
// gamma generating functions,
//   a = (1-mu) nu, b = (1-mu)(1-nu),
//   z1 = a/(1-b), z2 = -a/(1+b), z3 = (1-mu) a / (1 - (1-mu) b):
//   alpha(x) = G_x(z1)/(2(1-b)) + G_x(z2)/(2(1+b)) - [x=0]
//   beta(x)  = (1-mu)/(2 mu) G_x(z1)/(1-b)
//              - (1-mu)/(2(2-mu)) G_x(z2)/(1+b)
//              - G_x(z3) / ((1-(1-mu)^2)(1-(1-mu) b)) + [x=0]
//   gamma(x) = b G_x(z1)/(4(1-b)^2) + a G'_x(z1)/(4(1-b)^3)
//              - b G_x(z2)/(4(1+b)^2) - a G'_x(z2)/(4(1+b)^3)
// Nearest-neighbour walk only (the Green module evaluates that walk); the
// geometry may be a finite torus or the infinite lattice.
abg_triple abg_green(const site& x, double mu, double nu, const green_query& geometry);

// Auxiliary displacement kernel linking beta to alpha by cyclic convolution,
//   lag(x) = G_x(z3) / (1 - (1-mu) b) - [x=0],   beta = alpha * lag.
// Fourier side: lag-hat = m phat / (1 - m phat).
double lag_kernel(const site& x, double mu, double nu, const green_query& geometry);

// Exact both-active IBD probability at delta = 0 (lineages never enter the
// dormant layer): psi4 = alpha(x) / (N + alpha(0)); the three configurations
// with a dormant member are exactly 0.  N enters only as a real parameter.
double psi4_delta0(double alpha_x, double alpha_0, double N);

// First-order coefficient of the IBD 4-vector in the symmetric swap fraction
// delta (= eps), at fixed x:
//   Phi_1 = 0
//   Phi_2 = Phi_3 = beta(x) / (N + alpha(0))
//   Phi_4 = 2 ([alpha(x) gamma(0) - alpha(0) gamma(x)] - N gamma(x))
//           / (N + alpha(0))^2
vec4 phi_correction(const abg_triple& at_x, const abg_triple& at_0, double N);

// First-order prediction psi(delta) = (0,0,0, alpha(x)/(N+alpha(0))) + delta*Phi.
vec4 psi_small_delta(const abg_triple& at_x, const abg_triple& at_0, double N, double delta);

// Convenience wrappers taking full model parameters (require M = N and
// eps = delta, the hypotheses under which the expansion is stated).
vec4 phi_correction(const model_params& p, const site& x, const torus_spec& torus,
                    const migration_kernel& kernel);
vec4 psi_small_delta(const model_params& p, const site& x, const torus_spec& torus,
                     const migration_kernel& kernel);

// Time-scale ratios of mutation vs migration for the slow-mutation limit,
// rho = mu / nu:
//   u = (1-mu) nu / (1 - (1-mu)(1-nu))        (= z1)
//   v = (1-mu)^2 nu / (1 - (1-mu)^2 (1-nu))   (= z3)
// with cubic expansions
//   u = 1 - rho + (1-nu) rho^2 - (1-nu)^2 rho^3 + O(rho^4)
//   v = 1 - 2 rho + (4-3 nu) rho^2 - 4(1-nu)(2-nu) rho^3 + O(rho^4)
struct uv_expansion {
    double u_exact = 0.0;
    double v_exact = 0.0;
    double u_cubic = 0.0;
    double v_cubic = 0.0;
};

uv_expansion rho_expansion_uv(double rho, double nu);

} // namespace ibd
