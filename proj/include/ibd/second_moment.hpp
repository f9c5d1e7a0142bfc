#pragma once

#include "ibd/kernel.hpp"
#include "ibd/linalg4.hpp"
#include "ibd/params.hpp"
#include "ibd/spectral.hpp"
#include "ibd/torus.hpp"

#include <cstdint>

namespace ibd {

// U = (I - Bhat(0))^-1 in closed form.  With m = (1-mu)^2, A = 1 - m(1-d-e),
// B = 1 - m(1-d-e)^2 (writing d for delta, e for eps):
//   u0 = (1-m) A B
//   s1 = m (1-d - m(1-e)(1-d-e))         t1 = (1 - m(1-e)^2) A - 2 m d e
//   s2 = m (1 + m(1-d-e))                t2 = (1 - m(1-d)(1-e)) A - m(d^2+e^2)
//   s3 = m ((1-m)(1-e) + d m(2-d-e))     t4 = (1 - m(1-d)^2) A - 2 m d e
//
//        [ t1    e s1   e s1   e^2 s2 ]
//   U =  [ d s1  t2     d e s2 e s3   ]  / u0
//        [ d s1  d e s2 t2     e s3   ]
//        [ d^2 s2  d s3  d s3  t4     ]
mat4 u_matrix(const model_params& p);

// same object through LU inversion of (I - Bhat(0)); transcription oracle
mat4 u_matrix_inverse_route(const model_params& p);

// first order in the symmetric swap fraction (eps = delta = swap):
//   U = c I + swap * m c^2 * stencil + O(swap^2), c = 1/(1-m)
mat4 u_matrix_first_order(const model_params& p);

// curvature of Bhat at the zero frequency:
//   Bhat(theta) = Bhat(0) - Delta0 * (1 - qhat(theta)) + O((1 - qhat)^2)
// (for the nearest-neighbour kernel 1 - qhat = 2 nu pi^2 |theta|^2 + o(|theta|^2)),
// with
//   Delta0 = m(1-e) [[0,0,0,0],[0,1-d,0,e],[0,0,1-d,e],[0,d,d,2(1-e)]]
mat4 delta0_matrix(const model_params& p);

// source vector Gamma0 = m (1-e)^2 e4
vec4 gamma0_vector(const model_params& p);

// spatial second moment of the IBD field,
//   zeta = [(1 - Psi00_4)/N] nu U (2I + Delta0 U) Gamma0
vec4 zeta_closed_form(const model_params& p, const torus_spec& torus,
                      const migration_kernel& kernel,
                      ibd_method method = ibd_method::closed_form);

// sum_x |x|^2 Psi(x) with |x| the centered torus representative
vec4 zeta_empirical(const model_params& p, const torus_spec& torus,
                    const migration_kernel& kernel, int threads = 0);

// frequency-space route: zeta ~ -(Psihat(theta) - Psihat(0))/(1 - qhat(theta))
// at the two smallest axis frequencies, with Richardson elimination of the
// next order: (4 f1 - f2)/3
vec4 zeta_quadratic_fit(const model_params& p, const torus_spec& torus,
                        const migration_kernel& kernel, int threads = 0);

// first order of zeta in the symmetric swap fraction (requires eps = delta):
// with c = 1/(1-m), cN = 1/(N + alpha(0)),
//   zeta = cN nu (1 + 2 swap gamma(0) cN) m c^2
//          * ( (0,0,0,2) + swap (0, 3mc, 3mc, -4(2c-1)) ) + O(swap^2)
vec4 zeta_first_order(const model_params& p, const torus_spec& torus,
                      const migration_kernel& kernel);

struct second_moment_report {
    vec4 zeta_closed{};
    vec4 zeta_empirical{};
    vec4 zeta_fit{};
    double rel_diff = 0.0;     // component 4, empirical vs closed
    double rel_diff_fit = 0.0; // component 4, quadratic fit vs closed
    double expected_tau = 0.0; // zeta_4 / (2 nu)
    double tail_mass = 0.0;    // (1-mu)^(2L) truncation diagnostic
    std::int64_t L = 0;
    bool tail_ok = false; // tail_mass < 1e-12
};

second_moment_report second_moment(const model_params& p, const torus_spec& torus,
                                   const migration_kernel& kernel, int threads = 0);

// headline coalescence-time figure zeta_4/(2 nu) (active-pair migration steps)
double expected_coalescence_time(const model_params& p, const torus_spec& torus,
                                 const migration_kernel& kernel);

} // namespace ibd
