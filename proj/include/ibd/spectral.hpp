#pragma once

#include "ibd/kernel.hpp"
#include "ibd/linalg4.hpp"
#include "ibd/params.hpp"
#include "ibd/torus.hpp"

#include <cstdint>
#include <vector>

namespace ibd {

// How the per-frequency linear system is solved.
//   closed_form: generated determinant/adjugate polynomials,
//   matrix_inverse: 4x4 LU solve per frequency,
//   fixed_point: real-space iteration on the full pair field (oracle).
enum class ibd_method { closed_form, matrix_inverse, fixed_point };

// IBD probabilities on the torus.  psi[torus.index_of(x)] is the 4-vector
// over initial activity configurations, ordered
//   0: both dormant, 1: (x dormant, y active), 2: (x active, y dormant),
//   3: both active,
// for two individuals in colonies 0 and x.
struct ibd_field {
    torus_spec torus;
    std::vector<vec4> psi;
    std::vector<vec4> psi_hat; // Fourier transform, indexed like psi
    vec4 psi_same_colony{};    // field value at x = 0
    double max_imag = 0.0;     // largest |Im| discarded by the inverse DFT
};

// C-part of the one-step pair activity matrix (no migration factors)
mat4 build_c_matrix(const model_params& p);

// full B-hat(theta) = C + D-hat with migration symbols P = phat(theta),
// Q = phat(eta); on the eta = -theta diagonal of a symmetric kernel, Q = P
mat4 build_bhat(const model_params& p, double P, double Q);

// s(theta) = K * P * Q * (I - B)^{-1} e4, K = m (1-eps)^2 / N
vec4 svec_closed_form(const model_params& p, double P, double Q);
vec4 svec_matrix_inverse(const model_params& p, double P, double Q);

// same-colony IBD 4-vector (no inverse DFT needed):
//   psi00_i = sbar_i / (1 + sbar_4), sbar = mean of s over the dual grid
vec4 psi00(const model_params& p, const torus_spec& torus, const migration_kernel& kernel,
           ibd_method method = ibd_method::closed_form);

ibd_field compute_ibd_field(const model_params& p, const torus_spec& torus,
                            const migration_kernel& kernel,
                            ibd_method method = ibd_method::closed_form, int threads = 0);

// ---- real-space fixed point (independent oracle) -----------------------

// Full pair field psi[c](x, y) without assuming translation invariance.
struct pair_field {
    torus_spec torus;
    std::vector<double> c[4]; // each n*n, flat index x * n + y
    std::int64_t iterations = 0;
    double final_delta = 0.0;
};

pair_field ibd_fixed_point(const model_params& p, const torus_spec& torus,
                           const migration_kernel& kernel, double tol = 1e-13,
                           std::int64_t max_iter = 0);

// Reduce pair(0, x) to a translation-invariant field; max_translation_dev
// reports sup |pair(x, y) - pair(0, y - x)| as evidence the invariance holds.
struct reduced_field {
    std::vector<vec4> psi;
    double max_translation_dev = 0.0;
};

reduced_field reduce_pair_field(const pair_field& f);

} // namespace ibd
