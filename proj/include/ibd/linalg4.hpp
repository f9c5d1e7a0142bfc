#pragma once

#include <array>

namespace ibd {

// Dense 4x4 real matrix, row-major.  Small fixed size: everything by value.
struct mat4 {
    std::array<double, 16> a{};

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(4 * i + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(4 * i + j)]; }

    static mat4 identity();
    static mat4 zero();

    mat4 operator+(const mat4& o) const;
    mat4 operator-(const mat4& o) const;
    mat4 operator*(const mat4& o) const;
    mat4 scaled(double s) const;
};

using vec4 = std::array<double, 4>;

vec4 mat_vec(const mat4& m, const vec4& v);

// LU decomposition with partial pivoting; throws on (numerically) singular input
mat4 inverse(const mat4& m);
double determinant(const mat4& m);
vec4 solve(const mat4& m, const vec4& b);

// largest |eigenvalue| via power iteration on m^T m (spectral norm upper
// bound is not needed; plain power iteration on m works for our B-hat whose
// dominant eigenvalue is real positive)
double spectral_radius(const mat4& m, int iters = 200);

} // namespace ibd
