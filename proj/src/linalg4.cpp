#include "ibd/linalg4.hpp"

#include <cmath>
#include <stdexcept>

namespace ibd {

mat4 mat4::identity() {
    mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
}

mat4 mat4::zero() { return mat4{}; }

mat4 mat4::operator+(const mat4& o) const {
    mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.a[i] = a[i] + o.a[i];
    return r;
}

mat4 mat4::operator-(const mat4& o) const {
    mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.a[i] = a[i] - o.a[i];
    return r;
}

mat4 mat4::operator*(const mat4& o) const {
    mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const double v = (*this)(i, k);
            for (int j = 0; j < 4; ++j) r(i, j) += v * o(k, j);
        }
    return r;
}

mat4 mat4::scaled(double s) const {
    mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.a[i] = a[i] * s;
    return r;
}

vec4 mat_vec(const mat4& m, const vec4& v) {
    vec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[static_cast<std::size_t>(i)] += m(i, j) * v[static_cast<std::size_t>(j)];
    return r;
}

namespace {

// PA = LU with partial pivoting; lu holds both factors, perm the row order
struct lu4 {
    mat4 lu;
    std::array<int, 4> perm{};
    int sign = 1;
};

lu4 decompose(const mat4& m) {
    lu4 f;
    f.lu = m;
    for (int i = 0; i < 4; ++i) f.perm[static_cast<std::size_t>(i)] = i;
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        double best = std::abs(f.lu(col, col));
        for (int r = col + 1; r < 4; ++r) {
            const double v = std::abs(f.lu(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best < 1e-300) throw std::domain_error("linalg4: singular matrix");
        if (piv != col) {
            for (int j = 0; j < 4; ++j) std::swap(f.lu(col, j), f.lu(piv, j));
            std::swap(f.perm[static_cast<std::size_t>(col)], f.perm[static_cast<std::size_t>(piv)]);
            f.sign = -f.sign;
        }
        for (int r = col + 1; r < 4; ++r) {
            const double l = f.lu(r, col) / f.lu(col, col);
            f.lu(r, col) = l;
            for (int j = col + 1; j < 4; ++j) f.lu(r, j) -= l * f.lu(col, j);
        }
    }
    return f;
}

vec4 lu_solve(const lu4& f, const vec4& b) {
    vec4 y{};
    for (int i = 0; i < 4; ++i) {
        double s = b[static_cast<std::size_t>(f.perm[static_cast<std::size_t>(i)])];
        for (int j = 0; j < i; ++j) s -= f.lu(i, j) * y[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    vec4 x{};
    for (int i = 3; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < 4; ++j) s -= f.lu(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / f.lu(i, i);
    }
    return x;
}

} // namespace

mat4 inverse(const mat4& m) {
    const lu4 f = decompose(m);
    mat4 inv;
    for (int col = 0; col < 4; ++col) {
        vec4 e{};
        e[static_cast<std::size_t>(col)] = 1.0;
        const vec4 x = lu_solve(f, e);
        for (int i = 0; i < 4; ++i) inv(i, col) = x[static_cast<std::size_t>(i)];
    }
    return inv;
}

double determinant(const mat4& m) {
    lu4 f;
    try {
        f = decompose(m);
    } catch (const std::domain_error&) {
        return 0.0;
    }
    double det = f.sign;
    for (int i = 0; i < 4; ++i) det *= f.lu(i, i);
    return det;
}

vec4 solve(const mat4& m, const vec4& b) {
    return lu_solve(decompose(m), b);
}

double spectral_radius(const mat4& m, int iters) {
    // ||B^64||_F^(1/64) by repeated squaring with rescaling: an upper bound
    // on the spectral radius that is tight enough for a "< 1" certificate.
    // Writing q_j = B^(2^j)/c_j and q_{j+1} = (q_j/f_j)^2 gives
    // log c_6 = sum_j 2^(6-j) log f_j.
    (void)iters;
    mat4 q = m;
    double logn = 0.0;
    double pow_left = 64.0;
    for (int j = 0; j < 6; ++j) {
        double f2 = 0.0;
        for (double v : q.a) f2 += v * v;
        const double fq = std::sqrt(f2);
        if (fq == 0.0) return 0.0;
        q = q.scaled(1.0 / fq);
        logn += std::log(fq) * pow_left;
        q = q * q;
        pow_left /= 2.0;
    }
    double f2 = 0.0;
    for (double v : q.a) f2 += v * v;
    logn += std::log(std::sqrt(f2)) * pow_left;
    return std::exp(logn / 64.0);
}

} // namespace ibd
