#include "ibd/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ibd {

namespace {

constexpr double pi = std::numbers::pi;

void check_z(double z) {
    if (!(z > -1.0 + 1e-12 && z < 1.0 - 1e-12))
        throw std::invalid_argument("green: z must satisfy |z| <= 1 - 1e-12");
}

} // namespace

double green_torus(const torus_spec& t, const site& x, double z) {
    t.validate();
    check_z(z);
    const std::int64_t n = t.n_sites();
    double acc = 0.0;
    for (std::int64_t ki = 0; ki < n; ++ki) {
        const site k = t.site_of(ki);
        double qh = 0.0, phase = 0.0;
        for (int i = 0; i < t.d; ++i) {
            qh += std::cos(2.0 * pi * static_cast<double>(k[i]) / static_cast<double>(t.L));
            phase += static_cast<double>(k[i]) * static_cast<double>(x[i]);
        }
        qh /= t.d;
        acc += std::cos(2.0 * pi * phase / static_cast<double>(t.L)) / (1.0 - z * qh);
    }
    return acc / static_cast<double>(n);
}

double green_torus_derivative(const torus_spec& t, const site& x, double z) {
    t.validate();
    check_z(z);
    const std::int64_t n = t.n_sites();
    double acc = 0.0;
    for (std::int64_t ki = 0; ki < n; ++ki) {
        const site k = t.site_of(ki);
        double qh = 0.0, phase = 0.0;
        for (int i = 0; i < t.d; ++i) {
            qh += std::cos(2.0 * pi * static_cast<double>(k[i]) / static_cast<double>(t.L));
            phase += static_cast<double>(k[i]) * static_cast<double>(x[i]);
        }
        qh /= t.d;
        const double den = 1.0 - z * qh;
        acc += std::cos(2.0 * pi * phase / static_cast<double>(t.L)) * qh / (den * den);
    }
    return acc / static_cast<double>(n);
}

double green_1d_infinite(std::int64_t x, double z) {
    check_z(z);
    const std::int64_t ax = x < 0 ? -x : x;
    if (z == 0.0) return ax == 0 ? 1.0 : 0.0;
    const double root = std::sqrt(1.0 - z * z);
    const double y = (1.0 - root) / z;
    return std::pow(y, static_cast<double>(ax)) / root;
}

double green_1d_infinite_derivative(std::int64_t x, double z) {
    check_z(z);
    const std::int64_t ax = x < 0 ? -x : x;
    if (z == 0.0) {
        // from the series G_x(z) = sum_t z^t P_t(0, x): only |x| = 1 has a
        // linear term (P_1(0, +-1) = 1/2)
        return ax == 1 ? 0.5 : 0.0;
    }
    // logarithmic derivative: with y = (1 - sqrt(1-z^2))/z,
    //   (log G_x)' = z/(1-z^2) + |x| (log y)',
    //   (log y)' = (z/sqrt(1-z^2))/(1-sqrt(1-z^2)) - 1/z
    const double g = green_1d_infinite(x, z);
    const double root = std::sqrt(1.0 - z * z);
    const double dlogy = (z / root) / (1.0 - root) - 1.0 / z;
    return g * (z / (1.0 - z * z) + static_cast<double>(ax) * dlogy);
}

double green_1d_torus(std::int64_t L, std::int64_t x, double z) {
    if (L < 2) throw std::invalid_argument("green: torus size must be at least 2");
    check_z(z);
    x = ((x % L) + L) % L;
    if (z == 0.0) return x == 0 ? 1.0 : 0.0;
    const double root = std::sqrt(1.0 - z * z);
    const double y = (1.0 - root) / z;
    auto ipow = [](double b, std::int64_t e) {
        double r = 1.0;
        for (std::int64_t i = 0; i < e; ++i) r *= b;
        return r;
    };
    return (ipow(y, x) + ipow(y, L - x)) / ((1.0 - ipow(y, L)) * root);
}

double green_1d_series(std::int64_t x, double z, int l_max) {
    check_z(z);
    const std::int64_t ax = x < 0 ? -x : x;
    if (ax > l_max) return 0.0;
    // probability row p_l(j), j in [-l_max, l_max], updated in place
    const int width = 2 * l_max + 1;
    std::vector<double> p(static_cast<std::size_t>(width), 0.0);
    std::vector<double> next(static_cast<std::size_t>(width), 0.0);
    p[static_cast<std::size_t>(l_max)] = 1.0;
    double acc = (ax == 0) ? 1.0 : 0.0;
    double zl = 1.0;
    for (int l = 1; l <= l_max; ++l) {
        zl *= z;
        std::fill(next.begin(), next.end(), 0.0);
        for (int j = 1; j + 1 < width; ++j) {
            next[static_cast<std::size_t>(j)] =
                0.5 * (p[static_cast<std::size_t>(j - 1)] + p[static_cast<std::size_t>(j + 1)]);
        }
        p.swap(next);
        acc += zl * p[static_cast<std::size_t>(l_max + ax)];
    }
    return acc;
}

convolution_check convolution_identity_check(const torus_spec& t, const site& x, double z,
                                             double zp) {
    t.validate();
    if (z == zp) throw std::invalid_argument("green: convolution identity requires z != z'");
    check_z(z);
    check_z(zp);
    convolution_check out{};
    for (const site& y : t.all_sites()) {
        out.lhs += green_torus(t, t.diff(x, y), z) * green_torus(t, y, zp);
    }
    out.rhs = (z * green_torus(t, x, z) - zp * green_torus(t, x, zp)) / (z - zp);
    return out;
}

double green_2d_infinite(const site& x, double z) {
    check_z(z);
    const std::int64_t x1 = std::abs(x[0]);
    const std::int64_t x2 = std::abs(x[1]);
    if (z == 0.0) return (x1 == 0 && x2 == 0) ? 1.0 : 0.0;
    // G_x(z) = (1/2pi) Int_0^{2pi} cos(x1 th) t(th)^{x2} / S(th) dth, where the
    // theta_2 sum collapses by residues: with a = 1 - (z/2) cos th, b = z/2,
    // S = sqrt(a^2 - b^2) and t = (a - S)/b.  Periodic trapezoid converges
    // exponentially in the node count.
    const double gap = 1.0 - std::abs(z);
    std::int64_t nodes = 4096 + static_cast<std::int64_t>(240.0 / std::sqrt(gap)) +
                         16 * (x1 + x2);
    double acc = 0.0;
    for (std::int64_t j = 0; j < nodes; ++j) {
        const double th = 2.0 * pi * static_cast<double>(j) / static_cast<double>(nodes);
        const double s2 = std::sin(th / 2.0) * std::sin(th / 2.0);
        const double amb = (1.0 - z) + z * s2;
        const double apb = 1.0 + z * s2;
        const double S = std::sqrt(amb * apb);
        const double t = (1.0 - (z / 2.0) * std::cos(th) - S) / (z / 2.0);
        acc += std::cos(static_cast<double>(x1) * th) * std::pow(t, static_cast<double>(x2)) / S;
    }
    return acc / static_cast<double>(nodes);
}

double green_3d_infinite(const site& x, double z, double tol) {
    check_z(z);
    double prev = 0.0;
    bool have_prev = false;
    for (std::int64_t L = 16; L <= 256; L *= 2) {
        torus_spec t{3, L};
        const double pole = 1.0 / (static_cast<double>(t.n_sites()) * (1.0 - z));
        const double v = green_torus(t, x, z) - pole;
        if (have_prev && std::abs(v - prev) < tol) return v;
        prev = v;
        have_prev = true;
    }
    return prev;
}

double green(const green_query& g, const site& x, double z) {
    if (g.L != infinite_lattice) {
        torus_spec t{g.d, g.L};
        return green_torus(t, x, z);
    }
    switch (g.d) {
        case 1: return green_1d_infinite(x[0], z);
        case 2: return green_2d_infinite(x, z);
        case 3: return green_3d_infinite(x, z);
        default: throw std::invalid_argument("green: dimension must be 1, 2 or 3");
    }
}

double green_derivative(const green_query& g, const site& x, double z) {
    if (g.L != infinite_lattice) {
        torus_spec t{g.d, g.L};
        return green_torus_derivative(t, x, z);
    }
    if (g.d == 1) return green_1d_infinite_derivative(x[0], z);
    // d = 2, 3: central difference on the infinite evaluators; step balances
    // truncation against the evaluators' own accuracy
    const double h = 1e-6 * std::max(1e-3, 1.0 - std::abs(z));
    const double zp = z + h, zm = z - h;
    const double f = (green(g, x, zp) - green(g, x, zm)) / (2.0 * h);
    return f;
}

double c_coeff_torus(const torus_spec& t, const site& x) {
    t.validate();
    const std::int64_t n = t.n_sites();
    double acc = 0.0;
    for (std::int64_t ki = 1; ki < n; ++ki) {
        const site k = t.site_of(ki);
        double qh = 0.0, phase = 0.0;
        for (int i = 0; i < t.d; ++i) {
            qh += std::cos(2.0 * pi * static_cast<double>(k[i]) / static_cast<double>(t.L));
            phase += static_cast<double>(k[i]) * static_cast<double>(x[i]);
        }
        qh /= t.d;
        acc += std::cos(2.0 * pi * phase / static_cast<double>(t.L)) / (1.0 - qh);
    }
    return acc / static_cast<double>(n);
}

double cbar_coeff_torus(const torus_spec& t, const site& x) {
    t.validate();
    const std::int64_t n = t.n_sites();
    double acc = 0.0;
    for (std::int64_t ki = 1; ki < n; ++ki) {
        const site k = t.site_of(ki);
        double qh = 0.0, phase = 0.0;
        for (int i = 0; i < t.d; ++i) {
            qh += std::cos(2.0 * pi * static_cast<double>(k[i]) / static_cast<double>(t.L));
            phase += static_cast<double>(k[i]) * static_cast<double>(x[i]);
        }
        qh /= t.d;
        const double den = 1.0 - qh;
        acc += std::cos(2.0 * pi * phase / static_cast<double>(t.L)) * qh / (den * den);
    }
    return acc / static_cast<double>(n);
}

double c_coeff_1d(std::int64_t L, std::int64_t x) {
    const double Ld = static_cast<double>(L);
    std::int64_t xw = ((x % L) + L) % L;
    const double xd = static_cast<double>(xw);
    return (Ld * Ld - 1.0) / (6.0 * Ld) - xd * (Ld - xd) / Ld;
}

double cbar_coeff_1d(std::int64_t L, std::int64_t x) {
    // Cbar_L(x) = Cbar_L(0) + x(L-x) [4 - x(L-x)] / (6L),
    // Cbar_L(0) = (L^2-1)(L^2-19)/(180 L)
    const double Ld = static_cast<double>(L);
    std::int64_t xw = ((x % L) + L) % L;
    const double u = static_cast<double>(xw) * (Ld - static_cast<double>(xw));
    const double at0 = (Ld * Ld - 1.0) * (Ld * Ld - 19.0) / (180.0 * Ld);
    return at0 + u * (4.0 - u) / (6.0 * Ld);
}

} // namespace ibd
