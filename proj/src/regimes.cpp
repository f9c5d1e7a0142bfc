#include "ibd/regimes.hpp"

#include "ibd/green.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ibd {

namespace {

constexpr double pi = 3.1415926535897932384626433832795029;

void require_regime_inputs(double rho, double nu, double N) {
    if (!(rho > 0.0)) throw std::invalid_argument("regime prediction: rho must be positive");
    if (!(nu > 0.0) || nu > 1.0)
        throw std::invalid_argument("regime prediction: nu must lie in (0, 1]");
    if (!(N > 0.0)) throw std::invalid_argument("regime prediction: N must be positive");
}

bool is_origin(const site& x, int d) {
    for (int j = 0; j < d; ++j) {
        if (x[static_cast<std::size_t>(j)] != 0) return false;
    }
    return true;
}

double norm_of(const site& x, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        const double c = static_cast<double>(x[static_cast<std::size_t>(j)]);
        s += c * c;
    }
    return std::sqrt(s);
}

// potential-kernel constants, cached: the d=2 extraction integrates a long
// trapezoid and the d=3 one sums two torus grids
double c2_constant(const site& x) {
    static std::mutex mu;
    static std::map<std::pair<std::int64_t, std::int64_t>, double> cache;
    const std::pair<std::int64_t, std::int64_t> key{x[0], x[1]};
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = c2_potential(x);
    cache.emplace(key, v);
    return v;
}

double c3_constant(const site& x) {
    static std::mutex mu;
    static std::map<std::array<std::int64_t, 3>, double> cache;
    const std::array<std::int64_t, 3> key{x[0], x[1], x[2]};
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = c3_potential(x);
    cache.emplace(key, v);
    return v;
}

double cbar3_constant() { return 3.0 * std::sqrt(3.0) / (pi * std::sqrt(2.0)); }

// ||x||^2 + 1/2: coefficient of (1-z) log(1/(1-z)) in the d=2 expansion
double cbar_plus(const site& x) {
    const double n = norm_of(x, 2);
    return n * n + 0.5;
}

} // namespace

// ---- finite-rho predictions ---------------------------------------------

double psi4_slow_mutation_infinite(int d, const site& x, double rho, double nu, double N) {
    require_regime_inputs(rho, nu, N);
    const double d0 = is_origin(x, d) ? 1.0 : 0.0;
    if (d == 1) {
        const double w = std::sqrt(2.0 * rho);
        const double ax = std::abs(static_cast<double>(x[0]));
        return (std::exp(-w * ax) - 1.5 * d0 * nu * w) / (1.0 + (2.0 * N - 1.5) * nu * w);
    }
    if (d == 2) {
        const double lam = std::log(1.0 / rho);
        const double lam8 = std::log(8.0 / rho);
        const double num = lam8 - c2_constant(x) - 1.5 * pi * d0 * nu +
                           (cbar_plus(x) - (1.0 - nu)) * rho * lam;
        const double den = lam8 + pi * (2.0 * N - 1.5) * nu +
                           (cbar_plus(site{}) - (1.0 - nu)) * rho * lam;
        return num / den;
    }
    if (d == 3) {
        const double c0 = c3_constant(site{});
        return (c3_constant(x) - 1.5 * d0 * nu) / (c0 + (2.0 * N - 1.5) * nu);
    }
    throw std::invalid_argument("regime prediction: d must be 1, 2 or 3");
}

double psi4_slow_mutation_torus(const torus_spec& t, const site& x, double rho, double nu,
                                double N) {
    require_regime_inputs(rho, nu, N);
    t.validate();
    const double ld = static_cast<double>(t.n_sites());
    const site xr = t.wrap(x);
    const double d0 = is_origin(xr, t.d) ? 1.0 : 0.0;
    const double clx = c_coeff_torus(t, xr);
    const double cl0 = c_coeff_torus(t, site{});
    const double num = 1.0 + (clx - 1.5 * d0 * nu - (1.0 - nu) / ld) * ld * rho;
    const double den = 1.0 + (cl0 + (2.0 * N - 1.5) * nu - (1.0 - nu) / ld) * ld * rho;
    return num / den;
}

phi_pair phi_slow_mutation_infinite(int d, const site& x, double rho, double nu, double N) {
    require_regime_inputs(rho, nu, N);
    const double d0 = is_origin(x, d) ? 1.0 : 0.0;
    phi_pair out{};
    if (d == 1) {
        const double w = std::sqrt(2.0 * rho);
        const double ax = std::abs(static_cast<double>(x[0]));
        const double den = 1.0 + (2.0 * N - 1.5) * nu * w;
        out.phi2 = (std::exp(-w * ax) - std::exp(-std::sqrt(4.0 * rho) * ax) / std::sqrt(2.0)) /
                   (nu * rho * den);
        out.phi4 = -(std::exp(-w * ax) / (nu * w)) *
                   (ax + (2.0 * N - 1.5) * nu + (2.0 * N - 1.5) * nu * ax * w) / (den * den);
        return out;
    }
    if (d == 2) {
        const double lam = std::log(1.0 / rho);
        const double lam8 = std::log(8.0 / rho);
        const double dfull = lam8 + pi * (2.0 * N - 1.5) * nu +
                             (cbar_plus(site{}) - (1.0 - nu)) * rho * lam;
        out.phi2 = (std::log(2.0) + ((1.0 - 2.5 * nu) - cbar_plus(x)) * rho * lam) /
                   (nu * rho * dfull);
        // exact first-order structure: an x-independent squared denominator
        // with the K1 spatial profile
        const double dd = lam8 + pi * (2.0 * N - 1.5) * nu;
        const double nx = norm_of(x, 2);
        const double srho = std::sqrt(rho);
        const double xk1 =
            (nx == 0.0) ? 1.0 / (2.0 * srho) : -nx * bessel_k0_derivative(2.0 * srho * nx);
        out.phi4 = (lam8 - c2_constant(x)) / (nu * rho * dd * dd) -
                   2.0 * xk1 / (nu * srho * dd);
        return out;
    }
    if (d == 3) {
        const double c0 = c3_constant(site{});
        const double cx = c3_constant(x);
        const double cb0 = cbar3_constant();
        const double srho = std::sqrt(rho);
        const double base = c0 + (2.0 * N - 1.5) * nu;
        out.phi2 = ((std::sqrt(2.0) - 1.0) * cb0 +
                    ((1.0 - 2.5 * nu) * cx - 0.125 * nu * nu * d0) * srho) /
                   (nu * srho * (base - cb0 * srho));
        out.phi4 = cb0 * (cx - c0 - (2.0 * N - 1.5) * nu) / (2.0 * nu * srho * base * base);
        return out;
    }
    throw std::invalid_argument("regime prediction: d must be 1, 2 or 3");
}

double phi4_slow_mutation_2d_printed(const site& x, double rho, double nu, double N) {
    require_regime_inputs(rho, nu, N);
    const double lam = std::log(1.0 / rho);
    const double lam8 = std::log(8.0 / rho);
    const double cx = c2_constant(x);
    const double den = lam8 - cx + pi * (2.0 * N - 1.5) * nu;
    const double num = (-cx - pi * (2.0 * N - 1.5) * nu) / rho +
                       (cbar_plus(site{}) - cbar_plus(x)) * lam * lam;
    return num / (nu * den * den);
}

phi_pair phi_slow_mutation_torus(const torus_spec& t, const site& x, double rho, double nu,
                                 double N) {
    require_regime_inputs(rho, nu, N);
    t.validate();
    const double ld = static_cast<double>(t.n_sites());
    const site xr = t.wrap(x);
    const double d0 = is_origin(xr, t.d) ? 1.0 : 0.0;
    const double clx = c_coeff_torus(t, xr);
    const double cl0 = c_coeff_torus(t, site{});
    const double cbx = cbar_coeff_torus(t, xr);
    const double cb0 = cbar_coeff_torus(t, site{});
    const double den1 = 1.0 + (cl0 - (1.0 - nu) / ld + (2.0 * N - 1.5) * nu) * ld * rho;

    phi_pair out{};
    out.phi2 = (1.0 - 2.5 * nu * rho + (2.0 * clx + 2.0 * cbx) * ld * rho * rho) /
               (2.0 * nu * rho * (den1 - (cl0 + cb0) * ld * rho * rho));
    const double nshift = (2.0 * N - 1.5 * (1.0 - d0)) * nu;
    const double lead = clx - cl0 - nshift;
    const double corr = -2.0 * (cbx - cb0) + (clx - cl0 - (2.0 * N - 1.5 * (1.0 - d0))) * nu;
    out.phi4 = (ld / nu) * (lead + corr * rho) / (den1 * den1);
    return out;
}

// ---- limit laws ----------------------------------------------------------

double law_psi4_d1(double y, double r) { return std::exp(-std::abs(y)) / (1.0 + 2.0 * r); }

double law_psi4_d2_window(double chi, double r) { return (1.0 - 2.0 * chi) / (1.0 + 2.0 * pi * r); }

double law_psi4_d2_window_refined(double y_norm, double chi, double r, double nu) {
    const double pref = 1.0 + 2.0 * pi * r;
    const double oc = 1.0 - 2.0 * chi;
    return oc *
           (std::log(1.0 / (y_norm * y_norm)) - 2.0 * euler_gamma -
            oc * (std::log(8.0) - 1.5 * pi * nu) / pref) /
           pref;
}

double law_psi4_d2_k0(double y_norm, double r) {
    return 2.0 * bessel_k0(2.0 * y_norm) / (1.0 + 2.0 * pi * r);
}

double law_psi4_d3(const site& x, double r) {
    return c3_constant(x) / (c3_constant(site{}) + 2.0 * r);
}

torus_limit_profile law_psi4_torus(double y, double r, double s) {
    torus_limit_profile out{};
    const double c = std::sqrt(0.5 * s);
    const double ccoth = (c < 1e-8) ? 1.0 + c * c / 3.0 : c / std::tanh(c);
    const double bracket = 1.0 + (1.0 / 6.0 + 2.0 * r) * s;
    out.center_bracket = (1.0 + s / 6.0) / bracket;
    out.center_coth = ccoth / (2.0 * r * s + ccoth);
    out.slope_bracket = -y * s / bracket;
    out.slope_coth = -y * s / (2.0 * r * s + ccoth);
    return out;
}

double law_phi2_d1(double y, double r) {
    const double ay = std::abs(y);
    return (std::exp(-ay) - std::exp(-std::sqrt(2.0) * ay) / std::sqrt(2.0)) / (1.0 + 2.0 * r);
}

double law_phi4_d1(double y, double r) {
    const double ay = std::abs(y);
    const double pref = 1.0 + 2.0 * r;
    return -std::exp(-ay) * (pref * ay + 2.0 * r) / (pref * pref);
}

double law_phi2_d2_window(double r) { return std::log(2.0) / (1.0 + 2.0 * pi * r); }

double law_phi2_d2_k0(double y_norm, double r) {
    return 2.0 * (bessel_k0(2.0 * y_norm) - bessel_k0(2.0 * std::sqrt(2.0) * y_norm)) /
           (1.0 + 2.0 * pi * r);
}

double law_phi2_d3(double r) {
    return (std::sqrt(2.0) - 1.0) * cbar3_constant() / (c3_constant(site{}) + 2.0 * r);
}

double law_phi4_d2_window(double chi, double r) {
    const double pref = 1.0 + 2.0 * pi * r;
    return -(2.0 * chi + 2.0 * pi * r) / (pref * pref);
}

double law_phi4_d2_k0(double y_norm, double r) {
    return 2.0 * y_norm * bessel_k0_derivative(2.0 * y_norm) / (1.0 + 2.0 * pi * r);
}

double law_phi4_d3(const site& x, double r) {
    const double c0 = c3_constant(site{});
    const double base = c0 + 2.0 * r;
    return 2.0 * cbar3_constant() * (c3_constant(x) - c0 - 2.0 * r) / (base * base);
}

double law_phi2_torus(double r, double s) { return 1.0 / (1.0 + (1.0 / 6.0 + 2.0 * r) * s); }

double law_phi4_torus_derived(double r, double s) {
    const double bracket = 1.0 + (1.0 / 6.0 + 2.0 * r) * s;
    return -2.0 * r * s / (bracket * bracket);
}

double law_phi4_torus_printed(double r, double s) {
    return r * std::sqrt(s) / (1.0 / 6.0 + 2.0 * r);
}

// ---- dispatchers ----------------------------------------------------------

double predict_psi4_no_seedbank(const regime_query& q) {
    if (q.on_torus) {
        torus_spec t{q.d, q.L};
        return psi4_slow_mutation_torus(t, q.x, q.rho, q.nu, q.N);
    }
    return psi4_slow_mutation_infinite(q.d, q.x, q.rho, q.nu, q.N);
}

phi_pair predict_phi_slow_seedbank(const regime_query& q) {
    if (q.on_torus) {
        torus_spec t{q.d, q.L};
        return phi_slow_mutation_torus(t, q.x, q.rho, q.nu, q.N);
    }
    return phi_slow_mutation_infinite(q.d, q.x, q.rho, q.nu, q.N);
}

double predict_finite_torus_panmictic(double r, double s) {
    if (!(s >= 0.0) || !(r >= 0.0))
        throw std::invalid_argument("regime prediction: r and s must be nonnegative");
    return (1.0 + s / 6.0) / (1.0 + (1.0 / 6.0 + 2.0 * r) * s);
}

double r_effective(int d, bool on_torus, double N, double nu, double rho, double L) {
    if (on_torus) {
        if (d != 1) throw std::invalid_argument("regime prediction: torus path is d = 1 only");
        return N * nu / L;
    }
    switch (d) {
    case 1: return N * nu * std::sqrt(2.0 * rho);
    case 2: return N * nu / std::log(1.0 / rho);
    case 3: return N * nu;
    default: throw std::invalid_argument("regime prediction: d must be 1, 2 or 3");
    }
}

double n_for_r(int d, bool on_torus, double r, double nu, double rho, double L) {
    if (on_torus) {
        if (d != 1) throw std::invalid_argument("regime prediction: torus path is d = 1 only");
        return r * L / nu;
    }
    switch (d) {
    case 1: return r / (nu * std::sqrt(2.0 * rho));
    case 2: return r * std::log(1.0 / rho) / nu;
    case 3: return r / nu;
    default: throw std::invalid_argument("regime prediction: d must be 1, 2 or 3");
    }
}

} // namespace ibd
