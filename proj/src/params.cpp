#include "ibd/params.hpp"

#include <numeric>
#include <cmath>

namespace ibd {

rational::rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
}

rational rational::times_int(std::int64_t k) const {
    const __int128 p = static_cast<__int128>(num) * k;
    if (p > INT64_MAX || p < INT64_MIN)
        throw std::overflow_error("rational: overflow in times_int");
    return rational(static_cast<std::int64_t>(p), den);
}

rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            // accept decimals with a short mantissa; map to an exact fraction
            const double v = std::stod(text);
            if (v == 0.0) return rational(0, 1);
            // scan denominators up to 10^9 for an exact decimal representation
            for (std::int64_t den = 1; den <= 1000000000; den *= 10) {
                const double scaled = v * static_cast<double>(den);
                const double r = std::round(scaled);
                if (std::abs(scaled - r) < 1e-9 * den && std::abs(r) < 9e18)
                    return rational(static_cast<std::int64_t>(r), den);
            }
            throw std::invalid_argument("not an exact decimal");
        }
        const std::int64_t n = std::stoll(text.substr(0, slash));
        const std::int64_t d = std::stoll(text.substr(slash + 1));
        return rational(n, d);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational: '" + text + "'");
    }
}

bool model_params::balanced() const {
    // eps*N == delta*M exactly: cross-multiply in 128-bit
    const __int128 lhs = static_cast<__int128>(eps.num) * N * delta.den;
    const __int128 rhs = static_cast<__int128>(delta.num) * M * eps.den;
    return lhs == rhs;
}

void model_params::validate() const {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (eps.num < 0 || eps.num > eps.den)
        throw std::invalid_argument("epsilon must lie in [0,1]");
    if (delta.num < 0 || delta.num > delta.den)
        throw std::invalid_argument("delta must lie in [0,1]");
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0,1]");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0,1]");
    if (!balanced()) throw std::invalid_argument("\xce\xb5N \xe2\x89\xa0 \xce\xb4M");
}

} // namespace ibd
