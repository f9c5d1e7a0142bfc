#include "ibd/torus.hpp"

#include <stdexcept>

namespace ibd {

void torus_spec::validate() const {
    if (d < 1 || d > max_dim) throw std::invalid_argument("dimension must be 1, 2 or 3");
    if (L < 2) throw std::invalid_argument("L must be >= 2");
}

std::int64_t torus_spec::n_sites() const {
    std::int64_t n = 1;
    for (int i = 0; i < d; ++i) n *= L;
    return n;
}

std::int64_t torus_spec::index_of(const site& x) const {
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * L + x[i];
    return idx;
}

site torus_spec::site_of(std::int64_t idx) const {
    site x{0, 0, 0};
    for (int i = d - 1; i >= 0; --i) {
        x[i] = idx % L;
        idx /= L;
    }
    return x;
}

site torus_spec::wrap(const site& x) const {
    site r{0, 0, 0};
    for (int i = 0; i < d; ++i) {
        std::int64_t v = x[i] % L;
        if (v < 0) v += L;
        r[i] = v;
    }
    return r;
}

site torus_spec::diff(const site& x, const site& y) const {
    site r{0, 0, 0};
    for (int i = 0; i < d; ++i) r[i] = x[i] - y[i];
    return wrap(r);
}

site torus_spec::centered(const site& x) const {
    site w = wrap(x);
    for (int i = 0; i < d; ++i)
        if (2 * w[i] > L) w[i] -= L;
    return w;
}

double torus_spec::norm2_centered(const site& x) const {
    const site c = centered(x);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += static_cast<double>(c[i]) * static_cast<double>(c[i]);
    return s;
}

std::vector<site> torus_spec::all_sites() const {
    const std::int64_t n = n_sites();
    std::vector<site> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) out.push_back(site_of(i));
    return out;
}

} // namespace ibd
