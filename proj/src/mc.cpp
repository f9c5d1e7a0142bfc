#include "ibd/mc.hpp"

#include "ibd/parallel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace ibd {

pair_walker::pair_walker(const model_params& p, const torus_spec& torus,
                         const migration_kernel& kernel)
    : params_(p), torus_(torus), kernel_(kernel) {
    p.validate();
    torus.validate();
    if (!(p.eps == p.delta)) {
        throw std::invalid_argument("MC requires symmetric swap");
    }
    if (!(p.mu > 0.0)) {
        throw std::invalid_argument("mc requires mu > 0 (the generation cap diverges at mu = 0)");
    }
    swap_ = p.delta_d();

    if (kernel.kind == migration_kernel::kind_t::nearest_neighbour) {
        const double w = 1.0 / (2.0 * torus_.d);
        double acc = 0.0;
        for (int j = 0; j < torus_.d; ++j) {
            for (int sgn : {+1, -1}) {
                site z{};
                z[static_cast<std::size_t>(j)] = sgn;
                disp_.push_back(z);
                acc += w;
                disp_cdf_.push_back(acc);
            }
        }
    } else {
        double acc = 0.0;
        for (const auto& [z, w] : kernel.table) {
            disp_.push_back(z);
            acc += w;
            disp_cdf_.push_back(acc);
        }
    }
    if (!disp_cdf_.empty()) disp_cdf_.back() = 1.0;
}

std::int64_t pair_walker::default_cap() const {
    const double m = params_.m();
    return static_cast<std::int64_t>(std::ceil(std::log(1e-12) / std::log(m)));
}

bool pair_walker::step(lineage_pair_state& s, replica_outcome& out, rng_stream& rng) const {
    ++s.generation;

    const bool killed_a = rng.next_double() < params_.mu;
    const bool killed_b = rng.next_double() < params_.mu;
    if (killed_a || killed_b) {
        out = {replica_kind::mutated, s.generation};
        return false;
    }

    const bool was_active_a = s.active_a;
    const bool was_active_b = s.active_b;

    auto advance = [&](bool& active, site& pos) {
        if (active) {
            if (rng.next_double() < swap_) {
                active = false; // into the seed-bank, same colony
            } else if (rng.next_double() < kernel_.nu) {
                const double u = rng.next_double();
                std::size_t lo = 0;
                while (lo + 1 < disp_cdf_.size() && disp_cdf_[lo] <= u) ++lo;
                site next = pos;
                for (int j = 0; j < torus_.d; ++j) {
                    next[static_cast<std::size_t>(j)] += disp_[lo][static_cast<std::size_t>(j)];
                }
                pos = torus_.wrap(next);
            }
        } else if (rng.next_double() < swap_) {
            active = true; // wakes in the same colony
        }
    };
    advance(s.active_a, s.pos_a);
    advance(s.active_b, s.pos_b);

    if (was_active_a && was_active_b && s.active_a && s.active_b && s.pos_a == s.pos_b) {
        if (rng.next_double() < 1.0 / static_cast<double>(params_.N)) {
            out = {replica_kind::coalesced, s.generation};
            return false;
        }
    }
    return true;
}

replica_outcome pair_walker::run(const site& x, int config, std::int64_t cap,
                                 rng_stream& rng) const {
    lineage_pair_state s{};
    s.pos_a = site{};
    s.pos_b = torus_.wrap(x);
    s.active_a = (config & 2) != 0;
    s.active_b = (config & 1) != 0;
    replica_outcome out{};
    for (std::int64_t g = 0; g < cap; ++g) {
        if (!step(s, out, rng)) return out;
    }
    return {replica_kind::truncated, cap};
}

mc_estimate estimate_ibd(const model_params& p, const torus_spec& torus,
                         const migration_kernel& kernel, const site& x, std::int64_t n_reps,
                         std::uint64_t seed, int threads) {
    if (n_reps < 1) throw std::invalid_argument("mc: n_reps must be at least 1");
    const pair_walker walker(p, torus, kernel);
    const std::int64_t cap = walker.default_cap();

    std::atomic<std::int64_t> coalesced[4] = {};
    std::atomic<std::int64_t> truncated[4] = {};

    const std::int64_t total = 4 * n_reps;
    parallel_for(total, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
            const int config = static_cast<int>(r / n_reps);
            rng_stream rng(seed, static_cast<std::uint64_t>(r));
            const replica_outcome out = walker.run(x, config, cap, rng);
            if (out.kind == replica_kind::coalesced) {
                coalesced[config].fetch_add(1, std::memory_order_relaxed);
            } else if (out.kind == replica_kind::truncated) {
                truncated[config].fetch_add(1, std::memory_order_relaxed);
            }
        }
    });

    mc_estimate est{};
    est.n_reps = n_reps;
    est.cap = cap;
    est.tail_bound = std::pow(p.m(), static_cast<double>(cap));
    const double n = static_cast<double>(n_reps);
    for (int c = 0; c < 4; ++c) {
        const auto s = static_cast<std::size_t>(c);
        const double phat = static_cast<double>(coalesced[c].load()) / n;
        est.psi[s] = phat;
        est.se[s] = std::sqrt(phat * (1.0 - phat) / n);
        est.truncated_fraction[s] = static_cast<double>(truncated[c].load()) / n;
    }
    return est;
}

mc_moment_report estimate_time_and_moment(const model_params& p, const torus_spec& torus,
                                          const migration_kernel& kernel, std::int64_t n_reps,
                                          std::uint64_t seed, int threads) {
    if (n_reps < 1) throw std::invalid_argument("mc: n_reps must be at least 1");
    const pair_walker walker(p, torus, kernel);
    const std::int64_t cap = walker.default_cap();
    const std::int64_t n_sites = torus.n_sites();

    std::vector<std::atomic<std::int64_t>> coalesced(static_cast<std::size_t>(n_sites));
    std::atomic<std::int64_t> origin_tau_sum{0};
    std::atomic<std::int64_t> origin_event_sum{0};

    const std::int64_t total = n_sites * n_reps;
    parallel_for(total, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
            const std::int64_t site_idx = r / n_reps;
            rng_stream rng(seed, static_cast<std::uint64_t>(r));
            const replica_outcome out =
                walker.run(torus.site_of(site_idx), 3, cap, rng);
            if (out.kind == replica_kind::coalesced) {
                coalesced[static_cast<std::size_t>(site_idx)].fetch_add(
                    1, std::memory_order_relaxed);
                if (site_idx == 0)
                    origin_tau_sum.fetch_add(out.generation, std::memory_order_relaxed);
            }
            if (site_idx == 0)
                origin_event_sum.fetch_add(out.generation, std::memory_order_relaxed);
        }
    });

    mc_moment_report rep{};
    rep.n_reps = n_reps;
    rep.cap = cap;
    rep.tail_bound = std::pow(p.m(), static_cast<double>(cap));
    const double n = static_cast<double>(n_reps);
    double var_acc = 0.0;
    for (std::int64_t idx = 0; idx < n_sites; ++idx) {
        const double w = torus.norm2_centered(torus.site_of(idx));
        const double phat = static_cast<double>(coalesced[static_cast<std::size_t>(idx)].load()) / n;
        rep.second_moment += w * phat;
        var_acc += w * w * phat * (1.0 - phat) / n;
    }
    rep.second_moment_se = std::sqrt(var_acc);
    const double n_coal0 = static_cast<double>(coalesced[0].load());
    rep.coalesced_fraction = n_coal0 / n;
    rep.mean_tau_conditional =
        n_coal0 > 0.0 ? static_cast<double>(origin_tau_sum.load()) / n_coal0 : 0.0;
    rep.mean_tau_all_events = static_cast<double>(origin_event_sum.load()) / n;
    return rep;
}

} // namespace ibd
