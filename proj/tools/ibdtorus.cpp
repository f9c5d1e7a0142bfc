// ibdtorus: identity-by-descent probabilities for a stepping-stone model
// with a dormant layer (seed bank) on a d-dimensional torus.
//
// Subcommands:
//   ibd     IBD probability field (closed-form / LU / fixed-point methods)
//   green   Green function and z->1 expansion coefficient tables
//   asym    small-swap expansion and scaling-limit comparison tables
//   zeta    spatial second moment of the IBD field
//   mc      backward-lineage Monte Carlo estimates
//   single  single-colony two-layer transition row
//   verify  cross-route self-consistency suite
//
// Exit codes: 0 success, 1 verification failure, 2 argument/validation
// error, 3 I/O error.

#include "CLI11.hpp"

#include "ibd/asymptotics.hpp"
#include "ibd/emit.hpp"
#include "ibd/green.hpp"
#include "ibd/kernel.hpp"
#include "ibd/mc.hpp"
#include "ibd/params.hpp"
#include "ibd/regimes.hpp"
#include "ibd/second_moment.hpp"
#include "ibd/single_colony.hpp"
#include "ibd/spectral.hpp"
#include "ibd/torus.hpp"
#include "ibd/verify.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ibd;

struct model_opts {
    int d = 1;
    std::int64_t L = 8;
    std::int64_t N = 10;
    std::int64_t M = 10;
    std::string epsilon = "0";
    std::string delta = "0";
    double mu = 0.01;
    double nu = 0.5;
};

void add_model_flags(CLI::App* cmd, model_opts& o) {
    cmd->add_option("-d,--dim", o.d, "torus dimension (1..3)")->capture_default_str();
    cmd->add_option("-L,--length", o.L, "torus side length")->capture_default_str();
    cmd->add_option("-N,--active", o.N, "active individuals per colony")->capture_default_str();
    cmd->add_option("-M,--dormant", o.M, "dormant individuals per colony")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon, "active-layer exchange fraction (rational, e.g. 0.1 or 1/10)")
        ->capture_default_str();
    cmd->add_option("--delta", o.delta, "dormant-layer exchange fraction (rational)")
        ->capture_default_str();
    cmd->add_option("--mu", o.mu, "per-generation mutation probability")->capture_default_str();
    cmd->add_option("--nu", o.nu, "migration probability of an active lineage")
        ->capture_default_str();
}

model_params to_params(const model_opts& o) {
    model_params p;
    p.N = o.N;
    p.M = o.M;
    p.eps = parse_rational(o.epsilon);
    p.delta = parse_rational(o.delta);
    p.mu = o.mu;
    p.nu = o.nu;
    p.validate();
    return p;
}

torus_spec to_torus(const model_opts& o) {
    torus_spec t{o.d, o.L};
    t.validate();
    return t;
}

void emit_out(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        write_text_file(path, content);
    }
}

site parse_site(const std::string& text, int d) {
    site x{0, 0, 0};
    std::stringstream ss(text);
    std::string tok;
    int j = 0;
    while (std::getline(ss, tok, ',')) {
        if (j >= d) throw std::invalid_argument("--x has more than d coordinates: '" + text + "'");
        try {
            x[static_cast<std::size_t>(j)] = std::stoll(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse coordinate '" + tok + "'");
        }
        ++j;
    }
    if (j != d) throw std::invalid_argument("--x needs exactly d comma-separated coordinates");
    return x;
}

ibd_method parse_method(const std::string& name) {
    if (name == "spectral") return ibd_method::closed_form;
    if (name == "matrix") return ibd_method::matrix_inverse;
    if (name == "fixed-point") return ibd_method::fixed_point;
    throw std::invalid_argument("unknown method '" + name + "'");
}

// ---- subcommand runners -------------------------------------------------

int run_ibd(const model_opts& mo, const std::string& format, const std::string& method,
            const std::string& out_path, int threads) {
    const model_params p = to_params(mo);
    const torus_spec t = to_torus(mo);
    const auto kern = migration_kernel::nearest_neighbour(p.nu);
    const ibd_method m = parse_method(method);
    const ibd_field f = compute_ibd_field(p, t, kern, m, threads);
    if (format == "json") {
        emit_out(out_path, emit_ibd_json(p, t, f, m));
    } else if (format == "csv") {
        emit_out(out_path, emit_ibd_csv(t, f));
    } else {
        throw std::invalid_argument("unknown format '" + format + "'");
    }
    return 0;
}

int run_green(int d, std::int64_t L, double z, std::int64_t x_max, const std::string& out_path) {
    std::ostringstream out;
    if (L != infinite_lattice) {
        torus_spec t{d, L};
        t.validate();
        for (int j = 0; j < d; ++j) out << "x_" << (j + 1) << ",";
        out << "green,green_deriv,c_coeff,cbar_coeff\n";
        for (const auto& x : t.all_sites()) {
            for (int j = 0; j < d; ++j) out << x[static_cast<std::size_t>(j)] << ",";
            out << format_sci(green_torus(t, x, z)) << ","
                << format_sci(green_torus_derivative(t, x, z)) << ","
                << format_sci(c_coeff_torus(t, x)) << "," << format_sci(cbar_coeff_torus(t, x))
                << "\n";
        }
    } else {
        if (d < 1 || d > 3) throw std::invalid_argument("green: d must be 1..3");
        if (x_max < 0) throw std::invalid_argument("green: --x-max must be >= 0");
        const green_query g{d, infinite_lattice};
        for (int j = 0; j < d; ++j) out << "x_" << (j + 1) << ",";
        out << "green,green_deriv\n";
        std::vector<site> sites;
        const std::int64_t side = x_max + 1;
        std::int64_t count = 1;
        for (int j = 0; j < d; ++j) count *= side;
        for (std::int64_t i = 0; i < count; ++i) {
            site x{0, 0, 0};
            std::int64_t rem = i;
            for (int j = d - 1; j >= 0; --j) {
                x[static_cast<std::size_t>(j)] = rem % side;
                rem /= side;
            }
            sites.push_back(x);
        }
        for (const auto& x : sites) {
            for (int j = 0; j < d; ++j) out << x[static_cast<std::size_t>(j)] << ",";
            out << format_sci(green(g, x, z)) << "," << format_sci(green_derivative(g, x, z))
                << "\n";
        }
    }
    emit_out(out_path, out.str());
    return 0;
}

int run_single(std::int64_t N, std::int64_t M, const std::string& eps_text,
               const std::string& delta_text, std::int64_t i, std::int64_t j,
               const std::string& out_path) {
    model_params p;
    p.N = N;
    p.M = M;
    p.eps = parse_rational(eps_text);
    p.delta = parse_rational(delta_text);
    p.mu = 0.0;
    p.nu = 1.0;
    p.validate();
    exchange_count(p); // throws when eps*N is not an integer
    if (i < 0 || i > N) throw std::invalid_argument("single: need 0 <= i <= N");
    if (j < 0 || j > M) throw std::invalid_argument("single: need 0 <= j <= M");
    std::ostringstream out;
    out << "i_next,j_next,prob\n";
    for (std::int64_t in = 0; in <= N; ++in) {
        for (std::int64_t jn = 0; jn <= M; ++jn) {
            const double pr = seedbank_transition_prob(p, colony_state{i, j}, colony_state{in, jn});
            out << in << "," << jn << "," << format_sci(pr) << "\n";
        }
    }
    emit_out(out_path, out.str());
    return 0;
}

int run_asym_table(const model_opts& mo, const std::string& out_path, int threads) {
    const model_params p = to_params(mo);
    const torus_spec t = to_torus(mo);
    const auto kern = migration_kernel::nearest_neighbour(p.nu);
    const ibd_field exact = compute_ibd_field(p, t, kern, ibd_method::closed_form, threads);
    std::ostringstream out;
    for (int j = 0; j < t.d; ++j) out << "x_" << (j + 1) << ",";
    out << "component,exact,predicted,abs_error\n";
    const auto sites = t.all_sites();
    for (std::size_t idx = 0; idx < sites.size(); ++idx) {
        const vec4 pred = psi_small_delta(p, sites[idx], t, kern);
        for (int comp = 0; comp < 4; ++comp) {
            const auto ci = static_cast<std::size_t>(comp);
            for (int j = 0; j < t.d; ++j) out << sites[idx][static_cast<std::size_t>(j)] << ",";
            out << comp << "," << format_sci(exact.psi[idx][ci]) << "," << format_sci(pred[ci])
                << "," << format_sci(std::abs(exact.psi[idx][ci] - pred[ci])) << "\n";
        }
    }
    emit_out(out_path, out.str());
    return 0;
}

int run_asym_ladder(const model_opts& mo, const std::string& out_path, int threads) {
    // contraction diagnostic of the first-order swap expansion:
    // residual(delta) = sup |psi_exact(delta) - (psi(0) + delta Phi)|
    torus_spec t{mo.d, mo.L};
    t.validate();
    const auto kern = migration_kernel::nearest_neighbour(mo.nu);
    const rational ladder[] = {rational{1, 10}, rational{1, 100}, rational{1, 1000}};
    std::ostringstream out;
    out << "delta,residual,ratio_to_previous\n";
    double prev = 0.0;
    bool have_prev = false;
    for (const auto& del : ladder) {
        model_params p;
        p.N = mo.N;
        p.M = mo.N; // symmetric swap: M = N
        p.eps = del;
        p.delta = del;
        p.mu = mo.mu;
        p.nu = mo.nu;
        p.validate();
        const ibd_field exact = compute_ibd_field(p, t, kern, ibd_method::closed_form, threads);
        double res = 0.0;
        const auto sites = t.all_sites();
        for (std::size_t idx = 0; idx < sites.size(); ++idx) {
            const vec4 pred = psi_small_delta(p, sites[idx], t, kern);
            for (int comp = 0; comp < 4; ++comp) {
                const auto ci = static_cast<std::size_t>(comp);
                res = std::max(res, std::abs(exact.psi[idx][ci] - pred[ci]));
            }
        }
        out << format_sci(del.value()) << "," << format_sci(res) << ",";
        if (have_prev && res > 0.0) out << format_sci(prev / res);
        out << "\n";
        prev = res;
        have_prev = true;
    }
    emit_out(out_path, out.str());
    return 0;
}

int run_asym_regime(double r, double nu, const std::vector<double>& rhos,
                    const std::vector<double>& ys, const std::string& out_path) {
    // d = 1, no seed bank: exact alpha-route profiles against the limit laws
    std::ostringstream out;
    out << "rho,y,y_eff,psi4_exact,psi4_law,psi4_abs_err,"
           "phi4_scaled,phi4_law,phi4_abs_err\n";
    const green_query geom{1, infinite_lattice};
    for (const double rho : rhos) {
        const double mu = rho * nu;
        const double w = std::sqrt(2.0 * rho);
        const double N = r / (nu * w); // real-valued colony size fixing r
        const auto at_0 = abg_green(site{0, 0, 0}, mu, nu, geom);
        for (const double y : ys) {
            const auto x = static_cast<std::int64_t>(std::llround(y / w));
            const double y_eff = static_cast<double>(x) * w;
            const auto at_x = (x == 0) ? at_0 : abg_green(site{x, 0, 0}, mu, nu, geom);
            const double psi4 = psi4_delta0(at_x.alpha, at_0.alpha, N);
            const double law_psi = law_psi4_d1(y_eff, r);
            const vec4 phi = phi_correction(at_x, at_0, N);
            const double phi4_scaled = 2.0 * nu * rho * phi[3];
            const double law_p4 = law_phi4_d1(y_eff, r);
            out << format_sci(rho) << "," << format_sci(y) << "," << format_sci(y_eff) << ","
                << format_sci(psi4) << "," << format_sci(law_psi) << ","
                << format_sci(std::abs(psi4 - law_psi)) << "," << format_sci(phi4_scaled) << ","
                << format_sci(law_p4) << "," << format_sci(std::abs(phi4_scaled - law_p4))
                << "\n";
        }
    }
    emit_out(out_path, out.str());
    return 0;
}

int run_zeta(const model_opts& mo, const std::string& out_path, int threads) {
    const model_params p = to_params(mo);
    const torus_spec t = to_torus(mo);
    const auto kern = migration_kernel::nearest_neighbour(p.nu);
    const auto rep = second_moment(p, t, kern, threads);
    emit_out(out_path, emit_zeta_json(p, t, rep));
    return 0;
}

int run_mc(const model_opts& mo, std::int64_t n_reps, std::uint64_t seed, const std::string& x_text,
           bool with_reference, const std::string& out_path, int threads) {
    const model_params p = to_params(mo);
    const torus_spec t = to_torus(mo);
    const auto kern = migration_kernel::nearest_neighbour(p.nu);
    const site x = parse_site(x_text, t.d);
    const auto est = estimate_ibd(p, t, kern, x, n_reps, seed, threads);
    if (with_reference) {
        const auto f = compute_ibd_field(p, t, kern, ibd_method::closed_form, threads);
        const vec4 ref = f.psi[t.index_of(x)];
        emit_out(out_path, emit_mc_json(p, t, x, est, seed, &ref));
    } else {
        emit_out(out_path, emit_mc_json(p, t, x, est, seed, nullptr));
    }
    return 0;
}

int run_verify_cmd(const std::vector<std::string>& skip, bool has_seed, std::uint64_t seed,
                   const std::string& out_path, int threads) {
    verify_options opt;
    opt.threads = threads;
    for (const auto& s : skip) {
        if (s == "mc") {
            opt.skip_mc = true;
        } else {
            throw std::invalid_argument("verify: unknown check in --skip: '" + s + "'");
        }
    }
    opt.has_seed = has_seed;
    opt.seed = seed;
    const verify_report rep = run_verify(opt);
    std::cout << verify_table(rep);
    if (out_path.empty()) {
        std::cout << verify_json(rep);
    } else {
        write_text_file(out_path, verify_json(rep));
    }
    return rep.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"IBD probabilities for a stepping-stone model with a seed bank"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker threads (0 = IBDTORUS_THREADS env or hardware default)")
        ->capture_default_str();

    // ibd
    model_opts ibd_mo;
    std::string ibd_format = "json", ibd_method_name = "spectral", ibd_out;
    auto* cmd_ibd = app.add_subcommand("ibd", "IBD probability field on the torus");
    cmd_ibd->fallthrough();
    add_model_flags(cmd_ibd, ibd_mo);
    cmd_ibd->add_option("--format", ibd_format, "output format: json or csv")
        ->capture_default_str();
    cmd_ibd->add_option("--method", ibd_method_name, "spectral, matrix, or fixed-point")
        ->capture_default_str();
    cmd_ibd->add_option("-o,--output", ibd_out, "output path (default: stdout)");

    // green
    int green_d = 1;
    std::int64_t green_L = 8, green_xmax = 6;
    double green_z = 0.5;
    std::string green_out;
    auto* cmd_green = app.add_subcommand("green", "Green function / expansion coefficient table");
    cmd_green->fallthrough();
    cmd_green->add_option("-d,--dim", green_d, "dimension (1..3)")->capture_default_str();
    cmd_green->add_option("-L,--length", green_L, "torus side; 0 = infinite lattice")
        ->capture_default_str();
    cmd_green->add_option("--z", green_z, "evaluation point, |z| <= 1 - 1e-12")
        ->capture_default_str();
    cmd_green->add_option("--x-max", green_xmax, "max coordinate for infinite-lattice tables")
        ->capture_default_str();
    cmd_green->add_option("-o,--output", green_out, "output path (default: stdout)");

    // asym
    model_opts asym_mo;
    asym_mo.epsilon = "0.01";
    asym_mo.delta = "0.01";
    bool asym_ladder = false;
    std::string asym_regime, asym_out;
    double asym_r = 0.5, asym_nu_regime = 0.1;
    std::vector<double> asym_rhos, asym_ys;
    auto* cmd_asym = app.add_subcommand("asym", "expansion / scaling-limit comparison tables");
    cmd_asym->fallthrough();
    add_model_flags(cmd_asym, asym_mo);
    cmd_asym->add_flag("--ladder", asym_ladder, "emit swap-expansion contraction ladder");
    cmd_asym->add_option("--regime", asym_regime,
                         "scaling-limit table instead (supported: d1)");
    cmd_asym->add_option("--r", asym_r, "limit coalescence-rate ratio r (regime mode)")
        ->capture_default_str();
    cmd_asym->add_option("--regime-nu", asym_nu_regime, "migration probability (regime mode)")
        ->capture_default_str();
    cmd_asym->add_option("--rho", asym_rhos, "mutation/migration ratios (regime mode)");
    cmd_asym->add_option("--y", asym_ys, "scaled distances (regime mode)");
    cmd_asym->add_option("-o,--output", asym_out, "output path (default: stdout)");

    // zeta
    model_opts zeta_mo;
    zeta_mo.L = 100;
    zeta_mo.epsilon = "0.1";
    zeta_mo.delta = "0.1";
    zeta_mo.mu = 0.1;
    std::string zeta_out;
    auto* cmd_zeta = app.add_subcommand("zeta", "spatial second moment of the IBD field");
    cmd_zeta->fallthrough();
    add_model_flags(cmd_zeta, zeta_mo);
    cmd_zeta->add_option("-o,--output", zeta_out, "output path (default: stdout)");

    // mc
    model_opts mc_mo;
    mc_mo.epsilon = "0.1";
    mc_mo.delta = "0.1";
    std::int64_t mc_n = 100000;
    std::uint64_t mc_seed = 0;
    std::string mc_x = "0", mc_out;
    bool mc_ref = false;
    auto* cmd_mc = app.add_subcommand("mc", "backward-lineage Monte Carlo estimate");
    cmd_mc->fallthrough();
    add_model_flags(cmd_mc, mc_mo);
    cmd_mc->add_option("--n-reps", mc_n, "replicas per activity configuration")
        ->capture_default_str();
    cmd_mc->add_option("--seed", mc_seed, "RNG seed")->required();
    cmd_mc->add_option("--x", mc_x, "target colony, comma-separated coordinates")
        ->capture_default_str();
    cmd_mc->add_flag("--reference", mc_ref, "include spectral reference values and z-scores");
    cmd_mc->add_option("-o,--output", mc_out, "output path (default: stdout)");

    // single
    std::int64_t sc_N = 10, sc_M = 10, sc_i = 0, sc_j = 0;
    std::string sc_eps = "0.1", sc_delta = "0.1", sc_out;
    auto* cmd_single = app.add_subcommand("single", "single-colony two-layer transition row");
    cmd_single->fallthrough();
    cmd_single->add_option("-N,--active", sc_N, "active layer size")->capture_default_str();
    cmd_single->add_option("-M,--dormant", sc_M, "dormant layer size")->capture_default_str();
    cmd_single->add_option("--epsilon", sc_eps, "active-layer exchange fraction")
        ->capture_default_str();
    cmd_single->add_option("--delta", sc_delta, "dormant-layer exchange fraction")
        ->capture_default_str();
    cmd_single->add_option("--i", sc_i, "current focal count in the active layer")
        ->capture_default_str();
    cmd_single->add_option("--j", sc_j, "current focal count in the dormant layer")
        ->capture_default_str();
    cmd_single->add_option("-o,--output", sc_out, "output path (default: stdout)");

    // verify
    std::vector<std::string> verify_skip;
    std::uint64_t verify_seed = 0;
    std::string verify_out;
    auto* cmd_verify = app.add_subcommand("verify", "cross-route self-consistency suite");
    cmd_verify->fallthrough();
    cmd_verify->add_option("--skip", verify_skip, "checks to skip (recognised: mc)");
    auto* verify_seed_opt = cmd_verify->add_option("--seed", verify_seed, "RNG seed for the mc check");
    cmd_verify->add_option("-o,--output", verify_out, "write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cmd_ibd) return run_ibd(ibd_mo, ibd_format, ibd_method_name, ibd_out, threads);
        if (*cmd_green) return run_green(green_d, green_L, green_z, green_xmax, green_out);
        if (*cmd_asym) {
            if (!asym_regime.empty()) {
                if (asym_regime != "d1")
                    throw std::invalid_argument("asym: --regime supports only 'd1'");
                if (asym_rhos.empty()) asym_rhos = {1e-2, 1e-3, 1e-4};
                if (asym_ys.empty()) asym_ys = {0.0, 0.5, 1.0};
                return run_asym_regime(asym_r, asym_nu_regime, asym_rhos, asym_ys, asym_out);
            }
            if (asym_ladder) return run_asym_ladder(asym_mo, asym_out, threads);
            return run_asym_table(asym_mo, asym_out, threads);
        }
        if (*cmd_zeta) return run_zeta(zeta_mo, zeta_out, threads);
        if (*cmd_mc) return run_mc(mc_mo, mc_n, mc_seed, mc_x, mc_ref, mc_out, threads);
        if (*cmd_single) return run_single(sc_N, sc_M, sc_eps, sc_delta, sc_i, sc_j, sc_out);
        if (*cmd_verify)
            return run_verify_cmd(verify_skip, verify_seed_opt->count() > 0, verify_seed,
                                  verify_out, threads);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
