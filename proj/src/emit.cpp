#include "ibd/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ibd {

std::string format_sci(double v) {
    // normalise the sign of zero so that -0.0 and 0.0 serialize identically
    if (v == 0.0) { v = 0.0; }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return std::string(buf);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

void json_obj::field(const std::string& key, const std::string& raw_value) {
    parts_.push_back("\"" + json_escape(key) + "\":" + raw_value);
}

void json_obj::field_str(const std::string& key, const std::string& value) {
    field(key, "\"" + json_escape(value) + "\"");
}

void json_obj::field_num(const std::string& key, double v) { field(key, format_sci(v)); }

void json_obj::field_int(const std::string& key, std::int64_t v) {
    field(key, std::to_string(v));
}

void json_obj::field_bool(const std::string& key, bool v) { field(key, v ? "true" : "false"); }

std::string json_obj::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) out += ",";
        out += parts_[i];
    }
    out += "}";
    return out;
}

std::string json_array(const std::vector<std::string>& raw_values) {
    std::string out = "[";
    for (std::size_t i = 0; i < raw_values.size(); ++i) {
        if (i) out += ",";
        out += raw_values[i];
    }
    out += "]";
    return out;
}

std::string json_num_array(const double* v, std::size_t n) {
    std::vector<std::string> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) items.push_back(format_sci(v[i]));
    return json_array(items);
}

std::string json_int_array(const std::int64_t* v, std::size_t n) {
    std::vector<std::string> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) items.push_back(std::to_string(v[i]));
    return json_array(items);
}

std::string json_params(const model_params& p) {
    json_obj o;
    o.field_int("M", p.M);
    o.field_int("N", p.N);
    o.field_num("delta", p.delta_d());
    o.field_num("epsilon", p.eps_d());
    o.field_num("mu", p.mu);
    o.field_num("nu", p.nu);
    return o.str();
}

std::string json_torus(const torus_spec& t) {
    json_obj o;
    o.field_int("L", t.L);
    o.field_int("d", t.d);
    return o.str();
}

std::vector<std::string> typo_ledger() {
    return {"prefactor_no_double_1_over_N", "psi00_plus_sign"};
}

std::string method_name(ibd_method m) {
    switch (m) {
    case ibd_method::closed_form: return "spectral";
    case ibd_method::matrix_inverse: return "matrix";
    case ibd_method::fixed_point: return "fixed-point";
    }
    return "unknown";
}

std::string emit_ibd_json(const model_params& p, const torus_spec& t, const ibd_field& f,
                          ibd_method method) {
    std::vector<std::string> field_items;
    field_items.reserve(f.psi.size());
    const auto sites = t.all_sites();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        json_obj item;
        item.field("psi", json_num_array(f.psi[i].data(), 4));
        item.field("x", json_int_array(sites[i].data(), static_cast<std::size_t>(t.d)));
        field_items.push_back(item.str());
    }
    std::vector<std::string> ledger;
    for (const auto& name : typo_ledger()) ledger.push_back("\"" + json_escape(name) + "\"");

    json_obj o;
    o.field("field", json_array(field_items));
    o.field_str("method", method_name(method));
    o.field("params", json_params(p));
    o.field("psi00", json_num_array(f.psi_same_colony.data(), 4));
    o.field("torus", json_torus(t));
    o.field("typo_ledger_applied", json_array(ledger));
    return o.str() + "\n";
}

std::string emit_ibd_csv(const torus_spec& t, const ibd_field& f) {
    std::ostringstream out;
    for (int j = 0; j < t.d; ++j) out << "x_" << (j + 1) << ",";
    out << "psi_00,psi_01,psi_10,psi_11\n";
    const auto sites = t.all_sites();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (int j = 0; j < t.d; ++j) out << sites[i][static_cast<std::size_t>(j)] << ",";
        out << format_sci(f.psi[i][0]) << "," << format_sci(f.psi[i][1]) << ","
            << format_sci(f.psi[i][2]) << "," << format_sci(f.psi[i][3]) << "\n";
    }
    return out.str();
}

std::string emit_zeta_json(const model_params& p, const torus_spec& t,
                           const second_moment_report& rep) {
    json_obj o;
    o.field_num("expected_tau", rep.expected_tau);
    o.field("params", json_params(p));
    o.field_num("rel_diff", rep.rel_diff);
    o.field_num("rel_diff_fit", rep.rel_diff_fit);
    o.field_num("tail_mass", rep.tail_mass);
    o.field_bool("tail_ok", rep.tail_ok);
    o.field("torus", json_torus(t));
    o.field("zeta_closed", json_num_array(rep.zeta_closed.data(), 4));
    o.field("zeta_empirical", json_num_array(rep.zeta_empirical.data(), 4));
    o.field("zeta_fit", json_num_array(rep.zeta_fit.data(), 4));
    return o.str() + "\n";
}

std::string emit_mc_json(const model_params& p, const torus_spec& t, const site& x,
                         const mc_estimate& est, std::uint64_t seed, const vec4* reference) {
    json_obj o;
    o.field_int("cap", est.cap);
    o.field_int("n_reps", est.n_reps);
    o.field("params", json_params(p));
    o.field("psi", json_num_array(est.psi.data(), 4));
    if (reference != nullptr) { o.field("psi_reference", json_num_array(reference->data(), 4)); }
    o.field("se", json_num_array(est.se.data(), 4));
    o.field_int("seed", static_cast<std::int64_t>(seed));
    o.field_num("tail_bound", est.tail_bound);
    o.field("torus", json_torus(t));
    o.field("truncated_fraction", json_num_array(est.truncated_fraction.data(), 4));
    o.field("x", json_int_array(x.data(), static_cast<std::size_t>(t.d)));
    if (reference != nullptr) {
        vec4 z{};
        for (int c = 0; c < 4; ++c) {
            const double se = est.se[static_cast<std::size_t>(c)];
            const double diff =
                est.psi[static_cast<std::size_t>(c)] - (*reference)[static_cast<std::size_t>(c)];
            z[static_cast<std::size_t>(c)] = (se > 0.0) ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
        }
        o.field("z_scores", json_num_array(z.data(), 4));
    }
    return o.str() + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw std::runtime_error("cannot open output file: " + path); }
    out << content;
    out.flush();
    if (!out) { throw std::runtime_error("failed writing output file: " + path); }
}

} // namespace ibd
