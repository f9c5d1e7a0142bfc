#pragma once

#include "ibd/mc.hpp"
#include "ibd/params.hpp"
#include "ibd/second_moment.hpp"
#include "ibd/spectral.hpp"
#include "ibd/torus.hpp"

#include <string>
#include <vector>

namespace ibd {

// fixed scientific format used for every float in machine-readable output
std::string format_sci(double v); // printf %.12e

std::string json_escape(const std::string& s);

// Minimal insertion-ordered JSON assembler.  Callers insert keys in
// alphabetical order; values are pre-serialized fragments.  This keeps the
// output bit-stable: fixed key order, fixed float format, no locale.
class json_obj {
  public:
    void field(const std::string& key, const std::string& raw_value);
    void field_str(const std::string& key, const std::string& value);
    void field_num(const std::string& key, double v);
    void field_int(const std::string& key, std::int64_t v);
    void field_bool(const std::string& key, bool v);
    std::string str() const;

  private:
    std::vector<std::string> parts_;
};

std::string json_array(const std::vector<std::string>& raw_values);
std::string json_num_array(const double* v, std::size_t n);
std::string json_int_array(const std::int64_t* v, std::size_t n);

// serialized model parameters (keys M, N, delta, epsilon, mu, nu)
std::string json_params(const model_params& p);
std::string json_torus(const torus_spec& t);

// behavioural names of the sign/prefactor choices in the same-colony
// normalisation that differ from a naive transcription; surfaced in output
// so downstream consumers can detect which convention produced a file
std::vector<std::string> typo_ledger();

// {field, method, params, psi00, torus, typo_ledger_applied}
std::string emit_ibd_json(const model_params& p, const torus_spec& t, const ibd_field& f,
                          ibd_method method);

// header x_1,...,x_d,psi_00,psi_01,psi_10,psi_11; lexicographic site order
std::string emit_ibd_csv(const torus_spec& t, const ibd_field& f);

std::string emit_zeta_json(const model_params& p, const torus_spec& t,
                           const second_moment_report& rep);

// mc estimate, optionally with spectral reference values and z-scores
std::string emit_mc_json(const model_params& p, const torus_spec& t, const site& x,
                         const mc_estimate& est, std::uint64_t seed, const vec4* reference);

// throws std::runtime_error on failure (mapped to exit code 3 by the CLI)
void write_text_file(const std::string& path, const std::string& content);

std::string method_name(ibd_method m);

} // namespace ibd
