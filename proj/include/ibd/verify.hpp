#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ibd {

struct verify_check {
    std::string name;
    bool pass = false;
    double measured = 0.0;  // measured discrepancy / statistic
    double tolerance = 0.0; // pass iff measured <= tolerance
    std::string detail;     // short human-readable note
};

struct verify_options {
    bool skip_mc = false;  // drop the Monte Carlo concordance check
    bool has_seed = false; // --seed was supplied (mandatory unless skip_mc)
    std::uint64_t seed = 0;
    int threads = 0; // 0 -> default_threads()
};

struct verify_report {
    std::vector<verify_check> checks;
    bool all_pass = false;
    bool mc_skipped = false;
    std::uint64_t seed = 0;
};

// Runs the fast self-consistency suite (closed-form vs matrix vs fixed-point
// fields, Green-function identities, seed-bank matrix transcription, kernel
// route equality, second-moment consistency, near-zero-mutation sanity, and
// optionally Monte Carlo concordance).  Deterministic given the options.
verify_report run_verify(const verify_options& opt);

// human-readable PASS/FAIL table (may include timings; not byte-stable)
std::string verify_table(const verify_report& rep);

// machine-readable report; carries no timings so that repeated runs with the
// same options are byte-identical regardless of thread count or load
std::string verify_json(const verify_report& rep);

} // namespace ibd
