#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "o2hlab/games.hpp"

#include "json.hpp"

namespace o2hlab {

// Inequality slack: looser than the 1e-9 equality tolerance because a square
// root of a 1e-12-perturbed mass can move by 1e-6.
inline constexpr double kSlackTolerance = 1e-7;
inline constexpr double kIdentityTolerance = 1e-12;

// |p1^e - p0^e| for e in {1, 1/2}.
double advantage_hide(double p0, double p1, double e);

struct AdvantageReport {
    std::string game;
    std::uint64_t seed = 0;
    double e = 1.0;
    double p0 = 0.0;
    double p1 = 0.0;
    double adv_hide = 0.0;
    double adv_ow = 0.0;
    std::vector<double> stage_adv_ow;
    int q = 0;
    std::vector<int> q_list;
    std::vector<int> q_hat;
    std::optional<double> mu;      // min-entropy input
    std::optional<double> k;       // collision-entropy input
    std::vector<double> p_max;     // per-round max sampling probability
    double bound_value = 0.0;
    double slack = 0.0;
    bool pass = false;
    // A second bound line (original constants), evaluated for comparison.
    std::optional<double> reference_bound;
    std::optional<bool> reference_pass;
    std::vector<Value> difference_listing;

    nlohmann::json to_json() const;
    std::string csv_row() const;
    static std::string csv_header();
};

// Fills adv_hide, slack and pass from p0/p1/e and the bound value.
void finish_report(AdvantageReport& report);

// --- checkers, one per theorem ---

// |p_P^e - p_P'^e| <= 2q sqrt(Adv^ow); unconditional.
AdvantageReport check_fixed_perm_o2h(const O2HExperiment& exp, double e, std::uint64_t seed,
                                     const std::string& game = "o2h");

// Both directions of the xor-form / tuple-form equivalence.
struct PropositionCheck {
    double dev_p0 = 0.0, dev_p1 = 0.0, dev_adv_ow = 0.0;
    int q_inner = 0, q_wrapped = 0;
    AdvantageReport report;  // bound check on the wrapped side, e = 1
};
PropositionCheck check_prop_forward(const XorTriple& triple, std::uint64_t seed);
PropositionCheck check_prop_reverse(const O2HExperiment& inner, std::uint64_t seed);

struct PzCheck {
    AdvantageReport report_e1;
    AdvantageReport report_e_half;
    double original_bound = 0.0;  // double-sum form, e = 1
    bool original_pass = false;
    bool new_bound_applicable = true;  // every stage makes at least one query
    double identity_hide_dev = 0.0;    // direct vs reduction probabilities
    double identity_ow_dev = 0.0;      // global ow vs stage-weighted sum
};
PzCheck check_pz(const PzEnvironment& env, const AdversaryProgram& program, std::uint64_t seed);

struct GhhmCheck {
    AdvantageReport report_e1;
    AdvantageReport report_e_half;
    double p0_enumerated = 0.0, p1_enumerated = 0.0;
    double enumerated_purified_dev = 0.0;  // max over b
    double measured_adv_ow = 0.0;          // <= sum q_hat_i p_max_i / n
};
GhhmCheck check_ghhm(const GhhmConfig& cfg, const AdversaryProgram& program, std::uint64_t seed,
                     bool with_enumerated = true);

struct Unruh1Check {
    AdvantageReport report_e1;
    AdvantageReport report_e_half;
    double adv_un_ow = 0.0;
    double stage0_adv_ow = 0.0;  // <= 2^-l
    double stage1_adv_ow = 0.0;  // <= adv_un_ow
    std::array<double, 2> p_plain;     // G_0, G_1
    double hybrid_endpoint_dev = 0.0;  // H_(0,0,0) vs G_0 and H_(0,1,0) vs G_1
    double hybrid_equiv_dev = 0.0;     // H_(1,0,0) vs H_(1,1,1)
};
Unruh1Check check_unruh1(const Unruh1Config& cfg, const AdversaryProgram& program,
                         std::uint64_t seed);

struct Unruh2Check {
    AdvantageReport report_e1;      // min-entropy form
    AdvantageReport report_e_half;
    double k_form_bound = 0.0;      // collision-entropy form
    bool k_form_pass = false;
    double original_bound = 0.0;    // (4 + sqrt 2) constant, e = 1
    bool original_pass = false;
    double adv_unguess = 0.0;
    double samp_adv_ow = 0.0;       // <= q0 2^-mu
    double stage1_adv_ow = 0.0;     // <= adv_unguess
    std::array<double, 2> p_plain;
    double hybrid_endpoint_dev = 0.0;
    double hybrid_equiv_dev = 0.0;  // swap vs relabel and the a-switch pair
};
Unruh2Check check_unruh2(const Unruh2Config& cfg, const AdversaryProgram& program,
                         std::uint64_t seed);

struct AbkhCheck {
    AdvantageReport report_e1;  // weakened bound 2 q0 sqrt(2 / 2^n)
    AdvantageReport report_e_half;
    double strong_bound = 0.0;  // 4 sqrt(q0 / 2^n), reference line
    bool strong_pass = false;
    std::optional<double> measured_adv_ow;  // n <= 2 populations
};
AbkhCheck check_abkh(const AbkhConfig& cfg, const AdversaryProgram& program, std::uint64_t seed,
                     bool measure_ow);

}  // namespace o2hlab
