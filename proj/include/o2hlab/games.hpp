#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "o2hlab/adversary.hpp"
#include "o2hlab/dyadic.hpp"
#include "o2hlab/permutations.hpp"
#include "o2hlab/statevec.hpp"

#include "json.hpp"

namespace o2hlab {

// ---------------------------------------------------------------------------
// Low-level exact runner
// ---------------------------------------------------------------------------

// Where a permutation field takes its value when its slot is called.
struct FieldSource {
    enum Kind { FromCall, StateRegister, BoundValue } kind;
    std::string name;  // state register name / bound key; empty for FromCall

    static FieldSource from_call() { return {FromCall, {}}; }
    static FieldSource state_reg(std::string n) { return {StateRegister, std::move(n)}; }
    static FieldSource bound(std::string n) { return {BoundValue, std::move(n)}; }
};

struct OracleBinding {
    ClassicalPermutation perm;
    std::vector<FieldSource> sources;  // one per perm field
};

// A permutation field resolved at call time: either a state register index
// or a classical bound value.
struct ResolvedField {
    ClassicalPermutation::Field field;
    bool from_state = false;
    int state_reg = -1;
    Value value = 0;
};

struct RunContext {
    QState state;
    std::map<std::string, Value> bound;        // classical game registers
    std::map<std::string, int> calls_made;     // per slot
    const std::map<std::string, OracleBinding>* slots = nullptr;
    // slot -> (bound key -> value per call index); installed before each call.
    const std::map<std::string, std::map<std::string, std::vector<Value>>>* schedules = nullptr;

    // j is the 1-based index of this call among the slot's calls. pre_query
    // fires before the permutation is applied ("measure the input to this
    // query"); post_query after.
    std::function<void(const std::string& slot, int j, RunContext&,
                       const std::vector<ResolvedField>&)>
        pre_query;
    std::function<void(const std::string& slot, int j, RunContext&)> post_query;

    explicit RunContext(QState s) : state(std::move(s)) {}
};

void execute_step(RunContext& ctx, const Step& step);
void execute_stage(RunContext& ctx, const Stage& stage);
void execute_program(RunContext& ctx, const AdversaryProgram& program);

// Probability mass of a predicate on the resolved tuple (fields packed most
// significant first, as in the permutation's own packing). Deferred
// measurement: the state is not disturbed.
double predicate_mass(const QState& state, const std::vector<ResolvedField>& fields,
                      const std::function<bool(Value)>& predicate);

// ---------------------------------------------------------------------------
// Generic O2H experiment: G^hide and G^ow for a fixed pair (P, P')
// ---------------------------------------------------------------------------

struct BranchInit {
    double weight = 1.0;
    std::vector<std::pair<std::string, Value>> state_constants;  // xor'd into |0...0>
    std::map<std::string, Value> bound;
};

struct O2HExperiment {
    RegisterLayout layout;
    std::vector<BranchInit> branches;           // weights must sum to 1
    std::vector<std::string> hadamard_init;     // purified registers
    AdversaryProgram program;                   // the distinguisher; controls everything
    std::map<std::string, OracleBinding> context_slots;
    std::string o2h_slot;
    ClassicalPermutation p, p_prime;
    std::vector<FieldSource> o2h_sources;
    std::map<std::string, std::vector<Value>> o2h_schedule;  // bound key -> value per call

    // A trailing transform that commutes past the readout. Recorded so the
    // circuit is faithful to its figure; never applied.
    std::vector<std::string> deferred_final_hadamard;
};

struct RunTrace {
    double p_one = 0.0;
    std::vector<double> masses;  // difference-predicate mass before o2h-slot call j
};

// Runs the experiment with P (use_prime = false) or P' wired into the o2h
// slot. When with_masses is set, the difference-predicate mass is recorded
// before every o2h-slot call. post_query, when given, fires after every call
// of every slot.
RunTrace run_o2h_experiment(
    const O2HExperiment& exp, bool use_prime, bool with_masses,
    const std::function<void(const std::string&, int, RunContext&)>& post_query = nullptr);

double run_hide(const O2HExperiment& exp, bool use_prime);

struct OwSummary {
    int q = 0;
    std::vector<double> masses;
    double adv_ow = 0.0;  // (1/q) * sum of masses; 0 when q = 0
};
OwSummary run_ow(const O2HExperiment& exp);

// ---------------------------------------------------------------------------
// Seeded generic population (fixed-permutation O2H checks)
// ---------------------------------------------------------------------------

// A seeded (P, P', D) triple over a small layout. P is a seeded bijection on
// the joint tuple, P' differs from it by a seeded number of transpositions
// (possibly zero), and D interleaves seeded unitaries with q queries.
O2HExperiment build_generic_o2h_member(std::uint64_t seed);

// Seeded (f, f', D) triple for the xor-oracle form: f and f' are function
// tables and D queries f[+] on (X, Y).
struct XorTriple {
    int in_bits, out_bits;
    std::vector<Value> f, f_prime;
    AdversaryProgram program;  // slot "oracle" on (X, Y)
};
XorTriple build_xor_triple(std::uint64_t seed);

// Direct xor-oracle experiment for the triple.
O2HExperiment make_xor_experiment(const XorTriple& t);
// The tuple-register form: P(X, Y : F, F') with the tables held in registers
// initialized from f and f'.
O2HExperiment make_table_register_experiment(const XorTriple& t);
// Reverse construction: direction-bit xor oracle of a tuple permutation pair;
// every query of `inner` is replaced by the two-query swap gadget, so the
// program makes exactly 2q queries.
O2HExperiment make_direction_gadget_experiment(const O2HExperiment& inner);

// ---------------------------------------------------------------------------
// Staged computational reprogramming (pan-zeng suite)
// ---------------------------------------------------------------------------

struct PzEnvironment {
    int l = 1;  // hash input bits
    int m = 1;  // hash output bits
    int n = 0;  // reprogramming rounds; adversary has n+1 stages

    struct InitBranch {
        double weight;
        Value s;
        Value x0;                    // initial input to stage 0
        std::vector<Value> h0, h1;   // hash tables, 2^l entries of m bits
    };
    std::vector<InitBranch> init;

    struct OracOutcome {
        double weight;
        Value x;                                        // leakage to the next stage
        std::vector<std::pair<Value, Value>> repro;     // H1[point] := value
    };
    std::function<std::vector<OracOutcome>(Value s, Value y)> orac;
};

// Seeded environment population member.
PzEnvironment build_pz_environment(std::uint64_t seed, int l, int m, int n);

// Stage-structured adversary for the environment: stage i makes q[i] queries
// to slot "hash" on (X, Y); stage outputs are the measured work bit.
AdversaryProgram build_pz_random_adversary(std::uint64_t seed, int l, int m,
                                           const std::vector<int>& q);

struct PzRun {
    double p0 = 0.0;
    double p1 = 0.0;
    std::vector<double> stage_adv_ow;  // Adv^ow per stage, measured in the b=1 world
};

// Direct route: hash tables held classically, reprogramming applied to the
// table between stages.
PzRun run_pz_direct(const PzEnvironment& env, const AdversaryProgram& program);

struct PzO2hRun {
    double p0 = 0.0;
    double p1 = 0.0;
    std::vector<double> masses;  // per global query, b=1 dynamics
    double adv_ow = 0.0;
    int q = 0;
};
// Reduction route: tables live in state registers, the oracle pair is the
// fixed permutation pair (reads H1 / reads H0), masses use the generic
// difference predicate.
PzO2hRun run_pz_o2h(const PzEnvironment& env, const AdversaryProgram& program);

// ---------------------------------------------------------------------------
// Resampling with immediate disclosure (ghhm suite)
// ---------------------------------------------------------------------------

struct GhhmConfig {
    int l = 1;
    int m = 1;
    int n = 1;                       // reprogramming rounds
    std::vector<int> q;              // hash queries per stage, size n+1
    std::vector<DyadicDistribution> distributions;  // preregistered table
    std::vector<int> stage_dist;     // distribution index per round, size n
    int r = 2;                       // seed width
    std::uint64_t seed = 1;

    int x_bits() const;              // width of the distribution-index field
    int i_bits() const;              // width of the round counter
    nlohmann::json to_json() const;
    static GhhmConfig from_json(const nlohmann::json& j);
};

enum class GhhmMode { Enumerated, Hybrid1, Hybrid2, Purified };

// User-level adversary: registers W, X, Y, YR; stage i makes q[i] calls to
// "hash" on (X, Y) and, when i < n, ends with one call to "rep" on (YR).
AdversaryProgram build_ghhm_random_adversary(const GhhmConfig& cfg);
// Queries a fixed point before and after reprogramming at a point mass on it
// and reports whether the answers match (l = 1, m = 1, q = (1, 0), n = 1).
AdversaryProgram build_ghhm_point_mass_guesser();
GhhmConfig point_mass_guesser_config();

// Exact probability that the adversary outputs 1 in world b under the given
// representation of the game.
double run_ghhm(const GhhmConfig& cfg, const AdversaryProgram& program, int b, GhhmMode mode);

// The O2H experiment whose hide games are the purified world-b runs and whose
// ow game measures the reprogramming queries under the never-swap oracle.
O2HExperiment make_ghhm_experiment(const GhhmConfig& cfg, const AdversaryProgram& program,
                                   GhhmMode mode);

// Mass, per hash query count j, on H-register components whose table has more
// than j nonzero entries. Evaluated after every hash call of a purified run.
std::vector<double> ghhm_sparsity_excess(const GhhmConfig& cfg, const AdversaryProgram& program,
                                         int b);

// ---------------------------------------------------------------------------
// Single hidden point, uniform (unruh1 suite)
// ---------------------------------------------------------------------------

struct Unruh1Config {
    int l = 1;        // hidden-point bits
    int k = 0;        // message bits (0 = no message register)
    int n_out = 1;    // hash output bits
    int q0 = 1, q1 = 1;
    std::uint64_t seed = 1;
};

// User-level adversary: registers W, X, M (if k > 0), Y, B; two stages of
// "hash" calls on (X, M, Y) / (X, Y).
AdversaryProgram build_unruh1_random_adversary(const Unruh1Config& cfg);

double run_unruh1(const Unruh1Config& cfg, const AdversaryProgram& program, int b);
double run_unruh1_hybrid(const Unruh1Config& cfg, const AdversaryProgram& program, int a, int b,
                         int c);
// Pr[measured second-stage query equals the hidden input], averaged over the
// query index.
double run_unruh1_ow(const Unruh1Config& cfg, const AdversaryProgram& program);
// Exact ow-advantages of the two reduction distinguishers (first-stage pair,
// second-stage pair).
double run_unruh1_stage0_adv_ow(const Unruh1Config& cfg, const AdversaryProgram& program);
double run_unruh1_stage1_adv_ow(const Unruh1Config& cfg, const AdversaryProgram& program);

// ---------------------------------------------------------------------------
// Single hidden point, adaptively distributed (unruh2 suite)
// ---------------------------------------------------------------------------

struct Unruh2Config {
    int l = 1;      // hash input bits; messages share this width
    int n_out = 1;  // hash output bits
    int r = 2;      // sampler seed bits
    int q0 = 1, q1 = 1;
    std::vector<DyadicDistribution> family;  // one distribution per message
    std::uint64_t seed = 1;

    double family_min_entropy() const;
    double family_collision_entropy() const;
};

// User-level adversary: registers W, X, Y; stage 0 "hash" calls, one "samp"
// call on (X, Y), stage 1 "hash" calls. The second stage may read R.
AdversaryProgram build_unruh2_random_adversary(const Unruh2Config& cfg);

double run_unruh2(const Unruh2Config& cfg, const AdversaryProgram& program, int b);
double run_unruh2_hybrid(const Unruh2Config& cfg, const AdversaryProgram& program, int a, int b,
                         int c);
// Pr[measured second-stage query equals the sampled point].
double run_unruh2_ow(const Unruh2Config& cfg, const AdversaryProgram& program);
// ow-advantages of the two reduction distinguishers (sampling pair, second
// stage pair).
double run_unruh2_samp_adv_ow(const Unruh2Config& cfg, const AdversaryProgram& program);
double run_unruh2_stage1_adv_ow(const Unruh2Config& cfg, const AdversaryProgram& program);

// ---------------------------------------------------------------------------
// Permutation resampling (abkh suite)
// ---------------------------------------------------------------------------

struct AbkhConfig {
    int n = 2;  // permutation domain bits; enumeration covers all (2^n)! tables
    int q0 = 1, q1 = 1;
    std::uint64_t seed = 1;
    bool classical_only = false;  // basis-state fast path population
};

// User-level adversary: registers W, D, X, Y, S, Sp; two stages of "perm"
// calls on (D, X, Y). s and s' are delivered into S and Sp before stage 1.
AdversaryProgram build_abkh_random_adversary(const AbkhConfig& cfg);
// Learns the whole table forward in stage 0, then checks one entry (n = 2).
AdversaryProgram build_abkh_table_guesser();

double run_abkh(const AbkhConfig& cfg, const AdversaryProgram& program, int b);
// Exact ow-advantage of the wrapping distinguisher (stage-0 queries measured
// against the resampling difference set).
double run_abkh_adv_ow(const AbkhConfig& cfg, const AdversaryProgram& program);

}  // namespace o2hlab
