#include "o2hlab/games.hpp"

#include <stdexcept>

namespace o2hlab {

namespace {

// P reads the table in field `a_name`, P' the one in `b_name`; both over
// (X, Y, a, b).
std::pair<ClassicalPermutation, ClassicalPermutation> make_table_reader_pair(
    int l, int m, const std::string& a_name, const std::string& b_name) {
    const int h_bits = m << l;
    std::vector<ClassicalPermutation::Field> fields = {
        {"X", l}, {"Y", m}, {a_name, h_bits}, {b_name, h_bits}};
    auto reader = [l, m, h_bits](bool second) {
        return [l, m, h_bits, second](Value v) {
            Value tb = v & ((Value{1} << h_bits) - 1);
            Value ta = (v >> h_bits) & ((Value{1} << h_bits) - 1);
            Value y = (v >> (2 * h_bits)) & ((Value{1} << m) - 1);
            Value x = v >> (2 * h_bits + m);
            y ^= table_get(second ? tb : ta, x, m);
            return (((x << m | y) << h_bits | ta) << h_bits) | tb;
        };
    };
    auto p = ClassicalPermutation::from_function("reads_" + a_name, fields, 2, reader(false),
                                                 reader(false));
    auto pp = ClassicalPermutation::from_function("reads_" + b_name, fields, 2, reader(true),
                                                  reader(true));
    return {std::move(p), std::move(pp)};
}

}  // namespace

O2HExperiment build_generic_o2h_member(std::uint64_t seed) {
    SplitMix64 rng(seed);

    const int x_bits = 1 + static_cast<int>(rng.next_below(2));
    const int y_bits = 1 + static_cast<int>(rng.next_below(2));
    const bool with_game_reg = rng.next_below(2) == 0;
    const int g_bits = with_game_reg ? 1 + static_cast<int>(rng.next_below(2)) : 0;
    const int tuple_bits = x_bits + y_bits + g_bits;

    std::vector<ClassicalPermutation::Field> fields = {{"X", x_bits}, {"Y", y_bits}};
    if (g_bits > 0) {
        fields.push_back({"G", g_bits});
    }

    auto p_table = random_permutation_table(rng, Value{1} << tuple_bits);
    auto pp_table = p_table;
    // 0, 1, 2 or 4 transpositions; 0 gives an empty difference set.
    const std::uint64_t swaps_pick = rng.next_below(4);
    const std::uint64_t swaps = swaps_pick == 3 ? 4 : swaps_pick;
    for (std::uint64_t s = 0; s < swaps; ++s) {
        Value a = rng.next_below(Value{1} << tuple_bits);
        Value b = rng.next_below(Value{1} << tuple_bits);
        std::swap(pp_table[a], pp_table[b]);
    }

    auto table_fn = [](std::vector<Value> t) {
        return [t = std::move(t)](Value v) { return t[v]; };
    };
    auto p = ClassicalPermutation::from_function("seeded_perm", fields,
                                                 static_cast<int>(fields.size()),
                                                 table_fn(p_table));
    auto pp = ClassicalPermutation::from_function("seeded_perm_alt", fields,
                                                  static_cast<int>(fields.size()),
                                                  table_fn(pp_table));

    O2HExperiment exp;
    std::vector<RegisterLayout::Register> regs = {{"W", 1}, {"X", x_bits}, {"Y", y_bits}};
    std::vector<std::string> call_regs = {"X", "Y"};
    if (g_bits > 0) {
        regs.push_back({"G", g_bits});
        call_regs.push_back("G");
    }
    exp.layout = RegisterLayout(regs);
    exp.branches = {BranchInit{}};
    exp.o2h_slot = "o2h";
    exp.p = std::move(p);
    exp.p_prime = std::move(pp);
    exp.o2h_sources.assign(fields.size(), FieldSource::from_call());

    // Mostly 1..3 queries; an occasional query-free member exercises the
    // degenerate rule.
    const std::uint64_t q_pick = rng.next_below(8);
    const int q = q_pick == 0 ? 0 : 1 + static_cast<int>(q_pick % 3);
    exp.program = build_random_adversary(rng.next(), regs, {q}, "o2h", call_regs,
                                         {"W", "X", "Y"});
    return exp;
}

XorTriple build_xor_triple(std::uint64_t seed) {
    SplitMix64 rng(seed);
    XorTriple t;
    t.in_bits = 1 + static_cast<int>(rng.next_below(2));
    t.out_bits = rng.next_below(4) == 0 ? 2 : 1;
    t.f = random_function_table(rng, Value{1} << t.in_bits, t.out_bits);
    switch (rng.next_below(3)) {
        case 0:
            t.f_prime = t.f;  // empty difference set
            break;
        case 1: {
            t.f_prime = t.f;
            Value x = rng.next_below(Value{1} << t.in_bits);
            t.f_prime[x] ^= 1 + rng.next_below((Value{1} << t.out_bits) - 1);
            break;
        }
        default:
            t.f_prime = random_function_table(rng, Value{1} << t.in_bits, t.out_bits);
            break;
    }
    const int q = 1 + static_cast<int>(rng.next_below(3));
    std::vector<RegisterLayout::Register> regs = {{"W", 1}, {"X", t.in_bits}, {"Y", t.out_bits}};
    t.program = build_random_adversary(rng.next(), regs, {q}, "oracle", {"X", "Y"},
                                       {"W", "X", "Y"});
    return t;
}

O2HExperiment make_xor_experiment(const XorTriple& t) {
    O2HExperiment exp;
    exp.layout = RegisterLayout({{"W", 1}, {"X", t.in_bits}, {"Y", t.out_bits}});
    exp.branches = {BranchInit{}};
    exp.program = t.program;
    exp.o2h_slot = "oracle";
    exp.p = make_xor_oracle(t.f, t.in_bits, t.out_bits, "f_xor");
    exp.p_prime = make_xor_oracle(t.f_prime, t.in_bits, t.out_bits, "fp_xor");
    exp.o2h_sources = {FieldSource::from_call(), FieldSource::from_call()};
    return exp;
}

O2HExperiment make_table_register_experiment(const XorTriple& t) {
    O2HExperiment exp;
    const int table_bits = t.out_bits << t.in_bits;
    exp.layout = RegisterLayout({{"W", 1},
                                 {"X", t.in_bits},
                                 {"Y", t.out_bits},
                                 {"F", table_bits},
                                 {"Fp", table_bits}});
    BranchInit branch;
    branch.state_constants = {{"F", pack_table(t.f, t.out_bits)},
                              {"Fp", pack_table(t.f_prime, t.out_bits)}};
    exp.branches = {std::move(branch)};

    exp.program = t.program;
    exp.program.owned.push_back({"F", table_bits});
    exp.program.owned.push_back({"Fp", table_bits});

    exp.o2h_slot = "oracle";
    auto pair = make_table_reader_pair(t.in_bits, t.out_bits, "F", "Fp");
    exp.p = std::move(pair.first);
    exp.p_prime = std::move(pair.second);
    exp.o2h_sources = {FieldSource::from_call(), FieldSource::from_call(),
                       FieldSource::state_reg("F"), FieldSource::state_reg("Fp")};
    return exp;
}

O2HExperiment make_direction_gadget_experiment(const O2HExperiment& inner) {
    if (!inner.context_slots.empty() || !inner.o2h_schedule.empty()) {
        throw std::invalid_argument("direction gadget expects a plain experiment");
    }
    for (const auto& src : inner.o2h_sources) {
        if (src.kind != FieldSource::FromCall) {
            throw std::invalid_argument("direction gadget expects call-provided fields");
        }
    }

    O2HExperiment exp;
    exp.o2h_slot = inner.o2h_slot;
    exp.p = make_direction_oracle(inner.p);
    exp.p_prime = make_direction_oracle(inner.p_prime);
    exp.o2h_sources.assign(exp.p.fields().size(), FieldSource::from_call());

    // Extend the layout with the direction bit and a scratch mirror of the
    // queried tuple.
    std::vector<RegisterLayout::Register> regs = inner.layout.registers();
    regs.push_back({"Dbit", 1});
    std::vector<std::string> scratch;
    for (const auto& f : inner.p.fields()) {
        regs.push_back({"S_" + f.name, f.width});
        scratch.push_back("S_" + f.name);
    }
    exp.layout = RegisterLayout(regs);
    exp.branches = inner.branches;
    exp.hadamard_init = inner.hadamard_init;

    exp.program = inner.program;
    exp.program.owned = regs;
    const auto& fields = inner.p.fields();
    for (auto& stage : exp.program.stages) {
        std::vector<Step> steps;
        for (auto& step : stage.steps) {
            const auto* call = std::get_if<OracleCallStep>(&step);
            if (!call || call->slot != inner.o2h_slot) {
                steps.push_back(std::move(step));
                continue;
            }
            if (call->registers.size() != fields.size()) {
                throw std::invalid_argument("gadget call must pass the whole tuple");
            }
            // (1, x, 0) then (0, P(x), x^x=0), then swap: tuple holds P(x),
            // scratch returns to zero.
            std::vector<std::string> fwd_regs = {"Dbit"};
            for (const auto& r : call->registers) {
                fwd_regs.push_back(r);
            }
            for (const auto& s : scratch) {
                fwd_regs.push_back(s);
            }
            std::vector<std::string> rev_regs = {"Dbit"};
            for (const auto& s : scratch) {
                rev_regs.push_back(s);
            }
            for (const auto& r : call->registers) {
                rev_regs.push_back(r);
            }
            steps.push_back(make_xor_constant_step("Dbit", 1, 1));
            steps.push_back(OracleCallStep{inner.o2h_slot, fwd_regs});
            steps.push_back(make_xor_constant_step("Dbit", 1, 1));
            steps.push_back(OracleCallStep{inner.o2h_slot, rev_regs});
            for (std::size_t i = 0; i < fields.size(); ++i) {
                steps.push_back(
                    make_swap_registers_step(call->registers[i], scratch[i], fields[i].width));
            }
        }
        stage.steps = std::move(steps);
        stage.visible.clear();
    }
    return exp;
}

}  // namespace o2hlab
