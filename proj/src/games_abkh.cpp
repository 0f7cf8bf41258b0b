#include "o2hlab/games.hpp"

#include <algorithm>
#include <stdexcept>

namespace o2hlab {

namespace {

struct AbkhShape {
    AbkhConfig cfg;
    std::vector<RegisterLayout::Register> regs;

    explicit AbkhShape(const AbkhConfig& c) : cfg(c) {
        if (cfg.n < 1 || cfg.n > 3) {
            throw std::invalid_argument("abkh domain must be 1..3 bits for full enumeration");
        }
        regs = {{"W", 1}, {"D", 1}, {"X", cfg.n}, {"Y", cfg.n}, {"S", cfg.n}, {"Sp", cfg.n}};
    }
};

// Basis-state fast path for fully classical programs: the joint state is a
// single basis value throughout. Steps are compiled once and reused across
// the (pi0, s, s') enumeration.
struct CompiledClassical {
    struct Op {
        bool is_oracle = false;
        std::vector<int> idx;                       // classical step registers
        const ClassicalPermutation* perm = nullptr;
    };
    RegisterLayout layout;
    std::array<std::vector<Op>, 2> stages;
    int d_idx, x_idx, y_idx, w_idx, s_idx, sp_idx;

    CompiledClassical(const RegisterLayout& lay, const AdversaryProgram& program)
        : layout(lay),
          d_idx(lay.index_of("D")),
          x_idx(lay.index_of("X")),
          y_idx(lay.index_of("Y")),
          w_idx(lay.index_of("W")),
          s_idx(lay.index_of("S")),
          sp_idx(lay.index_of("Sp")) {
        for (int stage = 0; stage < 2; ++stage) {
            for (const auto& step : program.stages[static_cast<std::size_t>(stage)].steps) {
                Op op;
                if (const auto* c = std::get_if<ClassicalStep>(&step)) {
                    for (const auto& r : c->registers) {
                        op.idx.push_back(layout.index_of(r));
                    }
                    op.perm = &c->perm;
                } else if (const auto* o = std::get_if<OracleCallStep>(&step)) {
                    if (o->slot != "perm") {
                        throw std::invalid_argument("classical run supports only the perm slot");
                    }
                    op.is_oracle = true;
                } else {
                    throw std::invalid_argument("classical run hit a non-classical step");
                }
                stages[static_cast<std::size_t>(stage)].push_back(std::move(op));
            }
        }
    }

    Value apply(Value v, const Op& op, const std::vector<Value>& pi,
                const std::vector<Value>& pi_inv) const {
        if (op.is_oracle) {
            Value d = layout.field(v, d_idx);
            Value x = layout.field(v, x_idx);
            Value y = layout.field(v, y_idx) ^ (d == 1 ? pi[x] : pi_inv[x]);
            return layout.with_field(v, y_idx, y);
        }
        return layout.insert(v, op.idx, op.perm->forward(layout.extract(v, op.idx)));
    }
};

struct AbkhOutcome {
    double p = 0.0;
    double mass_sum = 0.0;  // stage-0 difference mass
};

struct AbkhRunner {
    AbkhConfig cfg;
    const AdversaryProgram& program;
    RegisterLayout layout;
    std::optional<CompiledClassical> compiled;

    AbkhRunner(const AbkhConfig& c, const AdversaryProgram& prog)
        : cfg(c), program(prog), layout(prog.owned) {
        if (program.stages.size() != 2) {
            throw std::invalid_argument("abkh adversary needs exactly two stages");
        }
        if (program.all_steps_classical()) {
            compiled.emplace(layout, program);
        }
    }

    // One (pi0, s, s') branch; the first stage always sees pi0, the second
    // sees pi_b.
    AbkhOutcome run_branch(int b, const std::vector<Value>& pi0, Value s, Value sp,
                           bool want_mass, bool stop_after_stage0) const {
        AbkhOutcome out;
        const std::vector<Value> pi0_inv = invert_table(pi0);
        const std::vector<Value> pi1 = compose_tables(pi0, swap_table(cfg.n, s, sp));
        const std::vector<Value> pi1_inv = invert_table(pi1);
        const std::vector<Value>& pi_b = (b == 1) ? pi1 : pi0;
        const std::vector<Value>& pi_b_inv = (b == 1) ? pi1_inv : pi0_inv;

        // Difference set of the two worlds' oracles, both directions.
        auto differs = [&](Value d, Value x) {
            return d == 1 ? pi0[x] != pi1[x] : pi0_inv[x] != pi1_inv[x];
        };

        if (compiled) {
            const auto& cc = *compiled;
            Value v = 0;
            for (const auto& op : cc.stages[0]) {
                if (want_mass && op.is_oracle &&
                    differs(cc.layout.field(v, cc.d_idx), cc.layout.field(v, cc.x_idx))) {
                    out.mass_sum += 1.0;
                }
                v = cc.apply(v, op, pi0, pi0_inv);
            }
            if (!stop_after_stage0) {
                v = cc.layout.with_field(v, cc.s_idx, s);
                v = cc.layout.with_field(v, cc.sp_idx, sp);
                for (const auto& op : cc.stages[1]) {
                    v = cc.apply(v, op, pi_b, pi_b_inv);
                }
                const int w_shift = cc.layout.shift(cc.w_idx) + cc.layout.width(cc.w_idx) - 1;
                out.p = static_cast<double>((v >> w_shift) & 1);
            }
            return out;
        }

        std::vector<FieldSource> sources = {FieldSource::from_call(), FieldSource::from_call(),
                                            FieldSource::from_call()};
        auto diff_pred = [&](Value packed) {
            Value x = (packed >> cfg.n) & ((Value{1} << cfg.n) - 1);
            Value d = packed >> (2 * cfg.n);
            return differs(d, x);
        };

        RunContext ctx{QState(layout)};
        std::map<std::string, OracleBinding> slots;
        slots["perm"] = OracleBinding{make_perm_pm(pi0, cfg.n, "perm0"), sources};
        ctx.slots = &slots;
        if (want_mass) {
            ctx.pre_query = [&](const std::string&, int, RunContext& c,
                                const std::vector<ResolvedField>& fields) {
                out.mass_sum += predicate_mass(c.state, fields, diff_pred);
            };
        }
        execute_stage(ctx, program.stages[0]);
        if (stop_after_stage0) {
            return out;
        }
        ctx.pre_query = nullptr;
        xor_constant(ctx.state, "S", s);
        xor_constant(ctx.state, "Sp", sp);
        std::map<std::string, OracleBinding> slots1;
        slots1["perm"] = OracleBinding{make_perm_pm(pi_b, cfg.n, "perm_b"), sources};
        ctx.slots = &slots1;
        execute_stage(ctx, program.stages[1]);
        out.p = prob_top_bit_one(ctx.state, program.output_register);
        return out;
    }
};

template <typename Fn>
void for_each_branch(int n, Fn&& fn) {
    const Value domain = Value{1} << n;
    std::vector<Value> pi0(domain);
    for (Value i = 0; i < domain; ++i) {
        pi0[i] = i;
    }
    do {
        for (Value s = 0; s < domain; ++s) {
            for (Value sp = 0; sp < domain; ++sp) {
                fn(pi0, s, sp);
            }
        }
    } while (std::next_permutation(pi0.begin(), pi0.end()));
}

double branch_count(int n) {
    double fact = 1.0;
    for (Value i = 2; i <= (Value{1} << n); ++i) {
        fact *= static_cast<double>(i);
    }
    const double pairs = std::ldexp(1.0, 2 * n);
    return fact * pairs;
}

}  // namespace

AdversaryProgram build_abkh_random_adversary(const AbkhConfig& cfg) {
    AbkhShape shape(cfg);
    SplitMix64 rng(cfg.seed);
    AdversaryProgram prog;
    prog.owned = shape.regs;
    std::vector<std::string> u_regs = {"W", "D", "X", "Y"};
    const int dim = 1 << (2 + 2 * cfg.n);

    auto random_classical_step = [&]() {
        auto table = random_permutation_table(rng, Value{1} << (2 + 2 * cfg.n));
        auto fn = [table](Value v) { return table[v]; };
        auto perm = ClassicalPermutation::from_function(
            "scramble", {{"W", 1}, {"D", 1}, {"X", cfg.n}, {"Y", cfg.n}}, 4, fn);
        return ClassicalStep{std::move(perm), u_regs};
    };

    Stage s0;
    for (int j = 0; j < cfg.q0; ++j) {
        if (cfg.classical_only) {
            s0.steps.push_back(random_classical_step());
        } else {
            s0.steps.push_back(LocalUnitaryStep{u_regs, random_unitary(rng, dim)});
        }
        s0.steps.push_back(OracleCallStep{"perm", {"D", "X", "Y"}});
    }
    Stage s1;
    for (int j = 0; j < cfg.q1; ++j) {
        // Mix the disclosed points in before querying.
        if (rng.next_below(2) == 0) {
            s1.steps.push_back(make_xor_copy_step("S", "X", cfg.n));
        } else {
            s1.steps.push_back(make_xor_copy_step("Sp", "X", cfg.n));
        }
        if (cfg.classical_only) {
            s1.steps.push_back(random_classical_step());
        } else {
            s1.steps.push_back(LocalUnitaryStep{u_regs, random_unitary(rng, dim)});
        }
        s1.steps.push_back(OracleCallStep{"perm", {"D", "X", "Y"}});
    }
    s1.steps.push_back(make_equality_flip_step("W", 1, "Y", "S", cfg.n));
    prog.stages = {std::move(s0), std::move(s1)};
    prog.validate();
    return prog;
}

AdversaryProgram build_abkh_table_guesser() {
    const int n = 2;
    AdversaryProgram prog;
    prog.owned = {{"W", 1}, {"D", 1}, {"X", n},  {"Y", n},  {"S", n},
                  {"Sp", n}, {"T0", n}, {"T1", n}, {"T2", n}, {"T3", n}};

    Stage s0;
    s0.steps.push_back(make_xor_constant_step("D", 1, 1));
    const std::array<std::string, 4> t_regs = {"T0", "T1", "T2", "T3"};
    Value prev = 0;
    for (Value x = 0; x < 4; ++x) {
        s0.steps.push_back(make_xor_constant_step("X", n, prev ^ x));
        s0.steps.push_back(OracleCallStep{"perm", {"D", "X", "Y"}});
        s0.steps.push_back(make_swap_registers_step("Y", t_regs[x], n));
        prev = x;
    }
    s0.steps.push_back(make_xor_constant_step("X", n, prev));  // back to zero

    Stage s1;
    s1.steps.push_back(make_xor_copy_step("S", "X", n));
    s1.steps.push_back(OracleCallStep{"perm", {"D", "X", "Y"}});
    // Flip W unless Y matches the recorded value T[S].
    auto fn = [](Value v) {
        Value t3 = v & 3;
        Value t2 = (v >> 2) & 3;
        Value t1 = (v >> 4) & 3;
        Value t0 = (v >> 6) & 3;
        Value y = (v >> 8) & 3;
        Value s = (v >> 10) & 3;
        Value w = v >> 12;
        const Value recorded = s == 0 ? t0 : s == 1 ? t1 : s == 2 ? t2 : t3;
        if (y != recorded) {
            w ^= 1;
        }
        return (((((w << 2 | s) << 2 | y) << 2 | t0) << 2 | t1) << 2 | t2) << 2 | t3;
    };
    auto perm = ClassicalPermutation::from_function(
        "mismatch_flip",
        {{"W", 1}, {"S", n}, {"Y", n}, {"T0", n}, {"T1", n}, {"T2", n}, {"T3", n}}, 7, fn, fn);
    s1.steps.push_back(ClassicalStep{std::move(perm), {"W", "S", "Y", "T0", "T1", "T2", "T3"}});
    prog.stages = {std::move(s0), std::move(s1)};
    prog.validate();
    return prog;
}

double run_abkh(const AbkhConfig& cfg, const AdversaryProgram& program, int b) {
    AbkhShape shape(cfg);  // validates n
    AbkhRunner runner(cfg, program);
    double p = 0.0;
    for_each_branch(cfg.n, [&](const std::vector<Value>& pi0, Value s, Value sp) {
        p += runner.run_branch(b, pi0, s, sp, false, false).p;
    });
    return p / branch_count(cfg.n);
}

double run_abkh_adv_ow(const AbkhConfig& cfg, const AdversaryProgram& program) {
    AbkhShape shape(cfg);
    AbkhRunner runner(cfg, program);
    const int q0 = program.stage_query_count(0, "perm");
    if (q0 == 0) {
        return 0.0;
    }
    double mass = 0.0;
    for_each_branch(cfg.n, [&](const std::vector<Value>& pi0, Value s, Value sp) {
        mass += runner.run_branch(0, pi0, s, sp, true, true).mass_sum;
    });
    return mass / (branch_count(cfg.n) * q0);
}

}  // namespace o2hlab
