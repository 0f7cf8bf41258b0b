#include "o2hlab/games.hpp"

#include <stdexcept>

namespace o2hlab {

namespace {

struct U1Shape {
    Unruh1Config cfg;
    int h_bits, hh_bits;
    std::vector<RegisterLayout::Register> regs;

    explicit U1Shape(const Unruh1Config& c) : cfg(c) {
        if (cfg.l < 1 || cfg.k < 0 || cfg.n_out < 1) {
            throw std::invalid_argument("bad unruh1 sizes");
        }
        h_bits = cfg.n_out << (cfg.l + cfg.k);
        hh_bits = cfg.n_out << cfg.k;
        regs = {{"W", 1}, {"X", cfg.l}};
        if (cfg.k > 0) {
            regs.push_back({"M", cfg.k});
        }
        regs.push_back({"Y", cfg.n_out});
        regs.push_back({"B", cfg.n_out});
        if (cfg.k > 0) {
            regs.push_back({"mcopy", cfg.k});
        }
        regs.push_back({"Hreg", h_bits});
        regs.push_back({"hreg", hh_bits});
        regs.push_back({"xreg", cfg.l});
        regs.push_back({"B1reg", cfg.n_out});
    }

    std::vector<std::string> hadamard_init() const {
        return {"Hreg", "hreg", "xreg", "B1reg"};
    }

    std::vector<FieldSource> hash_plain_sources() const {
        std::vector<FieldSource> s = {FieldSource::from_call()};
        if (cfg.k > 0) {
            s.push_back(FieldSource::from_call());
        }
        s.push_back(FieldSource::from_call());
        s.push_back(FieldSource::state_reg("Hreg"));
        return s;
    }
    std::vector<FieldSource> hash0_sources() const {
        auto s = hash_plain_sources();
        s.push_back(FieldSource::state_reg("hreg"));
        s.push_back(FieldSource::state_reg("xreg"));
        return s;
    }
    std::vector<FieldSource> hash1_sources() const {
        auto s = hash_plain_sources();
        s.push_back(FieldSource::state_reg("B1reg"));
        s.push_back(FieldSource::state_reg("xreg"));
        if (cfg.k > 0) {
            s.push_back(FieldSource::state_reg("mcopy"));
        }
        return s;
    }

    // B <- B xor H[xreg || mcopy].
    Step hash_point_into_b() const {
        const int l = cfg.l;
        const int k = cfg.k;
        const int n = cfg.n_out;
        const int hb = h_bits;
        auto fn = [l, k, n, hb](Value v) {
            Value m = k > 0 ? (v & ((Value{1} << k) - 1)) : 0;
            Value rest = k > 0 ? (v >> k) : v;
            Value x = rest & ((Value{1} << l) - 1);
            rest >>= l;
            Value h = rest & ((Value{1} << hb) - 1);
            Value b = rest >> hb;
            b ^= table_get(h, (x << k) | m, n);
            Value out = (((b << hb) | h) << l) | x;
            if (k > 0) {
                out = (out << k) | m;
            }
            return out;
        };
        std::vector<ClassicalPermutation::Field> fields = {{"B", n}, {"Hreg", hb}, {"xreg", l}};
        std::vector<std::string> attach = {"B", "Hreg", "xreg"};
        if (k > 0) {
            fields.push_back({"mcopy", k});
            attach.push_back("mcopy");
        }
        auto perm = ClassicalPermutation::from_function("b_from_hash", std::move(fields),
                                                        static_cast<int>(attach.size()), fn, fn);
        return ClassicalStep{std::move(perm), attach};
    }

    // The stage boundary: record m, hand the adversary x and B_b.
    AdversaryProgram wrap(const AdversaryProgram& user, int b) const {
        if (user.stages.size() != 2) {
            throw std::invalid_argument("unruh1 adversary needs exactly two stages");
        }
        AdversaryProgram prog = user;
        prog.owned = regs;
        std::vector<Step> boundary;
        if (cfg.k > 0) {
            boundary.push_back(make_xor_copy_step("M", "mcopy", cfg.k));
        }
        if (b == 0) {
            boundary.push_back(hash_point_into_b());
        } else {
            boundary.push_back(make_xor_copy_step("B1reg", "B", cfg.n_out));
        }
        boundary.push_back(make_xor_copy_step("xreg", "X", cfg.l));
        auto& steps = prog.stages[1].steps;
        steps.insert(steps.begin(), boundary.begin(), boundary.end());
        for (auto& stage : prog.stages) {
            stage.visible.clear();
        }
        return prog;
    }
};

double run_u1_core(const U1Shape& shape, const AdversaryProgram& wrapped,
                   const std::map<std::string, OracleBinding>& slots,
                   const std::function<void(const std::string&, int, RunContext&,
                                            const std::vector<ResolvedField>&)>& pre_query) {
    RunContext ctx{QState(RegisterLayout(shape.regs))};
    for (const auto& reg : shape.hadamard_init()) {
        apply_hadamard(ctx.state, reg);
    }
    ctx.slots = &slots;
    if (pre_query) {
        ctx.pre_query = pre_query;
    }
    execute_program(ctx, wrapped);
    return prob_top_bit_one(ctx.state, wrapped.output_register);
}

}  // namespace

AdversaryProgram build_unruh1_random_adversary(const Unruh1Config& cfg) {
    U1Shape shape(cfg);
    SplitMix64 rng(cfg.seed);

    std::vector<RegisterLayout::Register> owned = {{"W", 1}, {"X", cfg.l}};
    if (cfg.k > 0) {
        owned.push_back({"M", cfg.k});
    }
    owned.push_back({"Y", cfg.n_out});
    owned.push_back({"B", cfg.n_out});

    std::vector<std::string> call_regs = {"X"};
    if (cfg.k > 0) {
        call_regs.push_back("M");
    }
    call_regs.push_back("Y");

    std::vector<std::string> u0_regs = {"W", "X"};
    if (cfg.k > 0) {
        u0_regs.push_back("M");
    }
    u0_regs.push_back("Y");
    std::vector<std::string> u1_regs = u0_regs;
    u1_regs.push_back("B");
    const int dim0 = 1 << (1 + cfg.l + cfg.k + cfg.n_out);
    const int dim1 = dim0 << cfg.n_out;

    AdversaryProgram prog;
    prog.owned = owned;
    Stage s0;
    for (int j = 0; j < cfg.q0; ++j) {
        s0.steps.push_back(LocalUnitaryStep{u0_regs, random_unitary(rng, dim0)});
        s0.steps.push_back(OracleCallStep{"hash0", call_regs});
    }
    s0.steps.push_back(LocalUnitaryStep{u0_regs, random_unitary(rng, dim0)});
    Stage s1;
    for (int j = 0; j < cfg.q1; ++j) {
        s1.steps.push_back(LocalUnitaryStep{u1_regs, random_unitary(rng, dim1)});
        s1.steps.push_back(OracleCallStep{"hash1", call_regs});
    }
    s1.steps.push_back(LocalUnitaryStep{u1_regs, random_unitary(rng, dim1)});
    prog.stages = {std::move(s0), std::move(s1)};
    prog.validate();
    return prog;
}

double run_unruh1(const Unruh1Config& cfg, const AdversaryProgram& program, int b) {
    U1Shape shape(cfg);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_ro_split(cfg.l, cfg.k, cfg.n_out),
                                   shape.hash_plain_sources()};
    slots["hash1"] = slots["hash0"];
    return run_u1_core(shape, shape.wrap(program, b), slots, nullptr);
}

double run_unruh1_hybrid(const Unruh1Config& cfg, const AdversaryProgram& program, int a, int b,
                         int c) {
    U1Shape shape(cfg);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_ro0(a, cfg.l, cfg.k, cfg.n_out), shape.hash0_sources()};
    slots["hash1"] = OracleBinding{make_ro1(c, cfg.l, cfg.k, cfg.n_out), shape.hash1_sources()};
    return run_u1_core(shape, shape.wrap(program, b), slots, nullptr);
}

double run_unruh1_ow(const Unruh1Config& cfg, const AdversaryProgram& program) {
    U1Shape shape(cfg);
    const int q1 = program.stage_query_count(1, "hash1");
    if (q1 == 0) {
        return 0.0;
    }
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_ro_split(cfg.l, cfg.k, cfg.n_out),
                                   shape.hash_plain_sources()};
    slots["hash1"] = slots["hash0"];

    auto layout = RegisterLayout(shape.regs);
    const int x_idx = layout.index_of("xreg");
    const int m_idx = cfg.k > 0 ? layout.index_of("mcopy") : -1;
    double total = 0.0;
    auto pre = [&](const std::string& slot, int, RunContext& ctx,
                   const std::vector<ResolvedField>& fields) {
        if (slot != "hash1") {
            return;
        }
        // fields[0] is X, fields[1] is M when present.
        std::vector<ResolvedField> probe = {fields[0]};
        ResolvedField xs;
        xs.field = {"xs", cfg.l};
        xs.from_state = true;
        xs.state_reg = x_idx;
        probe.push_back(xs);
        if (cfg.k > 0) {
            probe.push_back(fields[1]);
            ResolvedField ms;
            ms.field = {"ms", cfg.k};
            ms.from_state = true;
            ms.state_reg = m_idx;
            probe.push_back(ms);
        }
        const int l = cfg.l;
        const int k = cfg.k;
        total += predicate_mass(ctx.state, probe, [l, k](Value packed) {
            if (k > 0) {
                Value ms = packed & ((Value{1} << k) - 1);
                Value m = (packed >> k) & ((Value{1} << k) - 1);
                Value xs = (packed >> (2 * k)) & ((Value{1} << l) - 1);
                Value x = packed >> (2 * k + l);
                return x == xs && m == ms;
            }
            Value xs = packed & ((Value{1} << l) - 1);
            Value x = packed >> l;
            return x == xs;
        });
    };
    run_u1_core(shape, shape.wrap(program, 1), slots, pre);
    return total / q1;
}

namespace {

double run_u1_pair_ow(const U1Shape& shape, const AdversaryProgram& wrapped,
                      const std::map<std::string, OracleBinding>& slots,
                      const ClassicalPermutation& p, const ClassicalPermutation& p_prime,
                      const std::string& slot_name, int q) {
    if (q == 0) {
        return 0.0;
    }
    auto diff = difference_set(p, p_prime);
    double total = 0.0;
    auto pre = [&](const std::string& slot, int, RunContext& ctx,
                   const std::vector<ResolvedField>& fields) {
        if (slot == slot_name) {
            total += predicate_mass(ctx.state, fields, diff.differs);
        }
    };
    run_u1_core(shape, wrapped, slots, pre);
    return total / q;
}

}  // namespace

double run_unruh1_stage0_adv_ow(const Unruh1Config& cfg, const AdversaryProgram& program) {
    U1Shape shape(cfg);
    auto p = make_ro0(0, cfg.l, cfg.k, cfg.n_out);
    auto pp = make_ro0(1, cfg.l, cfg.k, cfg.n_out);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{p, shape.hash0_sources()};
    slots["hash1"] = OracleBinding{make_ro1(0, cfg.l, cfg.k, cfg.n_out), shape.hash1_sources()};
    return run_u1_pair_ow(shape, shape.wrap(program, 0), slots, p, pp, "hash0",
                          program.stage_query_count(0, "hash0"));
}

double run_unruh1_stage1_adv_ow(const Unruh1Config& cfg, const AdversaryProgram& program) {
    U1Shape shape(cfg);
    auto p = make_ro1(0, cfg.l, cfg.k, cfg.n_out);
    auto pp = make_ro1(1, cfg.l, cfg.k, cfg.n_out);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_ro0(0, cfg.l, cfg.k, cfg.n_out), shape.hash0_sources()};
    slots["hash1"] = OracleBinding{p, shape.hash1_sources()};
    return run_u1_pair_ow(shape, shape.wrap(program, 1), slots, p, pp, "hash1",
                          program.stage_query_count(1, "hash1"));
}

}  // namespace o2hlab
