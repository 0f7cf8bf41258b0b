#include "o2hlab/games.hpp"

#include <stdexcept>

namespace o2hlab {

namespace {

struct U2Shape {
    Unruh2Config cfg;
    int h_bits;
    std::vector<RegisterLayout::Register> regs;

    explicit U2Shape(const Unruh2Config& c) : cfg(c) {
        if (cfg.l < 1 || cfg.n_out < 1 || cfg.r < 1) {
            throw std::invalid_argument("bad unruh2 sizes");
        }
        if (cfg.family.size() != (std::size_t{1} << cfg.l)) {
            throw std::invalid_argument("unruh2 family needs one distribution per message");
        }
        for (const auto& d : cfg.family) {
            if (d.domain_width() != cfg.l || d.seed_width() != cfg.r) {
                throw std::invalid_argument("unruh2 family widths do not match the game");
            }
        }
        h_bits = cfg.n_out << cfg.l;
        regs = {{"W", 1},      {"X", cfg.l},    {"Y", cfg.n_out}, {"R", cfg.r},
                {"Hreg", h_bits}, {"Breg", cfg.n_out}, {"Vreg", cfg.l},  {"Xsreg", cfg.l}};
    }

    std::vector<FieldSource> hash_sources() const {
        return {FieldSource::from_call(), FieldSource::from_call(),
                FieldSource::state_reg("Hreg")};
    }
    std::vector<FieldSource> samp_sources() const {
        return {FieldSource::from_call(),        FieldSource::from_call(),
                FieldSource::state_reg("Hreg"),  FieldSource::state_reg("Breg"),
                FieldSource::state_reg("Vreg"),  FieldSource::state_reg("R"),
                FieldSource::state_reg("Xsreg")};
    }
    std::vector<FieldSource> fro1_sources() const {
        return {FieldSource::from_call(), FieldSource::from_call(),
                FieldSource::state_reg("Hreg"), FieldSource::state_reg("Breg"),
                FieldSource::state_reg("Xsreg")};
    }

    // The adversary learns the sampled point after the sampling call.
    AdversaryProgram wrap(const AdversaryProgram& user, bool fourier) const {
        if (user.stages.size() != 3) {
            throw std::invalid_argument("unruh2 adversary needs three stages");
        }
        AdversaryProgram prog = user;
        prog.owned = regs;
        auto& steps = prog.stages[2].steps;
        steps.insert(steps.begin(), make_xor_copy_step("Xsreg", "X", cfg.l));
        if (fourier) {
            for (auto& stage : prog.stages) {
                std::vector<Step> out;
                for (auto& step : stage.steps) {
                    const auto* call = std::get_if<OracleCallStep>(&step);
                    if (call) {
                        HadamardStep had{{call->registers.back()}};
                        out.push_back(had);
                        out.push_back(std::move(step));
                        out.push_back(had);
                    } else {
                        out.push_back(std::move(step));
                    }
                }
                stage.steps = std::move(out);
            }
        }
        for (auto& stage : prog.stages) {
            stage.visible.clear();
        }
        return prog;
    }
};

double run_u2_core(const U2Shape& shape, const AdversaryProgram& wrapped,
                   const std::map<std::string, OracleBinding>& slots, bool fourier,
                   const std::function<void(const std::string&, int, RunContext&,
                                            const std::vector<ResolvedField>&)>& pre_query) {
    RunContext ctx{QState(RegisterLayout(shape.regs))};
    apply_hadamard(ctx.state, "R");
    if (!fourier) {
        apply_hadamard(ctx.state, "Hreg");
        apply_hadamard(ctx.state, "Breg");
    }
    ctx.slots = &slots;
    if (pre_query) {
        ctx.pre_query = pre_query;
    }
    execute_program(ctx, wrapped);
    return prob_top_bit_one(ctx.state, wrapped.output_register);
}

}  // namespace

double Unruh2Config::family_min_entropy() const {
    double mu = 1e9;
    for (const auto& d : family) {
        mu = std::min(mu, d.min_entropy());
    }
    return mu;
}

double Unruh2Config::family_collision_entropy() const {
    double k = 1e9;
    for (const auto& d : family) {
        k = std::min(k, d.collision_entropy());
    }
    return k;
}

AdversaryProgram build_unruh2_random_adversary(const Unruh2Config& cfg) {
    SplitMix64 rng(cfg.seed);
    std::vector<RegisterLayout::Register> owned = {
        {"W", 1}, {"X", cfg.l}, {"Y", cfg.n_out}, {"R", cfg.r}};
    std::vector<std::string> u0 = {"W", "X", "Y"};
    std::vector<std::string> u1 = {"W", "X", "Y", "R"};
    const int dim0 = 1 << (1 + cfg.l + cfg.n_out);
    const int dim1 = dim0 << cfg.r;

    AdversaryProgram prog;
    prog.owned = owned;
    Stage s0;
    s0.visible = u0;
    for (int j = 0; j < cfg.q0; ++j) {
        s0.steps.push_back(LocalUnitaryStep{u0, random_unitary(rng, dim0)});
        s0.steps.push_back(OracleCallStep{"hash0", {"X", "Y"}});
    }
    s0.steps.push_back(LocalUnitaryStep{u0, random_unitary(rng, dim0)});
    Stage samp;
    samp.visible = u0;
    samp.steps.push_back(OracleCallStep{"samp", {"X", "Y"}});
    Stage s1;
    s1.visible = u1;
    for (int j = 0; j < cfg.q1; ++j) {
        s1.steps.push_back(LocalUnitaryStep{u1, random_unitary(rng, dim1)});
        s1.steps.push_back(OracleCallStep{"hash1", {"X", "Y"}});
    }
    s1.steps.push_back(LocalUnitaryStep{u1, random_unitary(rng, dim1)});
    prog.stages = {std::move(s0), std::move(samp), std::move(s1)};
    prog.validate();
    return prog;
}

double run_unruh2(const Unruh2Config& cfg, const AdversaryProgram& program, int b) {
    U2Shape shape(cfg);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_ro(cfg.l, cfg.n_out), shape.hash_sources()};
    slots["hash1"] = slots["hash0"];
    slots["samp"] = OracleBinding{make_samp(b, cfg.l, cfg.n_out, cfg.family, cfg.r),
                                  shape.samp_sources()};
    return run_u2_core(shape, shape.wrap(program, false), slots, false, nullptr);
}

double run_unruh2_hybrid(const Unruh2Config& cfg, const AdversaryProgram& program, int a, int b,
                         int c) {
    U2Shape shape(cfg);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_fro(cfg.l, cfg.n_out), shape.hash_sources()};
    slots["samp"] = OracleBinding{make_fsamp(a, b, cfg.l, cfg.n_out, cfg.family, cfg.r),
                                  shape.samp_sources()};
    slots["hash1"] = OracleBinding{make_fro1(c, cfg.l, cfg.n_out), shape.fro1_sources()};
    return run_u2_core(shape, shape.wrap(program, true), slots, true, nullptr);
}

double run_unruh2_ow(const Unruh2Config& cfg, const AdversaryProgram& program) {
    U2Shape shape(cfg);
    const int q1 = program.stage_query_count(2, "hash1");
    if (q1 == 0) {
        return 0.0;
    }
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_ro(cfg.l, cfg.n_out), shape.hash_sources()};
    slots["hash1"] = slots["hash0"];
    slots["samp"] = OracleBinding{make_samp(1, cfg.l, cfg.n_out, cfg.family, cfg.r),
                                  shape.samp_sources()};

    auto layout = RegisterLayout(shape.regs);
    const int xs_idx = layout.index_of("Xsreg");
    double total = 0.0;
    const int l = cfg.l;
    auto pre = [&](const std::string& slot, int, RunContext& ctx,
                   const std::vector<ResolvedField>& fields) {
        if (slot != "hash1") {
            return;
        }
        std::vector<ResolvedField> probe = {fields[0]};
        ResolvedField xs;
        xs.field = {"xs", l};
        xs.from_state = true;
        xs.state_reg = xs_idx;
        probe.push_back(xs);
        total += predicate_mass(ctx.state, probe, [l](Value packed) {
            return (packed >> l) == (packed & ((Value{1} << l) - 1));
        });
    };
    run_u2_core(shape, shape.wrap(program, false), slots, false, pre);
    return total / q1;
}

namespace {

double run_u2_pair_ow(const U2Shape& shape, const AdversaryProgram& wrapped,
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
    run_u2_core(shape, wrapped, slots, true, pre);
    return total / q;
}

}  // namespace

double run_unruh2_samp_adv_ow(const Unruh2Config& cfg, const AdversaryProgram& program) {
    U2Shape shape(cfg);
    auto p = make_fsamp(0, 0, cfg.l, cfg.n_out, cfg.family, cfg.r);
    auto pp = make_fsamp(1, 0, cfg.l, cfg.n_out, cfg.family, cfg.r);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_fro(cfg.l, cfg.n_out), shape.hash_sources()};
    slots["samp"] = OracleBinding{p, shape.samp_sources()};
    slots["hash1"] = OracleBinding{make_fro1(0, cfg.l, cfg.n_out), shape.fro1_sources()};
    return run_u2_pair_ow(shape, shape.wrap(program, true), slots, p, pp, "samp", 1);
}

double run_unruh2_stage1_adv_ow(const Unruh2Config& cfg, const AdversaryProgram& program) {
    U2Shape shape(cfg);
    auto p = make_fro1(1, cfg.l, cfg.n_out);
    auto pp = make_fro1(0, cfg.l, cfg.n_out);
    std::map<std::string, OracleBinding> slots;
    slots["hash0"] = OracleBinding{make_fro(cfg.l, cfg.n_out), shape.hash_sources()};
    slots["samp"] = OracleBinding{make_fsamp(0, 1, cfg.l, cfg.n_out, cfg.family, cfg.r),
                                  shape.samp_sources()};
    slots["hash1"] = OracleBinding{p, shape.fro1_sources()};
    return run_u2_pair_ow(shape, shape.wrap(program, true), slots, p, pp, "hash1",
                          program.stage_query_count(2, "hash1"));
}

}  // namespace o2hlab
