#include "o2hlab/games.hpp"

#include <stdexcept>

namespace o2hlab {

namespace {

void check_pz_shapes(const PzEnvironment& env, const AdversaryProgram& program) {
    if (static_cast<int>(program.stages.size()) != env.n + 1) {
        throw std::invalid_argument("adversary stage count does not match the environment");
    }
    if (env.init.empty()) {
        throw std::invalid_argument("environment has no init branches");
    }
    const std::size_t entries = std::size_t{1} << env.l;
    for (const auto& br : env.init) {
        if (br.h0.size() != entries || br.h1.size() != entries) {
            throw std::invalid_argument("init hash tables have the wrong size");
        }
    }
}

std::vector<Value> apply_repro(std::vector<Value> table,
                               const std::vector<std::pair<Value, Value>>& repro) {
    for (const auto& [point, value] : repro) {
        table.at(point) = value;
    }
    return table;
}

// Direct route: the hash tables stay classical; each stage wires the slot to
// the xor oracle of the current table.
struct DirectRecursion {
    const PzEnvironment& env;
    const AdversaryProgram& program;
    int b;
    double p = 0.0;
    std::vector<double> stage_mass_sums;  // b = 1 only

    void descend(QState state, int stage, double weight, Value s, const std::vector<Value>& h0,
                 std::vector<Value> h1) {
        std::map<std::string, OracleBinding> slots;
        slots["hash"] = OracleBinding{
            make_xor_oracle(b == 1 ? h1 : h0, env.l, env.m, "hash_direct"),
            {FieldSource::from_call(), FieldSource::from_call()}};

        RunContext ctx{std::move(state)};
        ctx.slots = &slots;
        if (b == 1) {
            ctx.pre_query = [&](const std::string&, int, RunContext& c,
                                const std::vector<ResolvedField>& fields) {
                // Mass on {X : H0(X) != H1(X)} under the current tables.
                double mass = predicate_mass(c.state, {fields[0]}, [&](Value x) {
                    return h0[x] != h1[x];
                });
                stage_mass_sums[static_cast<std::size_t>(stage)] += weight * mass;
            };
        }
        execute_stage(ctx, program.stages[static_cast<std::size_t>(stage)]);

        if (stage == env.n) {
            p += weight * prob_top_bit_one(ctx.state, program.output_register);
            return;
        }
        auto branches = measure_branches(ctx.state, std::vector<std::string>{"W"});
        for (auto& br : branches) {
            for (const auto& outcome : env.orac(s, br.value)) {
                QState next = br.state;
                xor_constant(next, "X", outcome.x);
                descend(std::move(next), stage + 1, weight * br.probability * outcome.weight, s,
                        h0, apply_repro(h1, outcome.repro));
            }
        }
    }
};

// Reduction route: the tables live in state registers and the oracle pair is
// fixed; reprogramming becomes a constant xor on the H1 register.
struct O2hRecursion {
    const PzEnvironment& env;
    const AdversaryProgram& program;
    int b;
    const ClassicalPermutation& p_reads_h1;
    const ClassicalPermutation& p_reads_h0;
    const DifferencePredicate& diff;
    double p = 0.0;
    std::vector<double> masses;  // per global query, b = 1 only

    void descend(QState state, int stage, int query_offset, double weight, Value s,
                 std::vector<Value> h1) {
        std::map<std::string, OracleBinding> slots;
        slots["hash"] =
            OracleBinding{b == 1 ? p_reads_h1 : p_reads_h0,
                          {FieldSource::from_call(), FieldSource::from_call(),
                           FieldSource::state_reg("H0"), FieldSource::state_reg("H1")}};

        RunContext ctx{std::move(state)};
        ctx.slots = &slots;
        if (b == 1) {
            ctx.pre_query = [&](const std::string&, int j, RunContext& c,
                                const std::vector<ResolvedField>& fields) {
                masses[static_cast<std::size_t>(query_offset + j - 1)] +=
                    weight * predicate_mass(c.state, fields, diff.differs);
            };
        }
        execute_stage(ctx, program.stages[static_cast<std::size_t>(stage)]);
        const int next_offset =
            query_offset + program.stage_query_count(stage, "hash");

        if (stage == env.n) {
            p += weight * prob_top_bit_one(ctx.state, program.output_register);
            return;
        }
        auto branches = measure_branches(ctx.state, std::vector<std::string>{"W"});
        for (auto& br : branches) {
            for (const auto& outcome : env.orac(s, br.value)) {
                QState next = br.state;
                xor_constant(next, "X", outcome.x);
                auto h1_next = apply_repro(h1, outcome.repro);
                Value delta = pack_table(h1_next, env.m) ^ pack_table(h1, env.m);
                if (delta != 0) {
                    xor_constant(next, "H1", delta);
                }
                descend(std::move(next), stage + 1, next_offset,
                        weight * br.probability * outcome.weight, s, std::move(h1_next));
            }
        }
    }
};

}  // namespace

PzEnvironment build_pz_environment(std::uint64_t seed, int l, int m, int n) {
    SplitMix64 rng(seed);
    PzEnvironment env;
    env.l = l;
    env.m = m;
    env.n = n;

    const int init_branches = 1 + static_cast<int>(rng.next_below(2));
    for (int i = 0; i < init_branches; ++i) {
        PzEnvironment::InitBranch br;
        br.weight = 1.0 / init_branches;
        br.s = rng.next_below(4);
        br.x0 = rng.next_below(Value{1} << l);
        br.h0 = random_function_table(rng, Value{1} << l, m);
        switch (rng.next_below(3)) {
            case 0:
                br.h1 = br.h0;
                break;
            case 1: {
                br.h1 = br.h0;
                Value x = rng.next_below(Value{1} << l);
                br.h1[x] ^= 1 + rng.next_below((Value{1} << m) - 1);
                break;
            }
            default:
                br.h1 = random_function_table(rng, Value{1} << l, m);
                break;
        }
        env.init.push_back(std::move(br));
    }

    // A fixed randomized response map: outcomes depend deterministically on a
    // per-(s, y) seed so the environment object is a value.
    const std::uint64_t orac_seed = rng.next();
    const int ll = l;
    const int mm = m;
    env.orac = [orac_seed, ll, mm](Value s, Value y) {
        SplitMix64 local(orac_seed ^ (s * 0x9E37u) ^ (y * 0x79B9u));
        std::vector<PzEnvironment::OracOutcome> outcomes;
        const int count = local.next_below(4) == 0 ? 2 : 1;
        for (int i = 0; i < count; ++i) {
            PzEnvironment::OracOutcome out;
            out.weight = 1.0 / count;
            out.x = local.next_below(Value{1} << ll);
            const int points = static_cast<int>(local.next_below(2));
            for (int j = 0; j < points; ++j) {
                out.repro.emplace_back(local.next_below(Value{1} << ll),
                                       local.next_below(Value{1} << mm));
            }
            outcomes.push_back(std::move(out));
        }
        return outcomes;
    };
    return env;
}

AdversaryProgram build_pz_random_adversary(std::uint64_t seed, int l, int m,
                                           const std::vector<int>& q) {
    std::vector<RegisterLayout::Register> owned = {{"W", 1}, {"X", l}, {"Y", m}};
    return build_random_adversary(seed, owned, q, "hash", {"X", "Y"}, {"W", "X", "Y"});
}

PzRun run_pz_direct(const PzEnvironment& env, const AdversaryProgram& program) {
    check_pz_shapes(env, program);
    PzRun result;
    result.stage_adv_ow.assign(static_cast<std::size_t>(env.n + 1), 0.0);

    RegisterLayout layout(program.owned);
    for (int b = 0; b <= 1; ++b) {
        DirectRecursion rec{env, program, b};
        rec.stage_mass_sums.assign(static_cast<std::size_t>(env.n + 1), 0.0);
        for (const auto& init : env.init) {
            QState state(layout);
            xor_constant(state, "X", init.x0);
            rec.descend(std::move(state), 0, init.weight, init.s, init.h0, init.h1);
        }
        if (b == 0) {
            result.p0 = rec.p;
        } else {
            result.p1 = rec.p;
            for (int i = 0; i <= env.n; ++i) {
                const int qi = program.stage_query_count(i, "hash");
                result.stage_adv_ow[static_cast<std::size_t>(i)] =
                    qi == 0 ? 0.0 : rec.stage_mass_sums[static_cast<std::size_t>(i)] / qi;
            }
        }
    }
    return result;
}

PzO2hRun run_pz_o2h(const PzEnvironment& env, const AdversaryProgram& program) {
    check_pz_shapes(env, program);
    const int table_bits = env.m << env.l;

    std::vector<RegisterLayout::Register> regs = program.owned;
    regs.push_back({"H0", table_bits});
    regs.push_back({"H1", table_bits});
    RegisterLayout layout(regs);

    auto pair = make_pz_pair(env.l, env.m);
    auto diff = difference_set(pair.first, pair.second);

    PzO2hRun result;
    result.q = program.query_count("hash");
    result.masses.assign(static_cast<std::size_t>(result.q), 0.0);

    for (int b = 0; b <= 1; ++b) {
        O2hRecursion rec{env, program, b, pair.first, pair.second, diff};
        rec.masses.assign(static_cast<std::size_t>(result.q), 0.0);
        for (const auto& init : env.init) {
            QState state(layout);
            xor_constant(state, "X", init.x0);
            xor_constant(state, "H0", pack_table(init.h0, env.m));
            xor_constant(state, "H1", pack_table(init.h1, env.m));
            rec.descend(std::move(state), 0, 0, init.weight, init.s, init.h1);
        }
        if (b == 0) {
            result.p0 = rec.p;
        } else {
            result.p1 = rec.p;
            result.masses = rec.masses;
        }
    }
    double total = 0.0;
    for (double m : result.masses) {
        total += m;
    }
    result.adv_ow = result.q == 0 ? 0.0 : total / result.q;
    return result;
}

}  // namespace o2hlab
