#include "o2hlab/games.hpp"

#include <cmath>
#include <stdexcept>

namespace o2hlab {

namespace {

void execute_oracle_call(RunContext& ctx, const OracleCallStep& call) {
    if (!ctx.slots) {
        throw std::invalid_argument("oracle call with no wired slots");
    }
    auto it = ctx.slots->find(call.slot);
    if (it == ctx.slots->end()) {
        throw std::invalid_argument("oracle slot '" + call.slot + "' is not wired");
    }
    const OracleBinding& binding = it->second;
    const auto& fields = binding.perm.fields();
    if (binding.sources.size() != fields.size()) {
        throw std::invalid_argument("slot '" + call.slot + "' wiring does not cover every field");
    }

    const int j = ++ctx.calls_made[call.slot];

    if (ctx.schedules) {
        auto sit = ctx.schedules->find(call.slot);
        if (sit != ctx.schedules->end()) {
            for (const auto& [key, values] : sit->second) {
                ctx.bound[key] = values.at(static_cast<std::size_t>(j - 1));
            }
        }
    }

    // Resolve every field: call registers in order for FromCall fields,
    // named state registers, or current bound values.
    std::vector<ResolvedField> resolved(fields.size());
    std::vector<std::pair<std::string, Value>> bound_fields;
    std::vector<std::string> attach;  // free fields in order
    std::size_t next_call_reg = 0;
    const auto& layout = ctx.state.layout();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        resolved[i].field = fields[i];
        const FieldSource& src = binding.sources[i];
        switch (src.kind) {
            case FieldSource::FromCall: {
                if (next_call_reg >= call.registers.size()) {
                    throw std::invalid_argument("oracle call to '" + call.slot +
                                                "' lists too few registers");
                }
                const std::string& reg = call.registers[next_call_reg++];
                resolved[i].from_state = true;
                resolved[i].state_reg = layout.index_of(reg);
                attach.push_back(reg);
                break;
            }
            case FieldSource::StateRegister: {
                resolved[i].from_state = true;
                resolved[i].state_reg = layout.index_of(src.name);
                attach.push_back(src.name);
                break;
            }
            case FieldSource::BoundValue: {
                auto bit = ctx.bound.find(src.name);
                if (bit == ctx.bound.end()) {
                    throw std::invalid_argument("bound value '" + src.name + "' is not set");
                }
                resolved[i].from_state = false;
                resolved[i].value = bit->second;
                bound_fields.emplace_back(fields[i].name, bit->second);
                break;
            }
        }
    }
    if (next_call_reg != call.registers.size()) {
        throw std::invalid_argument("oracle call to '" + call.slot + "' lists too many registers");
    }

    if (ctx.pre_query) {
        ctx.pre_query(call.slot, j, ctx, resolved);
    }

    if (bound_fields.empty()) {
        apply_classical_permutation(ctx.state, binding.perm, attach);
    } else {
        BoundPermutation bp = bind_fields(binding.perm, bound_fields);
        apply_classical_permutation(ctx.state, bp.perm, attach);
        // Map updated field values back onto their bound keys.
        for (const auto& [field_name, value] : bp.updated) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i].name == field_name &&
                    binding.sources[i].kind == FieldSource::BoundValue) {
                    ctx.bound[binding.sources[i].name] = value;
                }
            }
        }
    }

    if (ctx.post_query) {
        ctx.post_query(call.slot, j, ctx);
    }
}

}  // namespace

void execute_step(RunContext& ctx, const Step& step) {
    if (const auto* u = std::get_if<LocalUnitaryStep>(&step)) {
        apply_local_unitary_unchecked(ctx.state, u->registers, u->matrix);
    } else if (const auto* c = std::get_if<ClassicalStep>(&step)) {
        apply_classical_permutation(ctx.state, c->perm, c->registers);
    } else if (const auto* o = std::get_if<OracleCallStep>(&step)) {
        execute_oracle_call(ctx, *o);
    } else if (const auto* h = std::get_if<HadamardStep>(&step)) {
        apply_hadamard(ctx.state, h->registers);
    }
}

void execute_stage(RunContext& ctx, const Stage& stage) {
    for (const auto& step : stage.steps) {
        execute_step(ctx, step);
    }
}

void execute_program(RunContext& ctx, const AdversaryProgram& program) {
    for (const auto& stage : program.stages) {
        execute_stage(ctx, stage);
    }
}

double predicate_mass(const QState& state, const std::vector<ResolvedField>& fields,
                      const std::function<bool(Value)>& predicate) {
    const auto& layout = state.layout();
    const auto& amps = state.amps();
    const std::size_t dim = layout.dim();
    double mass = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        Value packed = 0;
        for (const auto& f : fields) {
            Value v = f.from_state ? layout.field(i, f.state_reg) : f.value;
            packed = (packed << f.field.width) | v;
        }
        if (predicate(packed)) {
            mass += std::norm(amps(static_cast<Eigen::Index>(i)));
        }
    }
    return mass;
}

RunTrace run_o2h_experiment(
    const O2HExperiment& exp, bool use_prime, bool with_masses,
    const std::function<void(const std::string&, int, RunContext&)>& post_query) {
    if (exp.branches.empty()) {
        throw std::invalid_argument("experiment needs at least one branch");
    }
    const int q = exp.program.query_count(exp.o2h_slot);

    std::map<std::string, OracleBinding> slots = exp.context_slots;
    slots[exp.o2h_slot] = OracleBinding{use_prime ? exp.p_prime : exp.p, exp.o2h_sources};

    std::map<std::string, std::map<std::string, std::vector<Value>>> schedules;
    if (!exp.o2h_schedule.empty()) {
        schedules[exp.o2h_slot] = exp.o2h_schedule;
    }

    std::optional<DifferencePredicate> diff;
    if (with_masses) {
        diff = difference_set(exp.p, exp.p_prime);
    }

    RunTrace trace;
    trace.masses.assign(static_cast<std::size_t>(q), 0.0);
    double weight_sum = 0.0;
    for (const auto& branch : exp.branches) {
        RunContext ctx{QState(exp.layout)};
        for (const auto& [reg, value] : branch.state_constants) {
            xor_constant(ctx.state, reg, value);
        }
        for (const auto& reg : exp.hadamard_init) {
            apply_hadamard(ctx.state, reg);
        }
        ctx.bound = branch.bound;
        ctx.slots = &slots;
        ctx.schedules = &schedules;
        if (with_masses) {
            ctx.pre_query = [&](const std::string& slot, int j, RunContext& c,
                                const std::vector<ResolvedField>& fields) {
                if (slot == exp.o2h_slot) {
                    trace.masses[static_cast<std::size_t>(j - 1)] +=
                        branch.weight * predicate_mass(c.state, fields, diff->differs);
                }
            };
        }
        if (post_query) {
            ctx.post_query = post_query;
        }
        execute_program(ctx, exp.program);
        trace.p_one += branch.weight * prob_top_bit_one(ctx.state, exp.program.output_register);
        weight_sum += branch.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw std::logic_error("experiment branch weights do not sum to 1");
    }
    return trace;
}

double run_hide(const O2HExperiment& exp, bool use_prime) {
    return run_o2h_experiment(exp, use_prime, false).p_one;
}

OwSummary run_ow(const O2HExperiment& exp) {
    OwSummary summary;
    summary.q = exp.program.query_count(exp.o2h_slot);
    if (summary.q == 0) {
        return summary;
    }
    RunTrace trace = run_o2h_experiment(exp, false, true);
    summary.masses = trace.masses;
    double total = 0.0;
    for (double m : summary.masses) {
        total += m;
    }
    summary.adv_ow = total / static_cast<double>(summary.q);
    return summary;
}

}  // namespace o2hlab
