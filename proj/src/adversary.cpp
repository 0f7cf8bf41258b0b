#include "o2hlab/adversary.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace o2hlab {

int AdversaryProgram::query_count(const std::string& slot) const {
    int q = 0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        q += stage_query_count(static_cast<int>(i), slot);
    }
    return q;
}

int AdversaryProgram::stage_query_count(int stage, const std::string& slot) const {
    int q = 0;
    for (const auto& step : stages[stage].steps) {
        if (const auto* call = std::get_if<OracleCallStep>(&step)) {
            if (call->slot == slot) {
                ++q;
            }
        }
    }
    return q;
}

bool AdversaryProgram::all_steps_classical() const {
    for (const auto& stage : stages) {
        for (const auto& step : stage.steps) {
            if (std::holds_alternative<LocalUnitaryStep>(step) ||
                std::holds_alternative<HadamardStep>(step)) {
                return false;
            }
        }
    }
    return true;
}

void AdversaryProgram::validate() const {
    std::unordered_set<std::string> owned_names;
    for (const auto& r : owned) {
        owned_names.insert(r.name);
    }
    if (!owned_names.count(output_register)) {
        throw std::invalid_argument("program output register '" + output_register +
                                    "' is not owned");
    }
    for (const auto& stage : stages) {
        std::unordered_set<std::string> visible(stage.visible.begin(), stage.visible.end());
        if (visible.empty()) {
            visible = owned_names;
        }
        auto check = [&](const std::vector<std::string>& regs, const char* what) {
            for (const auto& r : regs) {
                if (!visible.count(r)) {
                    throw std::invalid_argument(std::string(what) + " references register '" + r +
                                                "' outside the stage's visible set");
                }
            }
        };
        for (const auto& step : stage.steps) {
            if (const auto* u = std::get_if<LocalUnitaryStep>(&step)) {
                check(u->registers, "unitary step");
                if (unitarity_error(u->matrix) > kEqTolerance) {
                    throw std::invalid_argument("program step matrix is not unitary within 1e-9");
                }
            } else if (const auto* c = std::get_if<ClassicalStep>(&step)) {
                check(c->registers, "classical step");
            } else if (const auto* o = std::get_if<OracleCallStep>(&step)) {
                check(o->registers, "oracle call");
            } else if (const auto* h = std::get_if<HadamardStep>(&step)) {
                check(h->registers, "hadamard step");
            }
        }
    }
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({format_double(m(r, c).real()), format_double(m(r, c).imag())});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json AdversaryProgram::to_json() const {
    nlohmann::json owned_j = nlohmann::json::array();
    for (const auto& r : owned) {
        owned_j.push_back({{"name", r.name}, {"width", r.width}});
    }
    nlohmann::json stages_j = nlohmann::json::array();
    for (const auto& stage : stages) {
        nlohmann::json steps_j = nlohmann::json::array();
        for (const auto& step : stage.steps) {
            if (const auto* u = std::get_if<LocalUnitaryStep>(&step)) {
                steps_j.push_back({{"kind", "unitary"},
                                   {"registers", u->registers},
                                   {"matrix", matrix_to_json(u->matrix)}});
            } else if (const auto* c = std::get_if<ClassicalStep>(&step)) {
                steps_j.push_back({{"kind", "classical"},
                                   {"registers", c->registers},
                                   {"perm", c->perm.to_json()}});
            } else if (const auto* o = std::get_if<OracleCallStep>(&step)) {
                steps_j.push_back(
                    {{"kind", "call"}, {"slot", o->slot}, {"registers", o->registers}});
            } else if (const auto* h = std::get_if<HadamardStep>(&step)) {
                steps_j.push_back({{"kind", "hadamard"}, {"registers", h->registers}});
            }
        }
        stages_j.push_back({{"steps", std::move(steps_j)}, {"visible", stage.visible}});
    }
    return {{"owned", owned_j}, {"stages", stages_j}, {"output", output_register}};
}

std::string serialize_program(const AdversaryProgram& program) {
    return program.to_json().dump();
}

AdversaryProgram build_random_adversary(std::uint64_t seed,
                                        const std::vector<RegisterLayout::Register>& owned,
                                        const std::vector<int>& query_counts,
                                        const std::string& slot,
                                        const std::vector<std::string>& call_registers,
                                        const std::vector<std::string>& unitary_registers) {
    int unitary_dim_bits = 0;
    for (const auto& name : unitary_registers) {
        bool found = false;
        for (const auto& r : owned) {
            if (r.name == name) {
                unitary_dim_bits += r.width;
                found = true;
            }
        }
        if (!found) {
            throw std::invalid_argument("unitary register '" + name + "' is not owned");
        }
    }
    if (unitary_dim_bits > 8) {
        throw std::length_error("random adversary unitary span exceeds 8 qubits");
    }
    const int dim = 1 << unitary_dim_bits;

    SplitMix64 rng(seed);
    AdversaryProgram prog;
    prog.owned = owned;
    for (int q : query_counts) {
        Stage stage;
        for (int j = 0; j < q; ++j) {
            stage.steps.push_back(LocalUnitaryStep{unitary_registers, random_unitary(rng, dim)});
            stage.steps.push_back(OracleCallStep{slot, call_registers});
        }
        stage.steps.push_back(LocalUnitaryStep{unitary_registers, random_unitary(rng, dim)});
        prog.stages.push_back(std::move(stage));
    }
    prog.validate();
    return prog;
}

Step make_xor_constant_step(const std::string& reg, int width, Value constant) {
    auto fn = [constant](Value v) { return v ^ constant; };
    auto perm = ClassicalPermutation::from_function("xor_const", {{reg, width}}, 1, fn, fn);
    return ClassicalStep{std::move(perm), {reg}};
}

Step make_equality_flip_step(const std::string& flag, int flag_width, const std::string& a,
                             const std::string& b, int width) {
    const Value flip = Value{1} << (flag_width - 1);
    auto fn = [flip, width](Value v) {
        Value bb = v & ((Value{1} << width) - 1);
        Value aa = (v >> width) & ((Value{1} << width) - 1);
        Value f = v >> (2 * width);
        if (aa == bb) {
            f ^= flip;
        }
        return (f << (2 * width)) | (aa << width) | bb;
    };
    auto perm = ClassicalPermutation::from_function(
        "equality_flip", {{flag, flag_width}, {a, width}, {b, width}}, 3, fn, fn);
    return ClassicalStep{std::move(perm), {flag, a, b}};
}

Step make_flip_step(const std::string& flag, int width) {
    return make_xor_constant_step(flag, width, Value{1} << (width - 1));
}

Step make_swap_registers_step(const std::string& a, const std::string& b, int width) {
    auto fn = [width](Value v) {
        Value bb = v & ((Value{1} << width) - 1);
        Value aa = v >> width;
        return (bb << width) | aa;
    };
    auto perm =
        ClassicalPermutation::from_function("swap_regs", {{a, width}, {b, width}}, 2, fn, fn);
    return ClassicalStep{std::move(perm), {a, b}};
}

Step make_xor_copy_step(const std::string& src, const std::string& dst, int width) {
    auto fn = [width](Value v) {
        Value d = v & ((Value{1} << width) - 1);
        Value s = v >> width;
        return (s << width) | (d ^ s);
    };
    auto perm =
        ClassicalPermutation::from_function("xor_copy", {{src, width}, {dst, width}}, 2, fn, fn);
    return ClassicalStep{std::move(perm), {src, dst}};
}

AdversaryProgram build_constant_guesser(bool output_one, int stages) {
    AdversaryProgram prog;
    prog.owned = {{"W", 1}};
    for (int i = 0; i < stages; ++i) {
        prog.stages.push_back(Stage{});
    }
    if (output_one) {
        prog.stages.back().steps.push_back(make_flip_step("W", 1));
    }
    prog.validate();
    return prog;
}

}  // namespace o2hlab
