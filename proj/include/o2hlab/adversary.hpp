#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "o2hlab/dyadic.hpp"
#include "o2hlab/permutations.hpp"
#include "o2hlab/rng.hpp"
#include "o2hlab/statevec.hpp"

#include "json.hpp"

namespace o2hlab {

// Dense unitary on the listed owned registers.
struct LocalUnitaryStep {
    std::vector<std::string> registers;
    Eigen::MatrixXcd matrix;
};

// Classical reversible step; a permutation-matrix local unitary kept in
// permutation form so basis-state runs stay cheap.
struct ClassicalStep {
    ClassicalPermutation perm;
    std::vector<std::string> registers;
};

// Call to a wired oracle slot. The listed registers fill the permutation's
// adversary-side fields in order; the runner attaches the game-side fields.
struct OracleCallStep {
    std::string slot;
    std::vector<std::string> registers;
};

// Hadamard transform on the listed registers. Game builders insert these
// around oracle calls when a figure conjugates the oracle.
struct HadamardStep {
    std::vector<std::string> registers;
};

using Step = std::variant<LocalUnitaryStep, ClassicalStep, OracleCallStep, HadamardStep>;

struct Stage {
    std::vector<Step> steps;
    // Registers this stage's unitaries may touch. Used to enforce rules like
    // "the second stage, but not the first, may read R".
    std::vector<std::string> visible;
};

// A finite alternation of local unitaries and oracle calls over the
// adversary's own registers. The output convention is a final measurement of
// the first (most significant) qubit of the work register W.
struct AdversaryProgram {
    std::vector<RegisterLayout::Register> owned;
    std::vector<Stage> stages;
    std::string output_register = "W";

    int query_count(const std::string& slot) const;
    int stage_query_count(int stage, const std::string& slot) const;
    bool all_steps_classical() const;
    // Every step references owned registers from its stage's visible set.
    void validate() const;

    nlohmann::json to_json() const;
};

std::string serialize_program(const AdversaryProgram& program);

// Seeded test-population member: seeded pseudo-Haar unitaries interleaved
// with the declared oracle calls. Stage i makes query_counts[i] calls to
// `slot` on `call_registers`; unitaries act on `unitary_registers`.
AdversaryProgram build_random_adversary(std::uint64_t seed,
                                        const std::vector<RegisterLayout::Register>& owned,
                                        const std::vector<int>& query_counts,
                                        const std::string& slot,
                                        const std::vector<std::string>& call_registers,
                                        const std::vector<std::string>& unitary_registers);

// --- classical guesser building blocks ---

// reg <- reg XOR constant, as a single-field classical step.
Step make_xor_constant_step(const std::string& reg, int width, Value constant);
// Flip the most significant qubit of `flag` iff the values of a and b are
// equal. Used to write "answers match" into W[1].
Step make_equality_flip_step(const std::string& flag, int flag_width, const std::string& a,
                             const std::string& b, int width);
// Flip the most significant qubit of `flag` unconditionally.
Step make_flip_step(const std::string& flag, int width);
// Swap the contents of two equal-width registers.
Step make_swap_registers_step(const std::string& a, const std::string& b, int width);
// dst <- dst XOR src.
Step make_xor_copy_step(const std::string& src, const std::string& dst, int width);

// A program that makes no oracle calls and flips W[1] when output_one is set.
AdversaryProgram build_constant_guesser(bool output_one, int stages);

}  // namespace o2hlab
