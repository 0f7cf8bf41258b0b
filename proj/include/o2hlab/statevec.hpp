#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace o2hlab {

using Value = std::uint64_t;
using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

inline constexpr int kDefaultQubitCap = 22;
inline constexpr double kEqTolerance = 1e-9;

// Named fixed-width quantum registers. A joint basis index packs the
// register values in declaration order, first register in the most
// significant bits.
class RegisterLayout {
  public:
    struct Register {
        std::string name;
        int width;
    };

    RegisterLayout() = default;
    explicit RegisterLayout(std::vector<Register> regs, int qubit_cap = kDefaultQubitCap);

    int total_width() const { return total_width_; }
    std::size_t dim() const { return std::size_t{1} << total_width_; }
    int size() const { return static_cast<int>(regs_.size()); }

    const Register& reg(int idx) const { return regs_[idx]; }
    const std::vector<Register>& registers() const { return regs_; }

    // Index of a named register; throws std::invalid_argument if unknown.
    int index_of(const std::string& name) const;
    bool has(const std::string& name) const;

    int width(int idx) const { return regs_[idx].width; }
    // Bit position of the register's least significant bit in the joint index.
    int shift(int idx) const { return shifts_[idx]; }
    Value mask(int idx) const { return ((Value{1} << regs_[idx].width) - 1); }

    Value field(Value joint, int idx) const { return (joint >> shifts_[idx]) & mask(idx); }
    Value with_field(Value joint, int idx, Value v) const {
        return (joint & ~(mask(idx) << shifts_[idx])) | (v << shifts_[idx]);
    }

    // Pack the values of the given registers (first listed = most significant)
    // into one integer, and the reverse.
    Value extract(Value joint, std::span<const int> reg_indices) const;
    Value insert(Value joint, std::span<const int> reg_indices, Value packed) const;

    bool operator==(const RegisterLayout& other) const;

  private:
    std::vector<Register> regs_;
    std::vector<int> shifts_;
    int total_width_ = 0;
};

// Dense complex amplitude vector over a layout's joint basis.
class QState {
  public:
    // Freshly allocated registers hold the all-zero string.
    explicit QState(RegisterLayout layout);

    const RegisterLayout& layout() const { return layout_; }
    StateVector& amps() { return amps_; }
    const StateVector& amps() const { return amps_; }

    double norm_error() const;  // | ||psi||^2 - 1 |

  private:
    RegisterLayout layout_;
    StateVector amps_;
};

// Tensor-product Hadamard on every qubit of the named registers.
void apply_hadamard(QState& state, std::span<const std::string> registers);
void apply_hadamard(QState& state, const std::string& reg);

// Dense unitary on the named registers (first listed = most significant bits
// of the matrix index), identity elsewhere. Checks unitarity to 1e-9 unless
// the caller has validated the matrix already.
void apply_local_unitary(QState& state, std::span<const std::string> registers,
                         const Eigen::MatrixXcd& matrix);
void apply_local_unitary_unchecked(QState& state, std::span<const std::string> registers,
                                   const Eigen::MatrixXcd& matrix);

double unitarity_error(const Eigen::MatrixXcd& matrix);

// Relabel basis states: reg <- reg XOR constant.
void xor_constant(QState& state, const std::string& reg, Value constant);
// dst <- dst XOR src (CNOT chain). Widths must match.
void xor_copy(QState& state, const std::string& src, const std::string& dst);

// Probability table over the joint values of the named registers.
// entry(v) = total squared magnitude of amplitudes whose restriction is v.
// The state is not collapsed.
std::vector<double> outcome_probabilities(const QState& state,
                                          std::span<const std::string> registers);

// Probability that the most significant qubit of `reg` is 1. The adversary
// output convention "measure W[1]" reads the first qubit of W.
double prob_top_bit_one(const QState& state, const std::string& reg);

// Euclidean distance between amplitude vectors, minimized over a global
// phase. Zero iff the states are equal up to global phase.
double state_distance(const QState& a, const QState& b);

// Collapse on the named registers: one renormalized branch per outcome with
// nonnegligible probability. Used by games with classical mid-run branching.
struct MeasureBranch {
    Value value;
    double probability;
    QState state;
};
std::vector<MeasureBranch> measure_branches(const QState& state,
                                            std::span<const std::string> registers,
                                            double prob_floor = 1e-18);

}  // namespace o2hlab
