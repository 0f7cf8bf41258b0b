#include "o2hlab/statevec.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace o2hlab {

RegisterLayout::RegisterLayout(std::vector<Register> regs, int qubit_cap) : regs_(std::move(regs)) {
    if (regs_.empty()) {
        throw std::invalid_argument("layout needs at least one register");
    }
    std::unordered_set<std::string> seen;
    total_width_ = 0;
    for (const auto& r : regs_) {
        if (r.width < 1) {
            throw std::invalid_argument("register '" + r.name + "' must have width >= 1");
        }
        if (!seen.insert(r.name).second) {
            throw std::invalid_argument("duplicate register name '" + r.name + "'");
        }
        total_width_ += r.width;
    }
    if (total_width_ > qubit_cap) {
        throw std::length_error("layout of " + std::to_string(total_width_) +
                                " qubits exceeds cap of " + std::to_string(qubit_cap));
    }
    shifts_.resize(regs_.size());
    int below = total_width_;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        below -= regs_[i].width;
        shifts_[i] = below;
    }
}

int RegisterLayout::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        if (regs_[i].name == name) {
            return static_cast<int>(i);
        }
    }
    throw std::invalid_argument("unknown register '" + name + "'");
}

bool RegisterLayout::has(const std::string& name) const {
    for (const auto& r : regs_) {
        if (r.name == name) {
            return true;
        }
    }
    return false;
}

Value RegisterLayout::extract(Value joint, std::span<const int> reg_indices) const {
    Value packed = 0;
    for (int idx : reg_indices) {
        packed = (packed << regs_[idx].width) | field(joint, idx);
    }
    return packed;
}

Value RegisterLayout::insert(Value joint, std::span<const int> reg_indices, Value packed) const {
    for (auto it = reg_indices.rbegin(); it != reg_indices.rend(); ++it) {
        joint = with_field(joint, *it, packed & mask(*it));
        packed >>= regs_[*it].width;
    }
    return joint;
}

bool RegisterLayout::operator==(const RegisterLayout& other) const {
    if (regs_.size() != other.regs_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        if (regs_[i].name != other.regs_[i].name || regs_[i].width != other.regs_[i].width) {
            return false;
        }
    }
    return true;
}

QState::QState(RegisterLayout layout) : layout_(std::move(layout)) {
    amps_ = StateVector::Zero(static_cast<Eigen::Index>(layout_.dim()));
    amps_(0) = Complex(1.0, 0.0);
}

double QState::norm_error() const {
    return std::abs(amps_.squaredNorm() - 1.0);
}

namespace {

// Global bit positions (shift amounts) of every qubit of the named registers,
// most significant qubit of the first register first.
std::vector<int> qubit_positions(const RegisterLayout& layout,
                                 std::span<const std::string> registers) {
    std::vector<int> positions;
    std::unordered_set<std::string> seen;
    for (const auto& name : registers) {
        int idx = layout.index_of(name);
        if (!seen.insert(name).second) {
            throw std::invalid_argument("register '" + name + "' listed twice");
        }
        for (int b = layout.width(idx) - 1; b >= 0; --b) {
            positions.push_back(layout.shift(idx) + b);
        }
    }
    return positions;
}

// Deposit the bits of `ctx` into the positions NOT listed in sorted_positions.
// sorted_positions must be ascending.
inline Value spread_context(Value ctx, std::span<const int> sorted_positions, int total_width) {
    Value out = 0;
    std::size_t p = 0;
    for (int bit = 0; bit < total_width; ++bit) {
        if (p < sorted_positions.size() && sorted_positions[p] == bit) {
            ++p;
            continue;
        }
        out |= (ctx & 1) << bit;
        ctx >>= 1;
    }
    return out;
}

}  // namespace

void apply_hadamard(QState& state, std::span<const std::string> registers) {
    auto positions = qubit_positions(state.layout(), registers);
    auto& amps = state.amps();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::size_t dim = state.layout().dim();
    for (int pos : positions) {
        const Value bit = Value{1} << pos;
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & bit) {
                continue;
            }
            Complex a = amps(static_cast<Eigen::Index>(i));
            Complex b = amps(static_cast<Eigen::Index>(i | bit));
            amps(static_cast<Eigen::Index>(i)) = (a + b) * inv_sqrt2;
            amps(static_cast<Eigen::Index>(i | bit)) = (a - b) * inv_sqrt2;
        }
    }
}

void apply_hadamard(QState& state, const std::string& reg) {
    const std::string regs[] = {reg};
    apply_hadamard(state, regs);
}

double unitarity_error(const Eigen::MatrixXcd& matrix) {
    if (matrix.rows() != matrix.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
    gram -= Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
    return gram.norm();
}

void apply_local_unitary(QState& state, std::span<const std::string> registers,
                         const Eigen::MatrixXcd& matrix) {
    if (unitarity_error(matrix) > kEqTolerance) {
        throw std::invalid_argument("matrix is not unitary within 1e-9");
    }
    apply_local_unitary_unchecked(state, registers, matrix);
}

void apply_local_unitary_unchecked(QState& state, std::span<const std::string> registers,
                                   const Eigen::MatrixXcd& matrix) {
    auto positions = qubit_positions(state.layout(), registers);
    const int k = static_cast<int>(positions.size());
    const Eigen::Index local_dim = Eigen::Index{1} << k;
    if (matrix.rows() != local_dim || matrix.cols() != local_dim) {
        throw std::invalid_argument("matrix dimension does not match named registers");
    }

    // spread_local[v] places the bits of a local index at the target positions
    // (bit k-1 of v, the most significant, at positions[0]).
    std::vector<Value> spread_local(static_cast<std::size_t>(local_dim), 0);
    for (Eigen::Index v = 0; v < local_dim; ++v) {
        Value s = 0;
        for (int b = 0; b < k; ++b) {
            if ((v >> (k - 1 - b)) & 1) {
                s |= Value{1} << positions[b];
            }
        }
        spread_local[static_cast<std::size_t>(v)] = s;
    }

    std::vector<int> sorted = positions;
    std::sort(sorted.begin(), sorted.end());

    const int total = state.layout().total_width();
    const std::size_t n_ctx = std::size_t{1} << (total - k);
    auto& amps = state.amps();

    // Batch contexts into the columns of a dense block so the unitary is
    // applied as one matrix product per block.
    constexpr std::size_t kBlock = 64;
    Eigen::MatrixXcd in(local_dim, static_cast<Eigen::Index>(std::min(n_ctx, kBlock)));
    std::vector<Value> bases(std::min(n_ctx, kBlock));
    for (std::size_t c0 = 0; c0 < n_ctx; c0 += kBlock) {
        const std::size_t cols = std::min(kBlock, n_ctx - c0);
        for (std::size_t c = 0; c < cols; ++c) {
            bases[c] = spread_context(c0 + c, sorted, total);
            for (Eigen::Index v = 0; v < local_dim; ++v) {
                in(v, static_cast<Eigen::Index>(c)) =
                    amps(static_cast<Eigen::Index>(bases[c] | spread_local[static_cast<std::size_t>(v)]));
            }
        }
        Eigen::MatrixXcd out = matrix * in.leftCols(static_cast<Eigen::Index>(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            for (Eigen::Index v = 0; v < local_dim; ++v) {
                amps(static_cast<Eigen::Index>(bases[c] | spread_local[static_cast<std::size_t>(v)])) =
                    out(v, static_cast<Eigen::Index>(c));
            }
        }
    }
}

void xor_constant(QState& state, const std::string& reg, Value constant) {
    const auto& layout = state.layout();
    int idx = layout.index_of(reg);
    if (constant > layout.mask(idx)) {
        throw std::invalid_argument("constant wider than register '" + reg + "'");
    }
    const Value spread = constant << layout.shift(idx);
    if (spread == 0) {
        return;
    }
    auto& amps = state.amps();
    const std::size_t dim = layout.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        Value j = i ^ spread;
        if (j > i) {
            std::swap(amps(static_cast<Eigen::Index>(i)), amps(static_cast<Eigen::Index>(j)));
        }
    }
}

void xor_copy(QState& state, const std::string& src, const std::string& dst) {
    const auto& layout = state.layout();
    int si = layout.index_of(src);
    int di = layout.index_of(dst);
    if (si == di) {
        throw std::invalid_argument("xor_copy needs distinct registers");
    }
    if (layout.width(si) != layout.width(di)) {
        throw std::invalid_argument("xor_copy width mismatch");
    }
    auto& amps = state.amps();
    const std::size_t dim = layout.dim();
    StateVector next = StateVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        Value v = layout.field(i, di) ^ layout.field(i, si);
        Value j = layout.with_field(i, di, v);
        next(static_cast<Eigen::Index>(j)) = amps(static_cast<Eigen::Index>(i));
    }
    amps = std::move(next);
}

std::vector<double> outcome_probabilities(const QState& state,
                                          std::span<const std::string> registers) {
    const auto& layout = state.layout();
    std::vector<int> indices;
    int width = 0;
    for (const auto& name : registers) {
        indices.push_back(layout.index_of(name));
        width += layout.width(indices.back());
    }
    std::vector<double> table(std::size_t{1} << width, 0.0);
    const auto& amps = state.amps();
    const std::size_t dim = layout.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        Value v = layout.extract(i, indices);
        table[v] += std::norm(amps(static_cast<Eigen::Index>(i)));
    }
    return table;
}

double prob_top_bit_one(const QState& state, const std::string& reg) {
    const auto& layout = state.layout();
    int idx = layout.index_of(reg);
    const int top = layout.shift(idx) + layout.width(idx) - 1;
    const Value bit = Value{1} << top;
    double p = 0.0;
    const auto& amps = state.amps();
    const std::size_t dim = layout.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) {
            p += std::norm(amps(static_cast<Eigen::Index>(i)));
        }
    }
    return p;
}

double state_distance(const QState& a, const QState& b) {
    if (!(a.layout() == b.layout())) {
        throw std::invalid_argument("state_distance needs identical layouts");
    }
    const double na = a.amps().squaredNorm();
    const double nb = b.amps().squaredNorm();
    const double overlap = std::abs(a.amps().dot(b.amps()));
    const double d2 = na + nb - 2.0 * overlap;
    return std::sqrt(std::max(0.0, d2));
}

std::vector<MeasureBranch> measure_branches(const QState& state,
                                            std::span<const std::string> registers,
                                            double prob_floor) {
    const auto& layout = state.layout();
    std::vector<int> indices;
    int width = 0;
    for (const auto& name : registers) {
        indices.push_back(layout.index_of(name));
        width += layout.width(indices.back());
    }
    const std::size_t outcomes = std::size_t{1} << width;
    const std::size_t dim = layout.dim();
    std::vector<double> probs(outcomes, 0.0);
    const auto& amps = state.amps();
    for (std::size_t i = 0; i < dim; ++i) {
        probs[layout.extract(i, indices)] += std::norm(amps(static_cast<Eigen::Index>(i)));
    }
    std::vector<MeasureBranch> branches;
    for (std::size_t v = 0; v < outcomes; ++v) {
        if (probs[v] <= prob_floor) {
            continue;
        }
        MeasureBranch br{v, probs[v], QState(layout)};
        auto& out = br.state.amps();
        out.setZero();
        const double scale = 1.0 / std::sqrt(probs[v]);
        for (std::size_t i = 0; i < dim; ++i) {
            if (layout.extract(i, indices) == v) {
                out(static_cast<Eigen::Index>(i)) = amps(static_cast<Eigen::Index>(i)) * scale;
            }
        }
        branches.push_back(std::move(br));
    }
    return branches;
}

}  // namespace o2hlab
