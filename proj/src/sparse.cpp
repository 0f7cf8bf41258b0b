#include "o2hlab/sparse.hpp"

#include <stdexcept>

#include "o2hlab/rng.hpp"

namespace o2hlab {

namespace {

Eigen::MatrixXcd permutation_matrix(int bits, const std::function<Value(Value)>& fn) {
    const Eigen::Index dim = Eigen::Index{1} << bits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Value v = 0; v < static_cast<Value>(dim); ++v) {
        m(static_cast<Eigen::Index>(fn(v)), static_cast<Eigen::Index>(v)) = 1.0;
    }
    return m;
}

}  // namespace

Eigen::MatrixXcd xor_into_first_matrix(int width) {
    return permutation_matrix(2 * width, [width](Value v) {
        Value y = v & ((Value{1} << width) - 1);
        Value x = v >> width;
        return ((x ^ y) << width) | y;
    });
}

Eigen::MatrixXcd xor_into_second_matrix(int width) {
    return permutation_matrix(2 * width, [width](Value v) {
        Value y = v & ((Value{1} << width) - 1);
        Value x = v >> width;
        return (x << width) | (x ^ y);
    });
}

Eigen::MatrixXcd swap_halves_matrix(int width) {
    return permutation_matrix(2 * width, [width](Value v) {
        Value y = v & ((Value{1} << width) - 1);
        Value x = v >> width;
        return (y << width) | x;
    });
}

Eigen::MatrixXcd hadamard_matrix(int qubits) {
    Eigen::MatrixXcd h1(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h1 << s, s, s, -s;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < qubits; ++i) {
        Eigen::MatrixXcd next(h.rows() * 2, h.cols() * 2);
        next.topLeftCorner(h.rows(), h.cols()) = h1(0, 0) * h;
        next.topRightCorner(h.rows(), h.cols()) = h1(0, 1) * h;
        next.bottomLeftCorner(h.rows(), h.cols()) = h1(1, 0) * h;
        next.bottomRightCorner(h.rows(), h.cols()) = h1(1, 1) * h;
        h = std::move(next);
    }
    return h;
}

ConjugationReport check_conjugation_lemma(int width, const Eigen::MatrixXcd& u,
                                          std::uint64_t state_seed) {
    if (width < 1 || width > 3) {
        throw std::invalid_argument("conjugation check supports 1..3 bit halves");
    }
    if (unitarity_error(u) > kEqTolerance || u.rows() != (Eigen::Index{1} << width)) {
        throw std::invalid_argument("conjugation check needs a unitary on one half");
    }
    ConjugationReport report;

    const auto p = xor_into_first_matrix(width);
    const auto pp = xor_into_second_matrix(width);
    const auto s = swap_halves_matrix(width);
    const auto h = hadamard_matrix(2 * width);
    const Eigen::Index dim = p.rows();
    const auto identity = Eigen::MatrixXcd::Identity(dim, dim);

    Eigen::MatrixXcd uu = Eigen::MatrixXcd::Zero(dim, dim);
    // u (x) u, big-endian halves.
    const Eigen::Index half = u.rows();
    for (Eigen::Index a = 0; a < half; ++a) {
        for (Eigen::Index b = 0; b < half; ++b) {
            for (Eigen::Index c = 0; c < half; ++c) {
                for (Eigen::Index d = 0; d < half; ++d) {
                    uu(a * half + c, b * half + d) = u(a, b) * u(c, d);
                }
            }
        }
    }
    const Eigen::MatrixXcd uu_inv = uu.adjoint();

    report.dev_xor = (h * pp * h - p).cwiseAbs().maxCoeff();
    report.dev_swap = (uu * s * uu_inv - s).cwiseAbs().maxCoeff();
    report.dev_identity = (uu * identity * uu_inv - identity).cwiseAbs().maxCoeff();

    // Also drive both sides over seeded states, not only the basis.
    SplitMix64 rng(state_seed);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            v(i) = Complex(rng.next_gaussian(), rng.next_gaussian());
        }
        v /= v.norm();
        report.dev_xor = std::max(report.dev_xor, ((h * (pp * (h * v))) - p * v).norm());
        report.dev_swap = std::max(report.dev_swap, ((uu * (s * (uu_inv * v))) - s * v).norm());
        report.dev_identity = std::max(report.dev_identity, ((uu * (uu_inv * v)) - v).norm());
    }
    return report;
}

GhhmMode hybrid_stage_mode(int stage) {
    switch (stage) {
        case 0:
            return GhhmMode::Enumerated;
        case 1:
            return GhhmMode::Hybrid1;
        case 2:
            return GhhmMode::Hybrid2;
        case 3:
            return GhhmMode::Purified;
        default:
            throw std::invalid_argument("hybrid stage must be 0..3");
    }
}

std::array<double, 4> run_hybrid_chain(const GhhmConfig& cfg, const AdversaryProgram& program,
                                       int b) {
    std::array<double, 4> p{};
    for (int stage = 0; stage < 4; ++stage) {
        p[static_cast<std::size_t>(stage)] =
            run_ghhm(cfg, program, b, hybrid_stage_mode(stage));
    }
    return p;
}

CancellationAudit audit_hybrid2_cancellation(const GhhmConfig& cfg,
                                             const AdversaryProgram& program,
                                             const std::string& reg) {
    CancellationAudit audit;
    auto exp = make_ghhm_experiment(cfg, program, GhhmMode::Hybrid2);

    bool init_has_reg = false;
    for (const auto& r : exp.hadamard_init) {
        if (r == reg) {
            init_has_reg = true;
        }
    }
    if (!init_has_reg) {
        audit.detail = "initialization does not transform " + reg;
        return audit;
    }

    // Events on the register: 'h' for a Hadamard covering it, 'q' for an
    // oracle call whose permutation touches it.
    std::string events;
    for (const auto& stage : exp.program.stages) {
        for (const auto& step : stage.steps) {
            if (const auto* h = std::get_if<HadamardStep>(&step)) {
                for (const auto& r : h->registers) {
                    if (r == reg) {
                        events.push_back('h');
                    }
                }
            } else if (const auto* o = std::get_if<OracleCallStep>(&step)) {
                const bool rep_call = o->slot == exp.o2h_slot;
                if (reg == "H" || (reg == "Z" && rep_call)) {
                    events.push_back('q');
                }
            }
        }
    }

    // Expected shape: h q h (h q h)*. The first 'h' pairs with the
    // initialization transform; between any two calls the two 'h' events
    // cancel; one trailing 'h' is left to defer past the readout.
    if (events.empty() || events.front() != 'h' || events.back() != 'h') {
        audit.detail = "transcript does not start and end with a transform: " + events;
        return audit;
    }
    std::size_t i = 0;
    int pairs = 0;
    bool expect_had = true;
    int run = 0;
    // Walk and verify strict alternation h q (hh q)* h.
    for (i = 0; i < events.size(); ++i) {
        if (events[i] == 'h') {
            ++run;
            if (run > 2) {
                audit.detail = "three transforms in a row at position " + std::to_string(i);
                return audit;
            }
        } else {
            if (run == 0) {
                audit.detail = "call without a preceding transform at position " +
                               std::to_string(i);
                return audit;
            }
            if (run == 2) {
                ++pairs;  // the two transforms between the previous call and this one cancel
            }
            run = 0;
        }
    }
    if (run != 1) {
        audit.detail = "expected exactly one trailing transform, saw " + std::to_string(run);
        return audit;
    }
    (void)expect_had;
    audit.ok = true;
    audit.cancelled_pairs = pairs;
    audit.detail = events;
    return audit;
}

bool purified_defers_final_hadamard(const GhhmConfig& cfg, const AdversaryProgram& program) {
    auto exp = make_ghhm_experiment(cfg, program, GhhmMode::Purified);
    bool has_h = false;
    bool has_z = false;
    for (const auto& r : exp.deferred_final_hadamard) {
        has_h |= r == "H";
        has_z |= r == "Z";
    }
    return has_h && has_z;
}

}  // namespace o2hlab
