#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

#include "o2hlab/games.hpp"

namespace o2hlab {

// Operator identities behind the Fourier-oracle rewriting, checked densely:
//   P = H o P' o H          with P(x,y) = (x^y, y), P'(x,y) = (x, x^y),
//   S = (U(x)U) o S o (U^-1(x)U^-1),
//   I = (U(x)U) o I o (U^-1(x)U^-1).
// `width` is the size of each of x and y; U acts on one half.
struct ConjugationReport {
    double dev_xor = 0.0;
    double dev_swap = 0.0;
    double dev_identity = 0.0;
    double max_dev() const { return std::max({dev_xor, dev_swap, dev_identity}); }
};
ConjugationReport check_conjugation_lemma(int width, const Eigen::MatrixXcd& u,
                                          std::uint64_t state_seed = 11);

// Permutation matrix helpers for the identities above.
Eigen::MatrixXcd xor_into_first_matrix(int width);   // (x, y) -> (x^y, y)
Eigen::MatrixXcd xor_into_second_matrix(int width);  // (x, y) -> (x, x^y)
Eigen::MatrixXcd swap_halves_matrix(int width);
Eigen::MatrixXcd hadamard_matrix(int qubits);

// The four-stage chain from the sampled-table game to the Fourier-oracle
// game: stage 0 enumerates the tables, stages 1-2 Hadamard-initialize them,
// stage 3 runs the Fourier form with the trailing transform deferred (and
// dropped, since the readout does not touch it).
std::array<double, 4> run_hybrid_chain(const GhhmConfig& cfg, const AdversaryProgram& program,
                                       int b);

GhhmMode hybrid_stage_mode(int stage);

// Structural audit of the stage-2 circuit: every Hadamard on `reg` between
// two oracle calls pairs up with its neighbour, the first pairs with the
// initialization transform, and exactly one trailing transform remains.
struct CancellationAudit {
    bool ok = false;
    int cancelled_pairs = 0;
    std::string detail;
};
CancellationAudit audit_hybrid2_cancellation(const GhhmConfig& cfg,
                                             const AdversaryProgram& program,
                                             const std::string& reg);

// The stage-3 experiment records the deferred trailing transform without
// applying it.
bool purified_defers_final_hadamard(const GhhmConfig& cfg, const AdversaryProgram& program);

}  // namespace o2hlab
