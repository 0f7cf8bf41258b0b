#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "o2hlab/dyadic.hpp"
#include "o2hlab/statevec.hpp"

#include "json.hpp"

namespace o2hlab {

// Oracle tables packed into a single value: entry k of an e-entry table with
// w-bit entries occupies bits [k*w, (k+1)*w).
inline Value table_get(Value table, Value entry, int entry_width) {
    return (table >> (entry * entry_width)) & ((Value{1} << entry_width) - 1);
}
inline Value table_set(Value table, Value entry, int entry_width, Value v) {
    const Value mask = ((Value{1} << entry_width) - 1) << (entry * entry_width);
    return (table & ~mask) | (v << (entry * entry_width));
}
inline Value pack_table(const std::vector<Value>& entries, int entry_width) {
    Value packed = 0;
    for (std::size_t k = entries.size(); k-- > 0;) {
        packed = (packed << entry_width) | entries[k];
    }
    return packed;
}
inline int table_nonzero_entries(Value table, int num_entries, int entry_width) {
    int count = 0;
    for (int k = 0; k < num_entries; ++k) {
        if (table_get(table, static_cast<Value>(k), entry_width) != 0) {
            ++count;
        }
    }
    return count;
}

// An explicitly invertible bijection on the joint values of a declared
// register tuple. Tuples up to 2^20 joint values are backed by exhaustively
// validated forward/inverse tables; wider tuples keep the paired procedures
// and are spot-checked on seeded points at construction.
class ClassicalPermutation {
  public:
    struct Field {
        std::string name;
        int width;
    };

    static constexpr int kTableBits = 20;

    ClassicalPermutation() = default;

    // `inverse` may be null for table-backed tuples (the table is inverted).
    static ClassicalPermutation from_function(std::string name, std::vector<Field> fields,
                                              int adversary_prefix,
                                              std::function<Value(Value)> forward,
                                              std::function<Value(Value)> inverse = nullptr);

    const std::string& name() const { return name_; }
    const std::vector<Field>& fields() const { return fields_; }
    int adversary_prefix() const { return adversary_prefix_; }
    int domain_bits() const { return domain_bits_; }
    std::size_t domain_size() const { return std::size_t{1} << domain_bits_; }
    bool table_backed() const { return !fwd_table_.empty(); }

    int field_index(const std::string& name) const;
    int field_shift(int idx) const { return shifts_[idx]; }
    Value field_of(Value packed, int idx) const {
        return (packed >> shifts_[idx]) & ((Value{1} << fields_[idx].width) - 1);
    }

    Value forward(Value v) const;
    Value inverse(Value v) const;

    bool same_fields(const ClassicalPermutation& other) const;

    nlohmann::json to_json() const;  // {name, registers, pairs} for table-backed tuples

  private:
    std::string name_;
    std::vector<Field> fields_;
    std::vector<int> shifts_;
    int adversary_prefix_ = 0;
    int domain_bits_ = 0;
    std::function<Value(Value)> fwd_fn_;
    std::function<Value(Value)> inv_fn_;
    std::vector<Value> fwd_table_;
    std::vector<Value> inv_table_;
};

// Partial evaluation: fix a subset of fields to classical values. Valid only
// when the bound fields evolve autonomously (their outputs do not depend on
// the free fields); this is verified at bind time. `updated` receives the
// bound fields' output values.
struct BoundPermutation {
    ClassicalPermutation perm;                          // over the free fields
    std::vector<std::pair<std::string, Value>> updated; // bound fields after one application
};
BoundPermutation bind_fields(const ClassicalPermutation& perm,
                             const std::vector<std::pair<std::string, Value>>& bound);

// Apply on a state. `attach` names one state register per field, in field
// order; the default overload attaches by field name.
void apply_classical_permutation(QState& state, const ClassicalPermutation& perm,
                                 std::span<const std::string> attach);
void apply_classical_permutation(QState& state, const ClassicalPermutation& perm);

// v evaluates true exactly where P and P' give different outputs.
struct DifferencePredicate {
    std::vector<ClassicalPermutation::Field> fields;
    int domain_bits = 0;
    std::function<bool(Value)> differs;

    // Exhaustive listing for small domains (throws if the domain is wider
    // than kTableBits).
    std::vector<Value> listing(std::size_t max_count = SIZE_MAX) const;
    bool empty() const;
};
DifferencePredicate difference_set(const ClassicalPermutation& p, const ClassicalPermutation& q);

// --- constructors for the cataloged oracles ---

// f[+](x, y) = (x, y ^ f(x)); self-inverse.
ClassicalPermutation make_xor_oracle(const std::vector<Value>& f, int in_bits, int out_bits,
                                     std::string name = "f_xor");

// Transposition of s and s' on one register; identity if s == s'.
ClassicalPermutation make_swap_perm(int width, Value s, Value s_prime);

// Raw n-bit bijection helpers (used to assemble oracle instances).
std::vector<Value> swap_table(int width, Value s, Value s_prime);
std::vector<Value> compose_tables(const std::vector<Value>& outer, const std::vector<Value>& inner);
std::vector<Value> invert_table(const std::vector<Value>& table);

// Hash oracle Ro(X, Y : H): Y ^= H[X].
ClassicalPermutation make_ro(int l, int m);
// Fourier form FRo(X, Y : H): H[X] ^= Y.
ClassicalPermutation make_fro(int l, int m);

// Reprogramming oracle Rep_b(X, Y : H, I, Z, R). X indexes a preregistered
// distribution table (2^x_bits entries); x = dist[X](R[I]); when b = 1 the
// entries H[x] and Z[I] are swapped; Y ^= x; I increments mod 2^i_bits.
ClassicalPermutation make_rep(int b, int l, int m, const std::vector<DyadicDistribution>& dists,
                              int x_bits, int i_bits, int r_bits);

// Pair for the staged-reprogramming reduction: P reads H1, P' reads H0,
// both over (X, Y : H0, H1).
std::pair<ClassicalPermutation, ClassicalPermutation> make_pz_pair(int l, int m);

// Hash oracle on a split input, Y ^= H[X||M]. k may be zero (no M field).
ClassicalPermutation make_ro_split(int l, int k, int n);

// First-stage hybrid oracle Ro0_a(X, M, Y : H, h, x):
// on X == x, a = 1 answers from h[M] instead of H[X,M].
ClassicalPermutation make_ro0(int a, int l, int k, int n);
// Second-stage hybrid oracle Ro1_c(X, M, Y : H, B1, x, m):
// on (X, M) == (x, m), c = 1 answers B1 instead of H[X,M].
ClassicalPermutation make_ro1(int c, int l, int k, int n);

// Sampling oracle Samp_b(X, Y : H, B, V, R, Xs). Writes X into V to force a
// classical query, derives Xs ^= A_C(X; R), then answers from H[Xs] (b = 0)
// or B (b = 1). The family has one distribution per X value.
ClassicalPermutation make_samp(int b, int l, int n, const std::vector<DyadicDistribution>& family,
                               int r_bits);
// Fourier form FSamp_{a,b}: optional swap of (B, H[Xs]) then Y written into
// H[Xs] (b = 0) or B (b = 1).
ClassicalPermutation make_fsamp(int a, int b, int l, int n,
                                const std::vector<DyadicDistribution>& family, int r_bits);
// Fourier second-stage oracle FRo1_c(X, Y : H, B, Xs).
ClassicalPermutation make_fro1(int c, int l, int n);

// Direction-bit oracle over a raw bijection table: (D, X, Y) with
// Y ^= table[X] when D = 1 and Y ^= table^{-1}[X] when D = 0.
ClassicalPermutation make_perm_pm(const std::vector<Value>& table, int width,
                                  std::string name = "perm_pm");

// Direction-bit xor oracle of a whole permutation tuple: fields
// (D, <inputs>, <outputs>) where the input fields mirror P's tuple and
// Y-part ^= P(inputs) (D = 1) or P^{-1}(inputs) (D = 0).
ClassicalPermutation make_direction_oracle(const ClassicalPermutation& p);

}  // namespace o2hlab
