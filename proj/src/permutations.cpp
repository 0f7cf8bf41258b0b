#include "o2hlab/permutations.hpp"

#include <memory>
#include <stdexcept>
#include <unordered_set>

#include "o2hlab/rng.hpp"

namespace o2hlab {

namespace {

constexpr int kMaxTupleBits = 62;

int checked_total_width(const std::vector<ClassicalPermutation::Field>& fields) {
    if (fields.empty()) {
        throw std::invalid_argument("permutation needs at least one field");
    }
    std::unordered_set<std::string> seen;
    int total = 0;
    for (const auto& f : fields) {
        if (f.width < 1) {
            throw std::invalid_argument("permutation field '" + f.name + "' must have width >= 1");
        }
        if (!seen.insert(f.name).second) {
            throw std::invalid_argument("duplicate permutation field '" + f.name + "'");
        }
        total += f.width;
    }
    if (total > kMaxTupleBits) {
        throw std::invalid_argument("permutation tuple exceeds " + std::to_string(kMaxTupleBits) +
                                    " bits");
    }
    return total;
}

}  // namespace

ClassicalPermutation ClassicalPermutation::from_function(std::string name,
                                                         std::vector<Field> fields,
                                                         int adversary_prefix,
                                                         std::function<Value(Value)> forward,
                                                         std::function<Value(Value)> inverse) {
    ClassicalPermutation p;
    p.name_ = std::move(name);
    p.fields_ = std::move(fields);
    p.domain_bits_ = checked_total_width(p.fields_);
    if (adversary_prefix < 0 || adversary_prefix > static_cast<int>(p.fields_.size())) {
        throw std::invalid_argument("adversary prefix out of range");
    }
    p.adversary_prefix_ = adversary_prefix;
    p.shifts_.resize(p.fields_.size());
    int below = p.domain_bits_;
    for (std::size_t i = 0; i < p.fields_.size(); ++i) {
        below -= p.fields_[i].width;
        p.shifts_[i] = below;
    }
    p.fwd_fn_ = std::move(forward);
    p.inv_fn_ = std::move(inverse);

    if (p.domain_bits_ <= kTableBits) {
        const std::size_t n = std::size_t{1} << p.domain_bits_;
        p.fwd_table_.resize(n);
        p.inv_table_.assign(n, ~Value{0});
        const Value domain_mask = (n == 0) ? 0 : static_cast<Value>(n - 1);
        for (std::size_t v = 0; v < n; ++v) {
            Value w = p.fwd_fn_(static_cast<Value>(v));
            if ((w & ~domain_mask) != 0) {
                throw std::invalid_argument("permutation '" + p.name_ + "' maps outside its domain");
            }
            if (p.inv_table_[w] != ~Value{0}) {
                throw std::invalid_argument("permutation '" + p.name_ + "' is not a bijection");
            }
            p.fwd_table_[v] = w;
            p.inv_table_[w] = static_cast<Value>(v);
        }
    } else {
        if (!p.inv_fn_) {
            throw std::invalid_argument("permutation '" + p.name_ +
                                        "' is too wide for tables and has no inverse procedure");
        }
        // Spot-check the pairing on seeded points.
        SplitMix64 rng(0x5EEDULL ^ std::hash<std::string>{}(p.name_));
        const Value mask =
            (p.domain_bits_ >= 64) ? ~Value{0} : ((Value{1} << p.domain_bits_) - 1);
        for (int i = 0; i < 10000; ++i) {
            Value v = rng.next() & mask;
            if (p.inv_fn_(p.fwd_fn_(v)) != v || p.fwd_fn_(p.inv_fn_(v)) != v) {
                throw std::invalid_argument("permutation '" + p.name_ +
                                            "' fails the inverse spot-check");
            }
        }
    }
    return p;
}

int ClassicalPermutation::field_index(const std::string& name) const {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (fields_[i].name == name) {
            return static_cast<int>(i);
        }
    }
    throw std::invalid_argument("permutation '" + name_ + "' has no field '" + name + "'");
}

Value ClassicalPermutation::forward(Value v) const {
    if (!fwd_table_.empty()) {
        return fwd_table_[v];
    }
    return fwd_fn_(v);
}

Value ClassicalPermutation::inverse(Value v) const {
    if (!inv_table_.empty()) {
        return inv_table_[v];
    }
    return inv_fn_(v);
}

bool ClassicalPermutation::same_fields(const ClassicalPermutation& other) const {
    if (fields_.size() != other.fields_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (fields_[i].name != other.fields_[i].name ||
            fields_[i].width != other.fields_[i].width) {
            return false;
        }
    }
    return true;
}

nlohmann::json ClassicalPermutation::to_json() const {
    if (!table_backed()) {
        throw std::invalid_argument("permutation '" + name_ + "' is not table-backed");
    }
    nlohmann::json regs = nlohmann::json::array();
    for (const auto& f : fields_) {
        regs.push_back({{"name", f.name}, {"width", f.width}});
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t v = 0; v < fwd_table_.size(); ++v) {
        pairs.push_back({v, fwd_table_[v]});
    }
    return {{"name", name_}, {"registers", regs}, {"pairs", pairs}};
}

BoundPermutation bind_fields(const ClassicalPermutation& perm,
                             const std::vector<std::pair<std::string, Value>>& bound) {
    const auto& fields = perm.fields();
    std::vector<int> bound_idx;
    std::vector<Value> bound_val(fields.size(), 0);
    std::vector<bool> is_bound(fields.size(), false);
    for (const auto& [name, value] : bound) {
        int idx = perm.field_index(name);
        if (is_bound[idx]) {
            throw std::invalid_argument("field '" + name + "' bound twice");
        }
        if (value >= (Value{1} << fields[idx].width)) {
            throw std::invalid_argument("bound value too wide for field '" + name + "'");
        }
        is_bound[idx] = true;
        bound_val[idx] = value;
        bound_idx.push_back(idx);
    }

    std::vector<ClassicalPermutation::Field> free_fields;
    std::vector<int> free_idx;
    int free_bits = 0;
    int free_prefix = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (!is_bound[i]) {
            free_fields.push_back(fields[i]);
            free_idx.push_back(static_cast<int>(i));
            free_bits += fields[i].width;
            if (static_cast<int>(i) < perm.adversary_prefix()) {
                ++free_prefix;
            }
        }
    }
    if (free_fields.empty()) {
        throw std::invalid_argument("binding every field leaves no permutation");
    }

    auto combine = [&fields, &is_bound, &bound_val](Value free) {
        Value packed = 0;
        // Build from the most significant field down; free bits are consumed
        // from the top of `free`.
        int free_remaining = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!is_bound[i]) {
                free_remaining += fields[i].width;
            }
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            Value v;
            if (is_bound[i]) {
                v = bound_val[i];
            } else {
                free_remaining -= fields[i].width;
                v = (free >> free_remaining) & ((Value{1} << fields[i].width) - 1);
            }
            packed = (packed << fields[i].width) | v;
        }
        return packed;
    };
    auto split_free = [&fields, &is_bound](Value packed) {
        Value free = 0;
        int shift = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            shift += fields[i].width;
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            shift -= fields[i].width;
            if (!is_bound[i]) {
                free = (free << fields[i].width) | ((packed >> shift) & ((Value{1} << fields[i].width) - 1));
            }
        }
        return free;
    };
    auto split_bound = [&fields](Value packed, int idx) {
        int shift = 0;
        for (std::size_t i = fields.size(); i-- > static_cast<std::size_t>(idx) + 1;) {
            shift += fields[i].width;
        }
        return (packed >> shift) & ((Value{1} << fields[idx].width) - 1);
    };

    // The bound fields must evolve autonomously: their outputs may not depend
    // on the free inputs.
    Value ref_out = perm.forward(combine(0));
    std::vector<Value> bound_out(fields.size(), 0);
    for (int idx : bound_idx) {
        bound_out[idx] = split_bound(ref_out, idx);
    }
    auto check_autonomy = [&](Value free) {
        Value out = perm.forward(combine(free));
        for (int idx : bound_idx) {
            if (split_bound(out, idx) != bound_out[idx]) {
                throw std::invalid_argument("field '" + fields[idx].name +
                                            "' of '" + perm.name() +
                                            "' does not evolve autonomously under this binding");
            }
        }
    };
    if (free_bits <= 16) {
        for (Value free = 0; free < (Value{1} << free_bits); ++free) {
            check_autonomy(free);
        }
    } else {
        SplitMix64 rng(0xB1ADULL);
        const Value mask = (Value{1} << free_bits) - 1;
        for (int i = 0; i < 4096; ++i) {
            check_autonomy(rng.next() & mask);
        }
    }

    auto fwd = [perm, combine, split_free](Value free) {
        return split_free(perm.forward(combine(free)));
    };
    // The inverse re-attaches the bound fields' *output* values.
    auto combine_out = [&fields, &is_bound, bound_out](Value free) {
        Value packed = 0;
        int free_remaining = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!is_bound[i]) {
                free_remaining += fields[i].width;
            }
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            Value v;
            if (is_bound[i]) {
                v = bound_out[i];
            } else {
                free_remaining -= fields[i].width;
                v = (free >> free_remaining) & ((Value{1} << fields[i].width) - 1);
            }
            packed = (packed << fields[i].width) | v;
        }
        return packed;
    };
    auto inv = [perm, combine_out, split_free](Value free) {
        return split_free(perm.inverse(combine_out(free)));
    };

    BoundPermutation result;
    result.perm = ClassicalPermutation::from_function(perm.name() + "[bound]",
                                                      std::move(free_fields), free_prefix,
                                                      std::move(fwd), std::move(inv));
    for (int idx : bound_idx) {
        result.updated.emplace_back(fields[idx].name, bound_out[idx]);
    }
    return result;
}

void apply_classical_permutation(QState& state, const ClassicalPermutation& perm,
                                 std::span<const std::string> attach) {
    const auto& layout = state.layout();
    const auto& fields = perm.fields();
    if (attach.size() != fields.size()) {
        throw std::invalid_argument("attach list size does not match permutation fields");
    }
    std::vector<int> reg_idx(fields.size());
    std::unordered_set<int> used;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        reg_idx[i] = layout.index_of(attach[i]);
        if (layout.width(reg_idx[i]) != fields[i].width) {
            throw std::invalid_argument("register '" + attach[i] + "' width does not match field '" +
                                        fields[i].name + "'");
        }
        if (!used.insert(reg_idx[i]).second) {
            throw std::invalid_argument("register '" + attach[i] + "' attached twice");
        }
    }
    auto& amps = state.amps();
    const std::size_t dim = layout.dim();
    StateVector next = StateVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        Value packed = layout.extract(i, reg_idx);
        Value out = perm.forward(packed);
        Value j = layout.insert(i, reg_idx, out);
        next(static_cast<Eigen::Index>(j)) = amps(static_cast<Eigen::Index>(i));
    }
    amps = std::move(next);
}

void apply_classical_permutation(QState& state, const ClassicalPermutation& perm) {
    std::vector<std::string> attach;
    for (const auto& f : perm.fields()) {
        attach.push_back(f.name);
    }
    apply_classical_permutation(state, perm, attach);
}

std::vector<Value> DifferencePredicate::listing(std::size_t max_count) const {
    if (domain_bits > ClassicalPermutation::kTableBits) {
        throw std::invalid_argument("difference listing needs a small domain");
    }
    std::vector<Value> out;
    const Value n = Value{1} << domain_bits;
    for (Value v = 0; v < n && out.size() < max_count; ++v) {
        if (differs(v)) {
            out.push_back(v);
        }
    }
    return out;
}

bool DifferencePredicate::empty() const {
    const Value n = Value{1} << domain_bits;
    for (Value v = 0; v < n; ++v) {
        if (differs(v)) {
            return false;
        }
    }
    return true;
}

DifferencePredicate difference_set(const ClassicalPermutation& p, const ClassicalPermutation& q) {
    if (!p.same_fields(q)) {
        throw std::invalid_argument("difference_set needs identical register tuples");
    }
    DifferencePredicate pred;
    pred.fields = p.fields();
    pred.domain_bits = p.domain_bits();
    auto ps = std::make_shared<ClassicalPermutation>(p);
    auto qs = std::make_shared<ClassicalPermutation>(q);
    pred.differs = [ps, qs](Value v) { return ps->forward(v) != qs->forward(v); };
    return pred;
}

ClassicalPermutation make_xor_oracle(const std::vector<Value>& f, int in_bits, int out_bits,
                                     std::string name) {
    if (f.size() != (std::size_t{1} << in_bits)) {
        throw std::invalid_argument("function table size must be 2^in_bits");
    }
    for (Value y : f) {
        if (y >= (Value{1} << out_bits)) {
            throw std::invalid_argument("function table entry wider than out_bits");
        }
    }
    auto table = f;
    auto fn = [table, in_bits, out_bits](Value v) {
        Value y = v & ((Value{1} << out_bits) - 1);
        Value x = v >> out_bits;
        return (x << out_bits) | (y ^ table[x]);
    };
    return ClassicalPermutation::from_function(
        std::move(name), {{"X", in_bits}, {"Y", out_bits}}, 2, fn, fn);
}

ClassicalPermutation make_swap_perm(int width, Value s, Value s_prime) {
    auto fn = [s, s_prime](Value v) {
        if (v == s) {
            return s_prime;
        }
        if (v == s_prime) {
            return s;
        }
        return v;
    };
    return ClassicalPermutation::from_function("swap", {{"X", width}}, 1, fn, fn);
}

std::vector<Value> swap_table(int width, Value s, Value s_prime) {
    std::vector<Value> t(std::size_t{1} << width);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = static_cast<Value>(i);
    }
    std::swap(t[s], t[s_prime]);
    return t;
}

std::vector<Value> compose_tables(const std::vector<Value>& outer, const std::vector<Value>& inner) {
    if (outer.size() != inner.size()) {
        throw std::invalid_argument("compose_tables size mismatch");
    }
    std::vector<Value> t(inner.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = outer[inner[i]];
    }
    return t;
}

std::vector<Value> invert_table(const std::vector<Value>& table) {
    std::vector<Value> inv(table.size(), ~Value{0});
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] >= table.size() || inv[table[i]] != ~Value{0}) {
            throw std::invalid_argument("invert_table input is not a bijection");
        }
        inv[table[i]] = static_cast<Value>(i);
    }
    return inv;
}

ClassicalPermutation make_ro(int l, int m) {
    const int h_bits = m << l;
    auto fn = [l, m, h_bits](Value v) {
        Value h = v & ((Value{1} << h_bits) - 1);
        Value y = (v >> h_bits) & ((Value{1} << m) - 1);
        Value x = v >> (h_bits + m);
        y ^= table_get(h, x, m);
        return (x << (h_bits + m)) | (y << h_bits) | h;
    };
    return ClassicalPermutation::from_function("Ro", {{"X", l}, {"Y", m}, {"H", h_bits}}, 2, fn, fn);
}

ClassicalPermutation make_fro(int l, int m) {
    const int h_bits = m << l;
    auto fn = [l, m, h_bits](Value v) {
        Value h = v & ((Value{1} << h_bits) - 1);
        Value y = (v >> h_bits) & ((Value{1} << m) - 1);
        Value x = v >> (h_bits + m);
        h = table_set(h, x, m, table_get(h, x, m) ^ y);
        return (x << (h_bits + m)) | (y << h_bits) | h;
    };
    return ClassicalPermutation::from_function("FRo", {{"X", l}, {"Y", m}, {"H", h_bits}}, 2, fn, fn);
}

ClassicalPermutation make_rep(int b, int l, int m, const std::vector<DyadicDistribution>& dists,
                              int x_bits, int i_bits, int r_bits) {
    if (dists.size() != (std::size_t{1} << x_bits)) {
        throw std::invalid_argument("Rep needs one distribution per X value");
    }
    for (const auto& d : dists) {
        if (d.domain_width() != l || d.seed_width() != r_bits) {
            throw std::invalid_argument("Rep distribution widths do not match the game");
        }
    }
    const int h_bits = m << l;
    const int z_bits = m << i_bits;
    const int r_field_bits = r_bits << i_bits;
    std::vector<ClassicalPermutation::Field> fields = {
        {"X", x_bits}, {"Y", l}, {"H", h_bits}, {"I", i_bits}, {"Z", z_bits}, {"R", r_field_bits}};

    struct Shape {
        int l, m, x_bits, i_bits, r_bits, h_bits, z_bits, r_field_bits;
    };
    Shape s{l, m, x_bits, i_bits, r_bits, h_bits, z_bits, r_field_bits};

    auto unpack = [s](Value v, Value& x, Value& y, Value& h, Value& i, Value& z, Value& r) {
        r = v & ((Value{1} << s.r_field_bits) - 1);
        v >>= s.r_field_bits;
        z = v & ((Value{1} << s.z_bits) - 1);
        v >>= s.z_bits;
        i = v & ((Value{1} << s.i_bits) - 1);
        v >>= s.i_bits;
        h = v & ((Value{1} << s.h_bits) - 1);
        v >>= s.h_bits;
        y = v & ((Value{1} << s.l) - 1);
        x = v >> s.l;
    };
    auto pack = [s](Value x, Value y, Value h, Value i, Value z, Value r) {
        Value v = x;
        v = (v << s.l) | y;
        v = (v << s.h_bits) | h;
        v = (v << s.i_bits) | i;
        v = (v << s.z_bits) | z;
        v = (v << s.r_field_bits) | r;
        return v;
    };

    auto fwd = [b, s, dists, unpack, pack](Value v) {
        Value xi, y, h, i, z, r;
        unpack(v, xi, y, h, i, z, r);
        Value seed = table_get(r, i, s.r_bits);
        Value x = dists[xi].sample(seed);
        if (b == 1) {
            Value hv = table_get(h, x, s.m);
            Value zv = table_get(z, i, s.m);
            h = table_set(h, x, s.m, zv);
            z = table_set(z, i, s.m, hv);
        }
        y ^= x;
        i = (i + 1) & ((Value{1} << s.i_bits) - 1);
        return pack(xi, y, h, i, z, r);
    };
    auto inv = [b, s, dists, unpack, pack](Value v) {
        Value xi, y, h, i, z, r;
        unpack(v, xi, y, h, i, z, r);
        i = (i + (Value{1} << s.i_bits) - 1) & ((Value{1} << s.i_bits) - 1);
        Value seed = table_get(r, i, s.r_bits);
        Value x = dists[xi].sample(seed);
        y ^= x;
        if (b == 1) {
            Value hv = table_get(h, x, s.m);
            Value zv = table_get(z, i, s.m);
            h = table_set(h, x, s.m, zv);
            z = table_set(z, i, s.m, hv);
        }
        return pack(xi, y, h, i, z, r);
    };
    return ClassicalPermutation::from_function(b == 1 ? "Rep_1" : "Rep_0", std::move(fields), 2,
                                               fwd, inv);
}

std::pair<ClassicalPermutation, ClassicalPermutation> make_pz_pair(int l, int m) {
    const int h_bits = m << l;
    std::vector<ClassicalPermutation::Field> fields = {
        {"X", l}, {"Y", m}, {"H0", h_bits}, {"H1", h_bits}};
    auto reader = [l, m, h_bits](bool from_h1) {
        return [l, m, h_bits, from_h1](Value v) {
            Value h1 = v & ((Value{1} << h_bits) - 1);
            Value h0 = (v >> h_bits) & ((Value{1} << h_bits) - 1);
            Value y = (v >> (2 * h_bits)) & ((Value{1} << m) - 1);
            Value x = v >> (2 * h_bits + m);
            y ^= table_get(from_h1 ? h1 : h0, x, m);
            return (((x << m | y) << h_bits | h0) << h_bits) | h1;
        };
    };
    auto p = ClassicalPermutation::from_function("P_h1", fields, 2, reader(true), reader(true));
    auto pp = ClassicalPermutation::from_function("P_h0", fields, 2, reader(false), reader(false));
    return {std::move(p), std::move(pp)};
}

namespace {

std::vector<ClassicalPermutation::Field> split_input_fields(int l, int k, int n,
                                                            std::vector<ClassicalPermutation::Field> tail) {
    std::vector<ClassicalPermutation::Field> fields;
    fields.push_back({"X", l});
    if (k > 0) {
        fields.push_back({"M", k});
    }
    fields.push_back({"Y", n});
    for (auto& f : tail) {
        fields.push_back(std::move(f));
    }
    return fields;
}

}  // namespace

ClassicalPermutation make_ro_split(int l, int k, int n) {
    const int h_bits = n << (l + k);
    auto fields = split_input_fields(l, k, n, {{"H", h_bits}});
    auto fn = [l, k, n, h_bits](Value v) {
        Value h = v & ((Value{1} << h_bits) - 1);
        Value y = (v >> h_bits) & ((Value{1} << n) - 1);
        Value m = (v >> (h_bits + n)) & ((Value{1} << k) - 1);
        Value x = v >> (h_bits + n + k);
        y ^= table_get(h, (x << k) | m, n);
        return (((((x << k) | m) << n) | y) << h_bits) | h;
    };
    return ClassicalPermutation::from_function("Ro_split", std::move(fields), k > 0 ? 3 : 2, fn,
                                               fn);
}

ClassicalPermutation make_ro0(int a, int l, int k, int n) {
    const int h_bits = n << (l + k);
    const int hh_bits = n << k;
    auto fields = split_input_fields(l, k, n, {{"H", h_bits}, {"h", hh_bits}, {"x", l}});
    auto fn = [a, l, k, n, h_bits, hh_bits](Value v) {
        Value xs = v & ((Value{1} << l) - 1);
        v >>= l;
        Value hh = v & ((Value{1} << hh_bits) - 1);
        v >>= hh_bits;
        Value h = v & ((Value{1} << h_bits) - 1);
        v >>= h_bits;
        Value y = v & ((Value{1} << n) - 1);
        v >>= n;
        Value m = v & ((Value{1} << k) - 1);
        Value x = v >> k;
        if (x == xs && a == 1) {
            y ^= table_get(hh, m, n);
        } else {
            y ^= table_get(h, (x << k) | m, n);
        }
        Value out = (((x << k) | m) << n) | y;
        out = (out << h_bits) | h;
        out = (out << hh_bits) | hh;
        out = (out << l) | xs;
        return out;
    };
    return ClassicalPermutation::from_function(a == 1 ? "Ro0_1" : "Ro0_0", std::move(fields),
                                               k > 0 ? 3 : 2, fn, fn);
}

ClassicalPermutation make_ro1(int c, int l, int k, int n) {
    const int h_bits = n << (l + k);
    std::vector<ClassicalPermutation::Field> tail = {{"H", h_bits}, {"B1", n}, {"x", l}};
    if (k > 0) {
        tail.push_back({"m", k});
    }
    auto fields = split_input_fields(l, k, n, std::move(tail));
    auto fn = [c, l, k, n, h_bits](Value v) {
        Value ms = 0;
        if (k > 0) {
            ms = v & ((Value{1} << k) - 1);
            v >>= k;
        }
        Value xs = v & ((Value{1} << l) - 1);
        v >>= l;
        Value b1 = v & ((Value{1} << n) - 1);
        v >>= n;
        Value h = v & ((Value{1} << h_bits) - 1);
        v >>= h_bits;
        Value y = v & ((Value{1} << n) - 1);
        v >>= n;
        Value m = v & ((Value{1} << k) - 1);
        Value x = v >> k;
        if (x == xs && m == ms && c == 1) {
            y ^= b1;
        } else {
            y ^= table_get(h, (x << k) | m, n);
        }
        Value out = (((x << k) | m) << n) | y;
        out = (out << h_bits) | h;
        out = (out << n) | b1;
        out = (out << l) | xs;
        if (k > 0) {
            out = (out << k) | ms;
        }
        return out;
    };
    return ClassicalPermutation::from_function(c == 1 ? "Ro1_1" : "Ro1_0", std::move(fields),
                                               k > 0 ? 3 : 2, fn, fn);
}

namespace {

struct SampShape {
    int l, n, r_bits, h_bits;
};

void unpack_samp(const SampShape& s, Value v, Value& x, Value& y, Value& h, Value& b, Value& vv,
                 Value& r, Value& xs) {
    xs = v & ((Value{1} << s.l) - 1);
    v >>= s.l;
    r = v & ((Value{1} << s.r_bits) - 1);
    v >>= s.r_bits;
    vv = v & ((Value{1} << s.l) - 1);
    v >>= s.l;
    b = v & ((Value{1} << s.n) - 1);
    v >>= s.n;
    h = v & ((Value{1} << s.h_bits) - 1);
    v >>= s.h_bits;
    y = v & ((Value{1} << s.n) - 1);
    x = v >> s.n;
}

Value pack_samp(const SampShape& s, Value x, Value y, Value h, Value b, Value vv, Value r,
                Value xs) {
    Value v = x;
    v = (v << s.n) | y;
    v = (v << s.h_bits) | h;
    v = (v << s.n) | b;
    v = (v << s.l) | vv;
    v = (v << s.r_bits) | r;
    v = (v << s.l) | xs;
    return v;
}

std::vector<ClassicalPermutation::Field> samp_fields(const SampShape& s) {
    return {{"X", s.l},      {"Y", s.n}, {"H", s.h_bits}, {"B", s.n},
            {"V", s.l},      {"R", s.r_bits}, {"Xs", s.l}};
}

void check_family(const std::vector<DyadicDistribution>& family, int l, int r_bits) {
    if (family.size() != (std::size_t{1} << l)) {
        throw std::invalid_argument("sampling family needs one distribution per message value");
    }
    for (const auto& d : family) {
        if (d.domain_width() != l || d.seed_width() != r_bits) {
            throw std::invalid_argument("sampling family widths do not match the game");
        }
    }
}

}  // namespace

ClassicalPermutation make_samp(int b, int l, int n, const std::vector<DyadicDistribution>& family,
                               int r_bits) {
    check_family(family, l, r_bits);
    SampShape s{l, n, r_bits, n << l};
    auto fwd = [b, s, family](Value v) {
        Value x, y, h, bb, vv, r, xs;
        unpack_samp(s, v, x, y, h, bb, vv, r, xs);
        vv ^= x;
        xs ^= family[x].sample(r);
        y ^= (b == 1) ? bb : table_get(h, xs, s.n);
        return pack_samp(s, x, y, h, bb, vv, r, xs);
    };
    auto inv = [b, s, family](Value v) {
        Value x, y, h, bb, vv, r, xs;
        unpack_samp(s, v, x, y, h, bb, vv, r, xs);
        y ^= (b == 1) ? bb : table_get(h, xs, s.n);
        xs ^= family[x].sample(r);
        vv ^= x;
        return pack_samp(s, x, y, h, bb, vv, r, xs);
    };
    return ClassicalPermutation::from_function(b == 1 ? "Samp_1" : "Samp_0", samp_fields(s), 2,
                                               fwd, inv);
}

ClassicalPermutation make_fsamp(int a, int b, int l, int n,
                                const std::vector<DyadicDistribution>& family, int r_bits) {
    check_family(family, l, r_bits);
    SampShape s{l, n, r_bits, n << l};
    auto fwd = [a, b, s, family](Value v) {
        Value x, y, h, bb, vv, r, xs;
        unpack_samp(s, v, x, y, h, bb, vv, r, xs);
        vv ^= x;
        xs ^= family[x].sample(r);
        if (a == 1) {
            Value hv = table_get(h, xs, s.n);
            h = table_set(h, xs, s.n, bb);
            bb = hv;
        }
        if (b == 0) {
            h = table_set(h, xs, s.n, table_get(h, xs, s.n) ^ y);
        } else {
            bb ^= y;
        }
        return pack_samp(s, x, y, h, bb, vv, r, xs);
    };
    auto inv = [a, b, s, family](Value v) {
        Value x, y, h, bb, vv, r, xs;
        unpack_samp(s, v, x, y, h, bb, vv, r, xs);
        if (b == 0) {
            h = table_set(h, xs, s.n, table_get(h, xs, s.n) ^ y);
        } else {
            bb ^= y;
        }
        if (a == 1) {
            Value hv = table_get(h, xs, s.n);
            h = table_set(h, xs, s.n, bb);
            bb = hv;
        }
        xs ^= family[x].sample(r);
        vv ^= x;
        return pack_samp(s, x, y, h, bb, vv, r, xs);
    };
    std::string name = "FSamp_" + std::to_string(a) + std::to_string(b);
    return ClassicalPermutation::from_function(std::move(name), samp_fields(s), 2, fwd, inv);
}

ClassicalPermutation make_fro1(int c, int l, int n) {
    const int h_bits = n << l;
    std::vector<ClassicalPermutation::Field> fields = {
        {"X", l}, {"Y", n}, {"H", h_bits}, {"B", n}, {"Xs", l}};
    auto fn = [c, l, n, h_bits](Value v) {
        Value xs = v & ((Value{1} << l) - 1);
        v >>= l;
        Value b = v & ((Value{1} << n) - 1);
        v >>= n;
        Value h = v & ((Value{1} << h_bits) - 1);
        v >>= h_bits;
        Value y = v & ((Value{1} << n) - 1);
        Value x = v >> n;
        if (x == xs) {
            if (c == 1) {
                b ^= y;
            } else {
                h = table_set(h, xs, n, table_get(h, xs, n) ^ y);
            }
        } else {
            h = table_set(h, x, n, table_get(h, x, n) ^ y);
        }
        Value out = (x << n) | y;
        out = (out << h_bits) | h;
        out = (out << n) | b;
        out = (out << l) | xs;
        return out;
    };
    return ClassicalPermutation::from_function(c == 1 ? "FRo1_1" : "FRo1_0", std::move(fields), 2,
                                               fn, fn);
}

ClassicalPermutation make_perm_pm(const std::vector<Value>& table, int width, std::string name) {
    auto inv = invert_table(table);
    auto fn = [table, inv, width](Value v) {
        Value y = v & ((Value{1} << width) - 1);
        Value x = (v >> width) & ((Value{1} << width) - 1);
        Value d = v >> (2 * width);
        y ^= (d == 1) ? table[x] : inv[x];
        return (d << (2 * width)) | (x << width) | y;
    };
    return ClassicalPermutation::from_function(
        std::move(name), {{"D", 1}, {"X", width}, {"Y", width}}, 3, fn, fn);
}

ClassicalPermutation make_direction_oracle(const ClassicalPermutation& p) {
    const int w = p.domain_bits();
    std::vector<ClassicalPermutation::Field> fields;
    fields.push_back({"D", 1});
    for (const auto& f : p.fields()) {
        fields.push_back(f);
    }
    for (const auto& f : p.fields()) {
        fields.push_back({f.name + "_out", f.width});
    }
    auto shared = std::make_shared<ClassicalPermutation>(p);
    auto fn = [shared, w](Value v) {
        Value out = v & ((Value{1} << w) - 1);
        Value in = (v >> w) & ((Value{1} << w) - 1);
        Value d = v >> (2 * w);
        out ^= (d == 1) ? shared->forward(in) : shared->inverse(in);
        return (d << (2 * w)) | (in << w) | out;
    };
    const int prefix = static_cast<int>(fields.size());
    return ClassicalPermutation::from_function(p.name() + "_pm", std::move(fields), prefix, fn, fn);
}

}  // namespace o2hlab
