#include "o2hlab/games.hpp"

#include <stdexcept>

namespace o2hlab {

namespace {

int ceil_log2(int n) {
    int bits = 0;
    while ((1 << bits) < n) {
        ++bits;
    }
    return bits;
}

void check_ghhm(const GhhmConfig& cfg) {
    if (cfg.l < 1 || cfg.m < 1 || cfg.n < 0) {
        throw std::invalid_argument("bad ghhm sizes");
    }
    if (static_cast<int>(cfg.q.size()) != cfg.n + 1) {
        throw std::invalid_argument("ghhm needs one query count per stage");
    }
    if (static_cast<int>(cfg.stage_dist.size()) != cfg.n) {
        throw std::invalid_argument("ghhm needs one distribution index per round");
    }
    if (cfg.n > 0 && cfg.distributions.empty()) {
        throw std::invalid_argument("ghhm needs registered distributions");
    }
    for (int d : cfg.stage_dist) {
        if (d < 0 || d >= static_cast<int>(cfg.distributions.size())) {
            throw std::invalid_argument("stage distribution index out of range");
        }
    }
    for (const auto& dist : cfg.distributions) {
        if (dist.domain_width() != cfg.l || dist.seed_width() != cfg.r) {
            throw std::invalid_argument("registered distribution widths do not match the game");
        }
    }
}

// Distributions padded to the full index range of the X field.
std::vector<DyadicDistribution> padded_distributions(const GhhmConfig& cfg) {
    std::vector<DyadicDistribution> dists = cfg.distributions;
    if (dists.empty()) {
        dists.push_back(DyadicDistribution::point_mass(cfg.l, 0, cfg.r));
    }
    const std::size_t want = std::size_t{1} << ceil_log2(static_cast<int>(dists.size()));
    while (dists.size() < want) {
        dists.push_back(dists[0]);
    }
    return dists;
}

// Enumerates the used R entries through the values they induce: one branch
// per support tuple (x_1, ..., x_n), weighted by the product of the exact
// dyadic probabilities, with a representative seed stored per entry.
struct SeedBranch {
    double weight;
    Value r_field;
};
std::vector<SeedBranch> seed_branches(const GhhmConfig& cfg) {
    std::vector<SeedBranch> branches = {{1.0, 0}};
    for (int i = 0; i < cfg.n; ++i) {
        const auto& dist = cfg.distributions[static_cast<std::size_t>(cfg.stage_dist[i])];
        std::vector<SeedBranch> next;
        for (const auto& br : branches) {
            for (Value x = 0; x < (Value{1} << cfg.l); ++x) {
                if (dist.numerator(x) == 0) {
                    continue;
                }
                Value seed = dist.seed_for(x);
                next.push_back({br.weight * dist.probability(x),
                                br.r_field | (seed << (i * cfg.r))});
            }
        }
        branches = std::move(next);
    }
    return branches;
}

struct WrapSpec {
    bool hadamard_y_on_hash = false;   // purified / hybrid 3
    bool hadamard_yh_on_hash = false;  // hybrid 2
    bool hadamard_zh_on_rep = false;   // hybrid 2
};

// Surround hash/rep calls with the mode's Hadamard factors. The hash call's
// answer register is the second register it lists.
AdversaryProgram wrap_ghhm_program(const AdversaryProgram& user, const WrapSpec& spec,
                                   const std::vector<RegisterLayout::Register>& all_regs) {
    AdversaryProgram prog = user;
    prog.owned = all_regs;
    for (auto& stage : prog.stages) {
        std::vector<Step> steps;
        for (auto& step : stage.steps) {
            const auto* call = std::get_if<OracleCallStep>(&step);
            if (!call) {
                steps.push_back(std::move(step));
                continue;
            }
            if (call->slot == "hash" && (spec.hadamard_y_on_hash || spec.hadamard_yh_on_hash)) {
                std::vector<std::string> regs = {call->registers.at(1)};
                if (spec.hadamard_yh_on_hash) {
                    regs.push_back("H");
                }
                steps.push_back(HadamardStep{regs});
                steps.push_back(std::move(step));
                steps.push_back(HadamardStep{regs});
            } else if (call->slot == "rep" && spec.hadamard_zh_on_rep) {
                std::vector<std::string> regs = {"Z", "H"};
                steps.push_back(HadamardStep{regs});
                steps.push_back(std::move(step));
                steps.push_back(HadamardStep{regs});
            } else {
                steps.push_back(std::move(step));
            }
        }
        stage.steps = std::move(steps);
        stage.visible.clear();
    }
    return prog;
}

}  // namespace

int GhhmConfig::x_bits() const {
    return std::max(1, ceil_log2(static_cast<int>(std::max<std::size_t>(distributions.size(), 1))));
}

int GhhmConfig::i_bits() const {
    return std::max(1, ceil_log2(std::max(n, 1)));
}

nlohmann::json GhhmConfig::to_json() const {
    nlohmann::json dists = nlohmann::json::array();
    for (const auto& d : distributions) {
        std::vector<std::uint64_t> nums;
        for (Value x = 0; x < (Value{1} << d.domain_width()); ++x) {
            nums.push_back(d.numerator(x));
        }
        dists.push_back({{"domain_width", d.domain_width()},
                         {"seed_width", d.seed_width()},
                         {"numerators", nums}});
    }
    return {{"game", "ghhm"},
            {"l", l},
            {"m", m},
            {"n", n},
            {"q", q},
            {"distributions", dists},
            {"stage_dist", stage_dist},
            {"r", r},
            {"seed", seed}};
}

GhhmConfig GhhmConfig::from_json(const nlohmann::json& j) {
    GhhmConfig cfg;
    cfg.l = j.at("l").get<int>();
    cfg.m = j.at("m").get<int>();
    cfg.n = j.at("n").get<int>();
    cfg.q = j.at("q").get<std::vector<int>>();
    cfg.stage_dist = j.at("stage_dist").get<std::vector<int>>();
    cfg.r = j.at("r").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& d : j.at("distributions")) {
        cfg.distributions.emplace_back(d.at("domain_width").get<int>(),
                                       d.at("seed_width").get<int>(),
                                       d.at("numerators").get<std::vector<std::uint64_t>>());
    }
    return cfg;
}

AdversaryProgram build_ghhm_random_adversary(const GhhmConfig& cfg) {
    check_ghhm(cfg);
    SplitMix64 rng(cfg.seed);
    AdversaryProgram prog;
    prog.owned = {{"W", 1}, {"X", cfg.l}, {"Y", cfg.m}, {"YR", cfg.l}};
    std::vector<std::string> unitary_regs = {"W", "X", "Y", "YR"};
    const int dim = 1 << (1 + cfg.l + cfg.m + cfg.l);
    for (int i = 0; i <= cfg.n; ++i) {
        Stage stage;
        for (int j = 0; j < cfg.q[static_cast<std::size_t>(i)]; ++j) {
            stage.steps.push_back(LocalUnitaryStep{unitary_regs, random_unitary(rng, dim)});
            stage.steps.push_back(OracleCallStep{"hash", {"X", "Y"}});
        }
        stage.steps.push_back(LocalUnitaryStep{unitary_regs, random_unitary(rng, dim)});
        if (i < cfg.n) {
            stage.steps.push_back(OracleCallStep{"rep", {"YR"}});
        }
        prog.stages.push_back(std::move(stage));
    }
    prog.validate();
    return prog;
}

AdversaryProgram build_ghhm_point_mass_guesser() {
    AdversaryProgram prog;
    prog.owned = {{"W", 1}, {"X", 1}, {"Y", 1}, {"Y2", 1}, {"YR", 1}};
    Stage stage0;
    stage0.steps.push_back(OracleCallStep{"hash", {"X", "Y"}});
    stage0.steps.push_back(OracleCallStep{"rep", {"YR"}});
    Stage stage1;
    stage1.steps.push_back(OracleCallStep{"hash", {"X", "Y2"}});
    stage1.steps.push_back(make_equality_flip_step("W", 1, "Y", "Y2", 1));
    prog.stages = {std::move(stage0), std::move(stage1)};
    prog.validate();
    return prog;
}

GhhmConfig point_mass_guesser_config() {
    GhhmConfig cfg;
    cfg.l = 1;
    cfg.m = 1;
    cfg.n = 1;
    cfg.q = {1, 1};
    cfg.r = 2;
    cfg.distributions = {DyadicDistribution::point_mass(1, 0, 2)};
    cfg.stage_dist = {0};
    return cfg;
}

O2HExperiment make_ghhm_experiment(const GhhmConfig& cfg, const AdversaryProgram& program,
                                   GhhmMode mode) {
    check_ghhm(cfg);
    const auto dists = padded_distributions(cfg);
    const int xb = cfg.x_bits();
    const int ib = cfg.i_bits();
    const int h_bits = cfg.m << cfg.l;
    const int z_bits = cfg.m << ib;
    const int r_bits = cfg.r << ib;

    O2HExperiment exp;
    exp.o2h_slot = "rep";
    exp.p = make_rep(0, cfg.l, cfg.m, dists, xb, ib, cfg.r);
    exp.p_prime = make_rep(1, cfg.l, cfg.m, dists, xb, ib, cfg.r);

    std::vector<Value> xr_schedule;
    for (int d : cfg.stage_dist) {
        xr_schedule.push_back(static_cast<Value>(d));
    }
    if (!xr_schedule.empty()) {
        exp.o2h_schedule["XR"] = xr_schedule;
    }

    std::vector<RegisterLayout::Register> regs = program.owned;
    const bool in_state = mode != GhhmMode::Enumerated;
    if (in_state) {
        regs.push_back({"H", h_bits});
        regs.push_back({"Z", z_bits});
        regs.push_back({"R", r_bits});
    }
    exp.layout = RegisterLayout(regs);

    WrapSpec wrap;
    if (mode == GhhmMode::Purified) {
        wrap.hadamard_y_on_hash = true;
    } else if (mode == GhhmMode::Hybrid2) {
        wrap.hadamard_yh_on_hash = true;
        wrap.hadamard_zh_on_rep = true;
    }
    exp.program = wrap_ghhm_program(program, wrap, regs);

    const bool hash_fourier = mode == GhhmMode::Purified || mode == GhhmMode::Hybrid2;
    OracleBinding hash;
    hash.perm = hash_fourier ? make_fro(cfg.l, cfg.m) : make_ro(cfg.l, cfg.m);
    hash.sources = {FieldSource::from_call(), FieldSource::from_call(),
                    in_state ? FieldSource::state_reg("H") : FieldSource::bound("H")};
    exp.context_slots["hash"] = std::move(hash);

    exp.o2h_sources = {FieldSource::bound("XR"),
                       FieldSource::from_call(),
                       in_state ? FieldSource::state_reg("H") : FieldSource::bound("H"),
                       FieldSource::bound("I"),
                       in_state ? FieldSource::state_reg("Z") : FieldSource::bound("Z"),
                       in_state ? FieldSource::state_reg("R") : FieldSource::bound("R")};

    if (mode == GhhmMode::Enumerated) {
        const double h_weight = std::ldexp(1.0, -h_bits);
        const int z_used_bits = cfg.m * cfg.n;
        const double z_weight = std::ldexp(1.0, -z_used_bits);
        auto seeds = seed_branches(cfg);
        for (Value h = 0; h < (Value{1} << h_bits); ++h) {
            for (Value z = 0; z < (Value{1} << z_used_bits); ++z) {
                for (const auto& sb : seeds) {
                    BranchInit branch;
                    branch.weight = h_weight * z_weight * sb.weight;
                    branch.bound = {{"H", h}, {"Z", z}, {"R", sb.r_field}, {"I", 0}};
                    exp.branches.push_back(std::move(branch));
                }
            }
        }
        if (exp.branches.empty()) {
            exp.branches.push_back(BranchInit{});
            exp.branches.back().bound = {{"H", 0}, {"Z", 0}, {"R", 0}, {"I", 0}};
        }
    } else {
        BranchInit branch;
        branch.bound = {{"I", 0}};
        exp.branches.push_back(std::move(branch));
        if (mode == GhhmMode::Hybrid1 || mode == GhhmMode::Hybrid2) {
            exp.hadamard_init = {"H", "Z", "R"};
        } else {
            exp.hadamard_init = {"R"};
            exp.deferred_final_hadamard = {"H", "Z"};
        }
    }
    return exp;
}

double run_ghhm(const GhhmConfig& cfg, const AdversaryProgram& program, int b, GhhmMode mode) {
    auto exp = make_ghhm_experiment(cfg, program, mode);
    return run_hide(exp, b == 1);
}

std::vector<double> ghhm_sparsity_excess(const GhhmConfig& cfg, const AdversaryProgram& program,
                                         int b) {
    auto exp = make_ghhm_experiment(cfg, program, GhhmMode::Purified);
    const int q_total = exp.program.query_count("hash");
    std::vector<double> excess(static_cast<std::size_t>(q_total), 0.0);
    const int entries = 1 << cfg.l;

    auto post = [&](const std::string& slot, int j, RunContext& ctx) {
        if (slot != "hash") {
            return;
        }
        const auto& layout = ctx.state.layout();
        const int h_idx = layout.index_of("H");
        const auto& amps = ctx.state.amps();
        double mass = 0.0;
        for (std::size_t i = 0; i < layout.dim(); ++i) {
            Value h = layout.field(i, h_idx);
            if (table_nonzero_entries(h, entries, cfg.m) > j) {
                mass += std::norm(amps(static_cast<Eigen::Index>(i)));
            }
        }
        excess[static_cast<std::size_t>(j - 1)] += mass;
    };
    run_o2h_experiment(exp, b == 1, false, post);
    return excess;
}

}  // namespace o2hlab
