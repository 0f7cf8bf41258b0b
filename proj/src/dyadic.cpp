#include "o2hlab/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace o2hlab {

DyadicDistribution::DyadicDistribution(int domain_width, int seed_width,
                                       std::vector<std::uint64_t> numerators)
    : domain_width_(domain_width), seed_width_(seed_width), numerators_(std::move(numerators)) {
    if (domain_width < 1 || domain_width > 20) {
        throw std::invalid_argument("dyadic distribution domain width out of range");
    }
    if (seed_width < 1 || seed_width > 62) {
        throw std::invalid_argument("dyadic distribution seed width out of range");
    }
    if (numerators_.size() != (std::size_t{1} << domain_width)) {
        throw std::invalid_argument("dyadic distribution table size mismatch");
    }
    std::uint64_t total = 0;
    cumulative_.resize(numerators_.size());
    for (std::size_t x = 0; x < numerators_.size(); ++x) {
        cumulative_[x] = total;
        total += numerators_[x];
    }
    if (total != (std::uint64_t{1} << seed_width)) {
        throw std::invalid_argument("dyadic distribution numerators must sum to 2^seed_width");
    }
}

DyadicDistribution DyadicDistribution::point_mass(int domain_width, Value x, int seed_width) {
    std::vector<std::uint64_t> num(std::size_t{1} << domain_width, 0);
    num.at(x) = std::uint64_t{1} << seed_width;
    return DyadicDistribution(domain_width, seed_width, std::move(num));
}

DyadicDistribution DyadicDistribution::uniform(int domain_width, int seed_width) {
    if (seed_width < domain_width) {
        throw std::invalid_argument("uniform distribution needs seed_width >= domain_width");
    }
    std::vector<std::uint64_t> num(std::size_t{1} << domain_width,
                                   std::uint64_t{1} << (seed_width - domain_width));
    return DyadicDistribution(domain_width, seed_width, std::move(num));
}

DyadicDistribution DyadicDistribution::uniform_over(int domain_width,
                                                    const std::vector<Value>& support,
                                                    int seed_width) {
    if (support.empty() || (support.size() & (support.size() - 1)) != 0) {
        throw std::invalid_argument("uniform_over needs a power-of-two support size");
    }
    std::uint64_t share = (std::uint64_t{1} << seed_width) / support.size();
    if (share * support.size() != (std::uint64_t{1} << seed_width)) {
        throw std::invalid_argument("uniform_over support does not divide 2^seed_width");
    }
    std::vector<std::uint64_t> num(std::size_t{1} << domain_width, 0);
    for (Value x : support) {
        num.at(x) += share;
    }
    return DyadicDistribution(domain_width, seed_width, std::move(num));
}

double DyadicDistribution::probability(Value x) const {
    return std::ldexp(static_cast<double>(numerators_[x]), -seed_width_);
}

double DyadicDistribution::max_probability() const {
    std::uint64_t best = 0;
    for (auto n : numerators_) {
        best = std::max(best, n);
    }
    return std::ldexp(static_cast<double>(best), -seed_width_);
}

Value DyadicDistribution::sample(Value seed) const {
    // seed lies in exactly one cumulative interval.
    std::size_t lo = 0;
    std::size_t hi = numerators_.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (seed >= cumulative_[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return static_cast<Value>(lo);
}

Value DyadicDistribution::seed_for(Value x) const {
    if (numerators_[x] == 0) {
        throw std::invalid_argument("seed_for needs a value with positive probability");
    }
    return cumulative_[x];
}

double DyadicDistribution::min_entropy() const {
    return -std::log2(max_probability());
}

double DyadicDistribution::collision_entropy() const {
    double sum = 0.0;
    for (std::size_t x = 0; x < numerators_.size(); ++x) {
        double p = probability(static_cast<Value>(x));
        sum += p * p;
    }
    return -std::log2(sum);
}

double min_entropy(const DyadicDistribution& d) {
    return d.min_entropy();
}

double collision_entropy(const DyadicDistribution& d) {
    return d.collision_entropy();
}

}  // namespace o2hlab
