#pragma once

#include <cstdint>
#include <vector>

#include "o2hlab/statevec.hpp"

namespace o2hlab {

// Probability distribution over l-bit values with dyadic weights k/2^r,
// sampled exactly from an r-bit seed. The seed map walks the cumulative
// table in value order, so the induced distribution of a uniform seed
// equals the table exactly.
class DyadicDistribution {
  public:
    DyadicDistribution(int domain_width, int seed_width, std::vector<std::uint64_t> numerators);

    static DyadicDistribution point_mass(int domain_width, Value x, int seed_width);
    static DyadicDistribution uniform(int domain_width, int seed_width);
    // Uniform over an explicit support set.
    static DyadicDistribution uniform_over(int domain_width, const std::vector<Value>& support,
                                           int seed_width);

    int domain_width() const { return domain_width_; }
    int seed_width() const { return seed_width_; }
    std::size_t domain_size() const { return numerators_.size(); }
    std::uint64_t numerator(Value x) const { return numerators_[x]; }
    double probability(Value x) const;
    double max_probability() const;

    // Value assigned to an r-bit seed.
    Value sample(Value seed) const;
    // A representative seed mapping to x; requires positive probability.
    Value seed_for(Value x) const;

    double min_entropy() const;        // -log2(max probability)
    double collision_entropy() const;  // -log2(sum of squared probabilities)

  private:
    int domain_width_;
    int seed_width_;
    std::vector<std::uint64_t> numerators_;
    std::vector<std::uint64_t> cumulative_;  // cumulative_[x] = sum of numerators below x
};

double min_entropy(const DyadicDistribution& d);
double collision_entropy(const DyadicDistribution& d);

}  // namespace o2hlab
