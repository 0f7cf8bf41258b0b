#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace o2hlab {

// Counter-mode SplitMix64 stream. All seeded randomness in the project
// (adversary populations, permutation tables, pseudo-Haar unitaries) is
// derived from this generator so that equal seeds give bit-equal objects.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        return next() % bound;
    }

    // Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do {
            u = next_double();
        } while (u <= 0.0);
        double v = next_double();
        double r = std::sqrt(-2.0 * std::log(u));
        double theta = 2.0 * std::numbers::pi * v;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Seeded pseudo-Haar unitary: complex Gaussian matrix followed by modified
// Gram-Schmidt on the columns. Deterministic function of the stream state.
Eigen::MatrixXcd random_unitary(SplitMix64& rng, int dim);

// Seeded permutation table on {0,...,n-1} (Fisher-Yates).
std::vector<std::uint64_t> random_permutation_table(SplitMix64& rng, std::uint64_t n);

// Seeded function table with `entries` outputs, each uniform in [0, 2^out_bits).
std::vector<std::uint64_t> random_function_table(SplitMix64& rng, std::uint64_t entries, int out_bits);

}  // namespace o2hlab
