#include "o2hlab/rng.hpp"

namespace o2hlab {

Eigen::MatrixXcd random_unitary(SplitMix64& rng, int dim) {
    Eigen::MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            double re = rng.next_gaussian();
            double im = rng.next_gaussian();
            m(r, c) = std::complex<double>(re, im);
        }
    }
    // Modified Gram-Schmidt, column by column.
    for (int c = 0; c < dim; ++c) {
        for (int p = 0; p < c; ++p) {
            std::complex<double> overlap = m.col(p).dot(m.col(c));
            m.col(c) -= overlap * m.col(p);
        }
        m.col(c) /= m.col(c).norm();
    }
    return m;
}

std::vector<std::uint64_t> random_permutation_table(SplitMix64& rng, std::uint64_t n) {
    std::vector<std::uint64_t> table(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        table[i] = i;
    }
    for (std::uint64_t i = n; i > 1; --i) {
        std::uint64_t j = rng.next_below(i);
        std::swap(table[i - 1], table[j]);
    }
    return table;
}

std::vector<std::uint64_t> random_function_table(SplitMix64& rng, std::uint64_t entries, int out_bits) {
    std::vector<std::uint64_t> table(entries);
    std::uint64_t mask = (out_bits >= 64) ? ~0ULL : ((1ULL << out_bits) - 1);
    for (std::uint64_t i = 0; i < entries; ++i) {
        table[i] = rng.next() & mask;
    }
    return table;
}

}  // namespace o2hlab
