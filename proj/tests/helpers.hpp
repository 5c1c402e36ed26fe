#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "ddmod/types.hpp"

namespace test {

using ddmod::cplx;
using ddmod::ComplexMatrix;
using ddmod::ComplexVector;
using ddmod::kPi;

inline ComplexMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = cplx(nd(rng), nd(rng));
    return m;
}

inline double max_abs(const ComplexMatrix& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

inline cplx expj(double phase) {
    return std::polar(1.0, phase);
}

// Dense DFT entry written out from the definition, independent of the library.
inline cplx dft_entry(int a, int b, int n) {
    return expj(-2.0 * kPi * a * b / n) / std::sqrt(static_cast<double>(n));
}

inline ComplexMatrix unit_grid(int k, int n, int j) {
    ComplexMatrix e = ComplexMatrix::Zero(k, n);
    e(j) = 1.0;
    return e;
}

}  // namespace test
