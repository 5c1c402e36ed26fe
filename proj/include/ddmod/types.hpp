#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace ddmod {

using cplx = std::complex<double>;

// Dense complex matrices are column-major, so vec(X) is X.reshaped() and
// entry (k, n) of a K x N grid sits at n*K + k.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

inline ComplexVector vec(const ComplexMatrix& m) {
    return m.reshaped();
}

/// Linear map y = C x between vectorised K x N input and output grids.
struct EffectiveChannel {
    ComplexMatrix matrix;
    double tx_power = 1.0;
};

inline ComplexMatrix invec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    return v.reshaped(rows, cols);
}

}  // namespace ddmod
