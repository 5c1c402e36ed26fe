#pragma once

#include <cmath>

#include "ddmod/config.hpp"
#include "ddmod/types.hpp"

namespace ddmod {

/// Per-bin linear SINR, K x N, with N_G guard rows at each edge.
struct SinrMap {
    RealMatrix values;
    int guard = 0;

    int subcarriers() const { return static_cast<int>(values.rows()); }
    int symbols() const { return static_cast<int>(values.cols()); }
    bool is_guard(int k) const { return k < guard || k >= subcarriers() - guard; }
};

/// Columns d_j of (C C^H + s2 I)^{-1} C. Throws IllConditioned when the
/// regularised Gram matrix is not positive definite.
ComplexMatrix mmse_filters(const ComplexMatrix& c, double noise_var);

/// x_hat = C^H (C C^H + s2 I)^{-1} y via one Cholesky solve.
ComplexVector mmse_detect(const ComplexMatrix& c, const ComplexVector& y, double noise_var);

/// Post-MMSE SINR of every column of C:
/// |d^H C_j|^2 / (sum_{i != j} |d^H C_i|^2 + s2 |d|^2).
SinrMap sinr_map(const ComplexMatrix& c, double noise_var, int subcarriers, int symbols);

/// Mean linear SINR over bins k = N_G .. K - N_G - 1, all n.
double net_sinr(const SinrMap& map, int guard);
double net_sinr_db(const SinrMap& map, int guard);

/// (xi / (K N)) sum_{non-guard} log2(1 + SINR).
double avg_spectral_efficiency(const SinrMap& map, double efficiency, int guard);

/// |x_hat - x|^2 / |x|^2.
double normalized_mse(const ComplexVector& estimate, const ComplexVector& reference);

/// T / (T + T_CP).
double otfs_efficiency(const ModemConfig& cfg);
/// CP-free transmission.
inline double drufmc_efficiency() { return 1.0; }

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace ddmod
