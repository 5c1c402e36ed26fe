#pragma once

#include "ddmod/channel.hpp"
#include "ddmod/metrics.hpp"
#include "ddmod/otfs.hpp"
#include "ddmod/transforms.hpp"

namespace ddmod {

// OFDM baselines: the OTFS chain with ISFFT/SFFT removed, so data sits on
// the frequency-time grid directly.

inline ComplexVector ofdm_modulate(const ComplexMatrix& x_ft, const ModemBasis& basis) {
    return cp_ofdm_modulate(x_ft, basis);
}
inline ComplexMatrix ofdm_demodulate(const ComplexVector& r, const ModemBasis& basis) {
    return cp_ofdm_demodulate(r, basis);
}

/// KN x KN block-diagonal FT-domain channel, blocks sqrt(P_T) W H_i W^H.
EffectiveChannel ofdm_full_effective_channel(const ChannelMatrixSet& chan, const ModemBasis& basis);

enum class OneTapMode { Mmse, ZeroForcing };

/// Scalar coefficient c_{k,i} = (W H_i W^H)(k, k), K x N, without sqrt(P_T).
ComplexMatrix onetap_coefficients(const ChannelMatrixSet& chan, const ModemBasis& basis);

/// Per-bin equalisation of Y_FT. MMSE: conj(c) y / (sqrt(P_T) (|c|^2 + s2 / P_T));
/// ZF: y / (sqrt(P_T) c).
ComplexMatrix ofdm_onetap_fde(const ComplexMatrix& y_ft, const ComplexMatrix& coefficients, double noise_var,
                              double tx_power, OneTapMode mode = OneTapMode::Mmse);

/// One-tap SINR with inter-carrier leakage counted as interference:
/// |C(j, j)|^2 / (sum_{i != j} |C(j, i)|^2 + s2), C the FT-domain effective channel.
SinrMap onetap_sinr_map(const EffectiveChannel& ft_channel, double noise_var, int subcarriers, int symbols);

}  // namespace ddmod
