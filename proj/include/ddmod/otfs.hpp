#pragma once

#include <cstdint>
#include <vector>

#include "ddmod/channel.hpp"
#include "ddmod/transforms.hpp"
#include "ddmod/types.hpp"

namespace ddmod {

// CP-OFDM front end shared by OTFS and the OFDM baselines.

/// s = vec(A_cp W^H X_FT), length (K O_s + N_CP) N.
ComplexVector cp_ofdm_modulate(const ComplexMatrix& x_ft, const ModemBasis& basis);
/// Y_FT = W R_cp invec(r); the channel length is inferred from |r|.
ComplexMatrix cp_ofdm_demodulate(const ComplexVector& r, const ModemBasis& basis);
/// Per-symbol frequency-time matrices W R_cp M^(i) A_cp W^H (K x K), without sqrt(P_T).
std::vector<ComplexMatrix> cp_ofdm_ft_blocks(const ChannelMatrixSet& chan, const ModemBasis& basis);

/// s = vec(A_cp W^H F_K X_DD F_N^H).
ComplexVector otfs_modulate(const ComplexMatrix& x_dd, const ModemBasis& basis);
/// r = sqrt(P_T) blkdiag(M) s + w for CP blocks.
ComplexVector otfs_apply_channel(const ComplexVector& s, const ChannelMatrixSet& chan, double tx_power,
                                 double noise_var, std::uint64_t seed);
/// Y_DD = F_K^H W R_cp invec(r) F_N.
ComplexMatrix otfs_demodulate(const ComplexVector& r, const ModemBasis& basis);

/// Delay-Doppler effective channel Psi, built entry-wise as
/// (sqrt(P_T)/N) sum_i B_i(k, k') exp(-j 2 pi i (n - n') / N),
/// B_i = F_K^H W H_i W^H F_K.
EffectiveChannel otfs_effective_channel(const ChannelMatrixSet& chan, const ModemBasis& basis);

}  // namespace ddmod
