#pragma once

#include <cstdint>

#include "ddmod/channel.hpp"
#include "ddmod/transforms.hpp"
#include "ddmod/types.hpp"

namespace ddmod {

/// ModemBasis plus the subband filter and the per-symbol UFMC precoder.
class UfmcBasis {
public:
    explicit UfmcBasis(const ModemConfig& cfg);

    const ModemBasis& basis() const { return basis_; }
    const ModemConfig& config() const { return basis_.config(); }
    const PrototypeFilter& filter() const { return filter_; }
    /// P_UFMC, (K O_s + L - 1) x K.
    const ComplexMatrix& precoder() const { return precoder_; }

private:
    ModemBasis basis_;
    PrototypeFilter filter_;
    ComplexMatrix precoder_;
};

/// Filtered symbols before and after continuous-packet overlap.
struct UfmcSymbolBlock {
    ComplexMatrix filtered;    // (K O_s + L - 1) x N
    ComplexMatrix overlapped;  // (K O_s) x N
};

/// Procedural transmitter: filter each FT column, then add the L - 1 tail
/// samples of symbol n - 1 onto the head of symbol n. The tail of the last
/// symbol is dropped.
UfmcSymbolBlock drufmc_symbol_block(const ComplexMatrix& x_dd, const UfmcBasis& ub);
/// Same, starting from the frequency-time grid X_FT.
UfmcSymbolBlock drufmc_symbol_block_ft(const ComplexMatrix& x_ft, const UfmcBasis& ub);
ComplexVector drufmc_modulate(const ComplexMatrix& x_dd, const UfmcBasis& ub);
ComplexVector drufmc_modulate(const ComplexMatrix& x_dd, const ModemConfig& cfg);

/// U_UFMC = [I_{K O_s N}, 0] U~ with U~ block-banded by P_UFMC; (K O_s N) x (K N).
ComplexMatrix ufmc_stacked_precoder(const UfmcBasis& ub);
/// Matrix transmitter s = U_UFMC (F_N^* (x) F_K) vec(X_DD).
ComplexVector drufmc_modulate_matrix(const ComplexMatrix& x_dd, const UfmcBasis& ub);

/// r = sqrt(P_T) blkdiag(M~) s + w with CP-free blocks.
ComplexVector drufmc_apply_channel(const ComplexVector& s, const ChannelMatrixSet& chan, double tx_power,
                                   double noise_var, std::uint64_t seed);

/// Y_DD = F_K^H W R_tail invec(r) F_N; drops the last L_ch - 1 samples per block.
ComplexMatrix drufmc_demodulate(const ComplexVector& r, const ModemBasis& basis);

/// Psi~ = Psi_UFMC U_UFMC (F_N^* (x) F_K), evaluated block by block through
/// B~_n' = F_K^H W R_tail M~^(n').
EffectiveChannel drufmc_effective_channel(const ChannelMatrixSet& chan, const UfmcBasis& ub);

}  // namespace ddmod
