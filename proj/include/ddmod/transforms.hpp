#pragma once

#include <vector>

#include "ddmod/config.hpp"
#include "ddmod/types.hpp"

namespace ddmod {

/// Real symmetric FIR prototype for the subband filters.
struct PrototypeFilter {
    std::vector<double> taps;
    double attenuation_db = 0.0;
    /// Factor applied to the raw peak-normalized window to reach unit DC gain.
    double scale = 1.0;

    int length() const { return static_cast<int>(taps.size()); }
};

/// Unitary n x n DFT, entry (a, b) = exp(-j 2 pi a b / n) / sqrt(n).
ComplexMatrix dft_matrix(int n);

/// K x (K O_s) oversampled DFT with subcarriers centred on -K/2 .. K/2-1.
/// Rows are orthonormal, so W W^H = I_K.
ComplexMatrix oversampled_dft(int subcarriers, int oversampling);

/// X_FT = F_K X_DD F_N^H.
ComplexMatrix isfft(const ComplexMatrix& x_dd);
/// Y_DD = F_K^H Y_FT F_N.
ComplexMatrix sfft(const ComplexMatrix& y_ft);

/// Dolph-Chebyshev window of the given length whose side lobes sit
/// `attenuation_db` below the main lobe. Taps are scaled to unit DC gain
/// (sum of taps = 1); see PrototypeFilter::scale.
PrototypeFilter chebyshev_window(int length, double attenuation_db);

/// Filter used by a DR-UFMC config: the Chebyshev window, or the trivial
/// single tap [1] when L = 1.
PrototypeFilter ufmc_filter(const ModemConfig& cfg);

/// K x K diagonal 0/1 matrix keeping subcarriers i*D .. (i+1)*D - 1.
ComplexMatrix selection_matrix(int subband, int subbands, int subband_size);

/// Normalised centre frequency of subband i, in subcarrier units:
/// (D - 1)/2 + i D - K/2.
double subband_center(int subband, int subband_size, int subcarriers);

/// Prototype taps shifted to subband i: g_l exp(j 2 pi F_i l / (K O_s)).
std::vector<cplx> modulated_filter(const PrototypeFilter& g, int subband, int subcarriers,
                                   int oversampling, int subband_size);

/// (K O_s + L - 1) x (K O_s) Toeplitz matrix convolving with the subband-i filter.
ComplexMatrix subband_conv_matrix(const PrototypeFilter& g, int subband, int subcarriers,
                                  int oversampling, int subband_size);

/// P_UFMC = sum_i G_i W^H P_i, of size (K O_s + L - 1) x K.
ComplexMatrix ufmc_precoder(const ModemConfig& cfg, const PrototypeFilter& g);

/// CP insertion [I(end-Ncp+1:end, :); I], size (M + Ncp) x M.
ComplexMatrix cp_insertion_matrix(int block, int cp);
/// CP removal [0_{M x Ncp}, I_{M x (M + Lch - 1)}], size M x (M + Ncp + Lch - 1).
ComplexMatrix cp_removal_matrix(int block, int cp, int channel_taps);
/// Channel-tail removal [I_M, 0_{M x (Lch - 1)}].
ComplexMatrix tail_removal_matrix(int block, int channel_taps);

/// Transform matrices for one numerology, built once and shared read-only.
class ModemBasis {
public:
    explicit ModemBasis(const ModemConfig& cfg);

    const ModemConfig& config() const { return cfg_; }
    const ComplexMatrix& dft_k() const { return fk_; }
    const ComplexMatrix& dft_n() const { return fn_; }
    /// Oversampled DFT W (K x K O_s).
    const ComplexMatrix& oversampled() const { return w_; }

    ComplexMatrix isfft(const ComplexMatrix& x_dd) const;
    ComplexMatrix sfft(const ComplexMatrix& y_ft) const;

    /// Applies T = F_K^H (.) F_N on the left of every column and
    /// (F_N^* (x) F_K) on the right, i.e. maps an FT-domain KN x KN operator
    /// to the delay-Doppler domain.
    ComplexMatrix ft_to_dd(const ComplexMatrix& ft_operator) const;

private:
    ModemConfig cfg_;
    ComplexMatrix fk_;
    ComplexMatrix fn_;
    ComplexMatrix w_;
};

}  // namespace ddmod
