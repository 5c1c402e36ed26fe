#include "ddmod/ofdm.hpp"

#include <cmath>
#include <limits>

#include "ddmod/error.hpp"

namespace ddmod {

EffectiveChannel ofdm_full_effective_channel(const ChannelMatrixSet& chan, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    const auto blocks = cp_ofdm_ft_blocks(chan, basis);
    const Eigen::Index k = cfg.subcarriers;
    EffectiveChannel c;
    c.tx_power = cfg.tx_power;
    c.matrix = ComplexMatrix::Zero(k * cfg.symbols, k * cfg.symbols);
    const double amp = std::sqrt(cfg.tx_power);
    for (int i = 0; i < cfg.symbols; ++i) c.matrix.block(i * k, i * k, k, k) = amp * blocks[i];
    return c;
}

ComplexMatrix onetap_coefficients(const ChannelMatrixSet& chan, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    const auto blocks = cp_ofdm_ft_blocks(chan, basis);
    ComplexMatrix c(cfg.subcarriers, cfg.symbols);
    for (int i = 0; i < cfg.symbols; ++i) c.col(i) = blocks[i].diagonal();
    return c;
}

ComplexMatrix ofdm_onetap_fde(const ComplexMatrix& y_ft, const ComplexMatrix& coefficients, double noise_var,
                              double tx_power, OneTapMode mode) {
    require(y_ft.rows() == coefficients.rows() && y_ft.cols() == coefficients.cols(),
            ErrorCode::DimensionMismatch, "ofdm_onetap_fde: Y_FT and coefficients differ in shape");
    require(tx_power > 0.0 && noise_var >= 0.0, ErrorCode::InvalidArgument,
            "ofdm_onetap_fde: need P_T > 0 and noise variance >= 0");
    const double amp = std::sqrt(tx_power);
    ComplexMatrix x(y_ft.rows(), y_ft.cols());
    for (Eigen::Index n = 0; n < y_ft.cols(); ++n) {
        for (Eigen::Index k = 0; k < y_ft.rows(); ++k) {
            const cplx c = coefficients(k, n);
            if (mode == OneTapMode::ZeroForcing) {
                x(k, n) = std::abs(c) > 0.0 ? y_ft(k, n) / (amp * c) : cplx(0.0, 0.0);
            } else {
                const double denom = amp * (std::norm(c) + noise_var / tx_power);
                x(k, n) = denom > 0.0 ? std::conj(c) * y_ft(k, n) / denom : cplx(0.0, 0.0);
            }
        }
    }
    return x;
}

SinrMap onetap_sinr_map(const EffectiveChannel& ft_channel, double noise_var, int subcarriers, int symbols) {
    const auto& c = ft_channel.matrix;
    require(c.rows() == static_cast<Eigen::Index>(subcarriers) * symbols && c.cols() == c.rows(),
            ErrorCode::DimensionMismatch, "onetap_sinr_map: channel must be KN x KN");
    require(noise_var >= 0.0, ErrorCode::InvalidArgument, "onetap_sinr_map: noise variance must be >= 0");
    const RealVector row_energy = c.cwiseAbs2().rowwise().sum();
    SinrMap map;
    map.values.resize(subcarriers, symbols);
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
        const double signal = std::norm(c(j, j));
        const double denom = row_energy(j) - signal + noise_var;
        map.values(j % subcarriers, j / subcarriers) =
            denom > 0.0 ? signal / denom : (signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    return map;
}

}  // namespace ddmod
