#include "ddmod/otfs.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

#include "ddmod/error.hpp"

namespace ddmod {

ComplexVector cp_ofdm_modulate(const ComplexMatrix& x_ft, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    require(x_ft.rows() == cfg.subcarriers && x_ft.cols() == cfg.symbols, ErrorCode::DimensionMismatch,
            "cp_ofdm_modulate: grid must be K x N");
    const int m = cfg.samples_per_symbol();
    const int cp = cfg.cp_samples();
    const ComplexMatrix s = basis.oversampled().adjoint() * x_ft;
    ComplexMatrix s_cp(m + cp, cfg.symbols);
    s_cp.topRows(cp) = s.bottomRows(cp);
    s_cp.bottomRows(m) = s;
    return s_cp.reshaped();
}

ComplexMatrix cp_ofdm_demodulate(const ComplexVector& r, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    const Eigen::Index n = cfg.symbols;
    const int m = cfg.samples_per_symbol();
    const int cp = cfg.cp_samples();
    require(n > 0 && r.size() % n == 0, ErrorCode::DimensionMismatch,
            "cp_ofdm_demodulate: received length must be a multiple of N");
    const Eigen::Index block = r.size() / n;
    require(block >= m + cp, ErrorCode::DimensionMismatch,
            "cp_ofdm_demodulate: received block shorter than K O_s + N_CP");
    const ComplexMatrix rm = r.reshaped(block, n);
    return basis.oversampled() * rm.middleRows(cp, m);
}

std::vector<ComplexMatrix> cp_ofdm_ft_blocks(const ChannelMatrixSet& chan, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    const int m = cfg.samples_per_symbol();
    const int cp = cfg.cp_samples();
    require(chan.cols() == m + cp && chan.symbols() == cfg.symbols, ErrorCode::DimensionMismatch,
            "cp_ofdm_ft_blocks: channel blocks must be (K O_s + N_CP) wide, N symbols");
    // W R_cp: the oversampled DFT placed after the CP rows.
    ComplexMatrix w_r = ComplexMatrix::Zero(cfg.subcarriers, chan.rows());
    w_r.middleCols(cp, m) = basis.oversampled();
    const ComplexMatrix wh = basis.oversampled().adjoint();

    std::vector<ComplexMatrix> blocks;
    blocks.reserve(cfg.symbols);
    for (int i = 0; i < cfg.symbols; ++i) {
        const ComplexMatrix wrm = chan.left_multiply(w_r, i);  // K x (m + cp)
        // Right-multiply by A_cp: CP columns fold back onto the block tail.
        ComplexMatrix wrma = wrm.rightCols(m);
        wrma.rightCols(cp) += wrm.leftCols(cp);
        blocks.push_back(wrma * wh);
    }
    return blocks;
}

ComplexVector otfs_modulate(const ComplexMatrix& x_dd, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    require(x_dd.rows() == cfg.subcarriers && x_dd.cols() == cfg.symbols, ErrorCode::DimensionMismatch,
            "otfs_modulate: X_DD must be K x N");
    return cp_ofdm_modulate(basis.isfft(x_dd), basis);
}

ComplexVector otfs_apply_channel(const ComplexVector& s, const ChannelMatrixSet& chan, double tx_power,
                                 double noise_var, std::uint64_t seed) {
    return apply_channel(s, chan, tx_power, noise_var, seed);
}

ComplexMatrix otfs_demodulate(const ComplexVector& r, const ModemBasis& basis) {
    return basis.sfft(cp_ofdm_demodulate(r, basis));
}

EffectiveChannel otfs_effective_channel(const ChannelMatrixSet& chan, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    if (cfg.cp_samples() < chan.taps() - 1) {
        static std::once_flag once;
        std::call_once(once, [&] {
            std::clog << "ddmod: note: N_CP = " << cfg.cp_samples() << " < L_ch - 1 = " << chan.taps() - 1
                      << ", blocks are not circulant after CP removal\n";
        });
    }
    const auto ft = cp_ofdm_ft_blocks(chan, basis);
    const int k = cfg.subcarriers;
    const int n = cfg.symbols;
    const auto& fk = basis.dft_k();

    std::vector<ComplexMatrix> b(n);
    for (int i = 0; i < n; ++i) b[i] = fk.adjoint() * ft[i] * fk;

    // B^DD only depends on (n - n') mod N.
    std::vector<ComplexMatrix> by_shift(n, ComplexMatrix::Zero(k, k));
    for (int d = 0; d < n; ++d) {
        for (int i = 0; i < n; ++i) {
            const long idx = (static_cast<long>(i) * d) % n;
            by_shift[d] += b[i] * std::polar(1.0, -2.0 * kPi * static_cast<double>(idx) / n);
        }
    }

    EffectiveChannel psi;
    psi.tx_power = cfg.tx_power;
    psi.matrix.resize(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k) * n);
    const double scale = std::sqrt(cfg.tx_power) / n;
    for (int nn = 0; nn < n; ++nn) {
        for (int np = 0; np < n; ++np) {
            const int d = ((nn - np) % n + n) % n;
            psi.matrix.block(static_cast<Eigen::Index>(nn) * k, static_cast<Eigen::Index>(np) * k, k, k) =
                scale * by_shift[d];
        }
    }
    return psi;
}

}  // namespace ddmod
