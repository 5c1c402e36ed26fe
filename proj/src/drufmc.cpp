#include "ddmod/drufmc.hpp"

#include <cmath>

#include "ddmod/error.hpp"

namespace ddmod {

UfmcBasis::UfmcBasis(const ModemConfig& cfg)
    : basis_(cfg), filter_(ufmc_filter(cfg)), precoder_(ufmc_precoder(cfg, filter_)) {}

namespace {

void check_grid(const ComplexMatrix& x_dd, const ModemConfig& cfg, const char* who) {
    require(x_dd.rows() == cfg.subcarriers && x_dd.cols() == cfg.symbols, ErrorCode::DimensionMismatch,
            std::string(who) + ": X_DD must be K x N");
}

}  // namespace

UfmcSymbolBlock drufmc_symbol_block_ft(const ComplexMatrix& x_ft, const UfmcBasis& ub) {
    const auto& cfg = ub.config();
    require(x_ft.rows() == cfg.subcarriers && x_ft.cols() == cfg.symbols, ErrorCode::DimensionMismatch,
            "drufmc_symbol_block_ft: X_FT must be K x N");
    const int m = cfg.samples_per_symbol();
    const int tail = ub.filter().length() - 1;

    UfmcSymbolBlock out;
    out.filtered = ub.precoder() * x_ft;
    out.overlapped = out.filtered.topRows(m);
    for (int n = 1; n < cfg.symbols; ++n) {
        out.overlapped.col(n).head(tail) += out.filtered.col(n - 1).segment(m, tail);
    }
    return out;
}

UfmcSymbolBlock drufmc_symbol_block(const ComplexMatrix& x_dd, const UfmcBasis& ub) {
    check_grid(x_dd, ub.config(), "drufmc_symbol_block");
    return drufmc_symbol_block_ft(ub.basis().isfft(x_dd), ub);
}

ComplexVector drufmc_modulate(const ComplexMatrix& x_dd, const UfmcBasis& ub) {
    return drufmc_symbol_block(x_dd, ub).overlapped.reshaped();
}

ComplexVector drufmc_modulate(const ComplexMatrix& x_dd, const ModemConfig& cfg) {
    cfg.validate();
    return drufmc_modulate(x_dd, UfmcBasis(cfg));
}

ComplexMatrix ufmc_stacked_precoder(const UfmcBasis& ub) {
    const auto& cfg = ub.config();
    const Eigen::Index m = cfg.samples_per_symbol();
    const Eigen::Index k = cfg.subcarriers;
    const Eigen::Index n = cfg.symbols;
    const Eigen::Index len = ub.filter().length();
    ComplexMatrix stacked = ComplexMatrix::Zero(m * n + len - 1, k * n);
    for (Eigen::Index b = 0; b < n; ++b) stacked.block(b * m, b * k, m + len - 1, k) = ub.precoder();
    return stacked.topRows(m * n);
}

ComplexVector drufmc_modulate_matrix(const ComplexMatrix& x_dd, const UfmcBasis& ub) {
    const auto& cfg = ub.config();
    check_grid(x_dd, cfg, "drufmc_modulate_matrix");
    const auto& fk = ub.basis().dft_k();
    const ComplexMatrix fn_conj = ub.basis().dft_n().conjugate();
    const Eigen::Index k = cfg.subcarriers;
    const Eigen::Index n = cfg.symbols;
    ComplexMatrix kron(k * n, k * n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) kron.block(a * k, b * k, k, k) = fn_conj(a, b) * fk;
    }
    const ComplexVector x = x_dd.reshaped();
    return ufmc_stacked_precoder(ub) * (kron * x);
}

ComplexVector drufmc_apply_channel(const ComplexVector& s, const ChannelMatrixSet& chan, double tx_power,
                                   double noise_var, std::uint64_t seed) {
    return apply_channel(s, chan, tx_power, noise_var, seed);
}

ComplexMatrix drufmc_demodulate(const ComplexVector& r, const ModemBasis& basis) {
    const auto& cfg = basis.config();
    const Eigen::Index n = cfg.symbols;
    const int m = cfg.samples_per_symbol();
    require(r.size() % n == 0 && r.size() / n >= m, ErrorCode::DimensionMismatch,
            "drufmc_demodulate: received length must be (K O_s + L_ch - 1) N");
    const ComplexMatrix rm = r.reshaped(r.size() / n, n);
    return basis.sfft(basis.oversampled() * rm.topRows(m));
}

EffectiveChannel drufmc_effective_channel(const ChannelMatrixSet& chan, const UfmcBasis& ub) {
    const auto& cfg = ub.config();
    const int m = cfg.samples_per_symbol();
    const int k = cfg.subcarriers;
    const int n = cfg.symbols;
    const int tail = ub.filter().length() - 1;
    require(chan.cols() == m && chan.symbols() == n, ErrorCode::DimensionMismatch,
            "drufmc_effective_channel: channel blocks must be K O_s wide, N symbols");
    const auto& fk = ub.basis().dft_k();

    // Symbol n' of X_UFMC is T0 X_FT(:, n') + T1 X_FT(:, n' - 1).
    const ComplexMatrix t0 = ub.precoder().topRows(m) * fk;
    ComplexMatrix t1 = ComplexMatrix::Zero(m, k);
    if (tail > 0) t1.topRows(tail) = ub.precoder().bottomRows(tail) * fk;

    ComplexMatrix w_r = ComplexMatrix::Zero(k, chan.rows());
    w_r.leftCols(m) = ub.basis().oversampled();

    std::vector<ComplexMatrix> own(n);
    std::vector<ComplexMatrix> prev(n);
    for (int np = 0; np < n; ++np) {
        const ComplexMatrix b_tilde = fk.adjoint() * chan.left_multiply(w_r, np);  // K x K O_s
        own[np] = b_tilde * t0;
        prev[np] = b_tilde * t1;
    }

    EffectiveChannel psi;
    psi.tx_power = cfg.tx_power;
    psi.matrix = ComplexMatrix::Zero(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k) * n);
    const double scale = std::sqrt(cfg.tx_power) / n;
    const auto phase = [n](long idx) {
        idx %= n;
        if (idx < 0) idx += n;
        return std::polar(1.0, 2.0 * kPi * static_cast<double>(idx) / n);
    };
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            ComplexMatrix acc = ComplexMatrix::Zero(k, k);
            for (int np = 0; np < n; ++np) {
                acc += own[np] * phase(static_cast<long>(np) * (col - row));
                if (np >= 1 && tail > 0) {
                    acc += prev[np] * phase(static_cast<long>(np - 1) * col - static_cast<long>(row) * np);
                }
            }
            psi.matrix.block(static_cast<Eigen::Index>(row) * k, static_cast<Eigen::Index>(col) * k, k, k) =
                scale * acc;
        }
    }
    return psi;
}

}  // namespace ddmod
