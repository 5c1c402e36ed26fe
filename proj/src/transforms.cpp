#include "ddmod/transforms.hpp"

#include <cmath>
#include <string>

#include "ddmod/error.hpp"

namespace ddmod {

namespace {

// Chebyshev polynomial T_n(x) for any real x.
double chebyshev_poly(double order, double x) {
    if (std::abs(x) <= 1.0) return std::cos(order * std::acos(x));
    if (x > 1.0) return std::cosh(order * std::acosh(x));
    const double sign = (static_cast<long>(order) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::cosh(order * std::acosh(-x));
}

}  // namespace

ComplexMatrix dft_matrix(int n) {
    require(n >= 1, ErrorCode::InvalidSize, "dft_matrix: n must be >= 1");
    ComplexMatrix f(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            // Reduce a*b mod n first so large sizes keep full phase accuracy.
            const long idx = (static_cast<long>(a) * b) % n;
            f(a, b) = std::polar(norm, -2.0 * kPi * static_cast<double>(idx) / n);
        }
    }
    return f;
}

ComplexMatrix oversampled_dft(int subcarriers, int oversampling) {
    require(subcarriers >= 2 && subcarriers % 2 == 0, ErrorCode::InvalidSize,
            "oversampled_dft: K must be even and >= 2");
    require(oversampling >= 1, ErrorCode::InvalidSize, "oversampled_dft: O_s must be >= 1");
    const int m_total = subcarriers * oversampling;
    const double norm = 1.0 / std::sqrt(static_cast<double>(m_total));
    ComplexMatrix w(subcarriers, m_total);
    for (int m = 0; m < m_total; ++m) {
        for (int l = 0; l < subcarriers; ++l) {
            const long freq = l - subcarriers / 2;
            long idx = (static_cast<long>(m) * freq) % m_total;
            if (idx < 0) idx += m_total;
            w(l, m) = std::polar(norm, -2.0 * kPi * static_cast<double>(idx) / m_total);
        }
    }
    return w;
}

ComplexMatrix isfft(const ComplexMatrix& x_dd) {
    require(x_dd.rows() >= 1 && x_dd.cols() >= 1, ErrorCode::DimensionMismatch, "isfft: empty grid");
    return dft_matrix(static_cast<int>(x_dd.rows())) * x_dd *
           dft_matrix(static_cast<int>(x_dd.cols())).adjoint();
}

ComplexMatrix sfft(const ComplexMatrix& y_ft) {
    require(y_ft.rows() >= 1 && y_ft.cols() >= 1, ErrorCode::DimensionMismatch, "sfft: empty grid");
    return dft_matrix(static_cast<int>(y_ft.rows())).adjoint() * y_ft *
           dft_matrix(static_cast<int>(y_ft.cols()));
}

PrototypeFilter chebyshev_window(int length, double attenuation_db) {
    require(length >= 2, ErrorCode::InvalidSize, "chebyshev_window: L must be >= 2");
    require(attenuation_db > 0.0, ErrorCode::InvalidAttenuation,
            "chebyshev_window: attenuation must be > 0 dB");

    // Sample the Chebyshev-polynomial spectrum, then inverse transform.
    const int n = length;
    const double order = n - 1.0;
    const double beta = std::cosh(std::acosh(std::pow(10.0, attenuation_db / 20.0)) / order);
    std::vector<cplx> spectrum(n);
    for (int k = 0; k < n; ++k) {
        const double x = beta * std::cos(kPi * k / n);
        spectrum[k] = chebyshev_poly(order, x);
        if (n % 2 == 0) spectrum[k] *= std::polar(1.0, kPi * k / n);
    }
    std::vector<double> p(n);
    for (int m = 0; m < n; ++m) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) {
            acc += spectrum[k] * std::polar(1.0, -2.0 * kPi * static_cast<double>((long(k) * m) % n) / n);
        }
        p[m] = acc.real();
    }

    std::vector<double> w(n);
    if (n % 2 == 1) {
        const int half = (n + 1) / 2;
        for (int i = 0; i < half; ++i) {
            w[half - 1 - i] = p[i];
            w[half - 1 + i] = p[i];
        }
    } else {
        const int half = n / 2 + 1;
        // w = [p[half-1], ..., p[1], p[1], ..., p[half-1]]
        for (int i = 1; i < half; ++i) {
            w[half - 1 - i] = p[i];
            w[half - 2 + i] = p[i];
        }
    }

    PrototypeFilter g;
    g.attenuation_db = attenuation_db;
    g.taps.resize(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        g.taps[i] = 0.5 * (w[i] + w[n - 1 - i]);
        sum += g.taps[i];
    }
    double peak = 0.0;
    for (double t : g.taps) peak = std::max(peak, t);
    for (double& t : g.taps) t /= peak;
    g.scale = peak / sum;
    for (double& t : g.taps) t *= g.scale;
    return g;
}

PrototypeFilter ufmc_filter(const ModemConfig& cfg) {
    if (cfg.filter_length == 1) {
        PrototypeFilter g;
        g.taps = {1.0};
        g.attenuation_db = cfg.filter_attenuation_db;
        return g;
    }
    return chebyshev_window(cfg.filter_length, cfg.filter_attenuation_db);
}

ComplexMatrix selection_matrix(int subband, int subbands, int subband_size) {
    require(subbands >= 1 && subband_size >= 1, ErrorCode::InvalidSize, "selection_matrix: B, D >= 1");
    require(subband >= 0 && subband < subbands, ErrorCode::IndexOutOfRange,
            "selection_matrix: subband index " + std::to_string(subband) + " outside [0, " +
                std::to_string(subbands) + ")");
    const int k = subbands * subband_size;
    ComplexMatrix p = ComplexMatrix::Zero(k, k);
    for (int r = subband * subband_size; r < (subband + 1) * subband_size; ++r) p(r, r) = 1.0;
    return p;
}

double subband_center(int subband, int subband_size, int subcarriers) {
    return (subband_size - 1) / 2.0 + subband * subband_size - subcarriers / 2.0;
}

std::vector<cplx> modulated_filter(const PrototypeFilter& g, int subband, int subcarriers,
                                   int oversampling, int subband_size) {
    require(subband_size >= 1 && subcarriers % subband_size == 0, ErrorCode::DimensionMismatch,
            "modulated_filter: K must be a multiple of D");
    require(subband >= 0 && subband < subcarriers / subband_size, ErrorCode::IndexOutOfRange,
            "modulated_filter: subband index out of range");
    const double fi = subband_center(subband, subband_size, subcarriers);
    const double m_total = static_cast<double>(subcarriers) * oversampling;
    std::vector<cplx> gi(g.taps.size());
    for (std::size_t l = 0; l < g.taps.size(); ++l) {
        gi[l] = g.taps[l] * std::polar(1.0, 2.0 * kPi * fi * static_cast<double>(l) / m_total);
    }
    return gi;
}

ComplexMatrix subband_conv_matrix(const PrototypeFilter& g, int subband, int subcarriers,
                                  int oversampling, int subband_size) {
    require(g.length() >= 1, ErrorCode::DimensionMismatch, "subband_conv_matrix: empty filter");
    const auto gi = modulated_filter(g, subband, subcarriers, oversampling, subband_size);
    const int cols = subcarriers * oversampling;
    const int len = g.length();
    ComplexMatrix toeplitz = ComplexMatrix::Zero(cols + len - 1, cols);
    for (int c = 0; c < cols; ++c) {
        for (int l = 0; l < len; ++l) toeplitz(c + l, c) = gi[l];
    }
    return toeplitz;
}

ComplexMatrix ufmc_precoder(const ModemConfig& cfg, const PrototypeFilter& g) {
    require(cfg.subband_size >= 1 && cfg.subcarriers % cfg.subband_size == 0,
            ErrorCode::DimensionMismatch, "ufmc_precoder: K = B·D required");
    const int k_total = cfg.subcarriers;
    const int m_total = cfg.samples_per_symbol();
    const int len = g.length();
    const ComplexMatrix wh = oversampled_dft(k_total, cfg.oversampling).adjoint();
    ComplexMatrix p = ComplexMatrix::Zero(m_total + len - 1, k_total);
    // P_i keeps whole subbands, so column k only sees the filter of its own subband.
    for (int i = 0; i < cfg.subbands(); ++i) {
        const auto gi = modulated_filter(g, i, k_total, cfg.oversampling, cfg.subband_size);
        for (int k = i * cfg.subband_size; k < (i + 1) * cfg.subband_size; ++k) {
            for (int m = 0; m < m_total; ++m) {
                const cplx x = wh(m, k);
                for (int l = 0; l < len; ++l) p(m + l, k) += gi[l] * x;
            }
        }
    }
    return p;
}

ComplexMatrix cp_insertion_matrix(int block, int cp) {
    require(block >= 1 && cp >= 0 && cp <= block, ErrorCode::InvalidSize, "cp_insertion_matrix: 0 <= Ncp <= M");
    ComplexMatrix a = ComplexMatrix::Zero(block + cp, block);
    for (int r = 0; r < cp; ++r) a(r, block - cp + r) = 1.0;
    for (int r = 0; r < block; ++r) a(cp + r, r) = 1.0;
    return a;
}

ComplexMatrix cp_removal_matrix(int block, int cp, int channel_taps) {
    require(block >= 1 && cp >= 0 && channel_taps >= 1, ErrorCode::InvalidSize, "cp_removal_matrix: bad sizes");
    ComplexMatrix r = ComplexMatrix::Zero(block, block + cp + channel_taps - 1);
    for (int i = 0; i < block; ++i) r(i, cp + i) = 1.0;
    return r;
}

ComplexMatrix tail_removal_matrix(int block, int channel_taps) {
    require(block >= 1 && channel_taps >= 1, ErrorCode::InvalidSize, "tail_removal_matrix: bad sizes");
    ComplexMatrix r = ComplexMatrix::Zero(block, block + channel_taps - 1);
    for (int i = 0; i < block; ++i) r(i, i) = 1.0;
    return r;
}

ModemBasis::ModemBasis(const ModemConfig& cfg)
    : cfg_(cfg),
      fk_(dft_matrix(cfg.subcarriers)),
      fn_(dft_matrix(cfg.symbols)),
      w_(oversampled_dft(cfg.subcarriers, cfg.oversampling)) {}

ComplexMatrix ModemBasis::isfft(const ComplexMatrix& x_dd) const {
    require(x_dd.rows() == fk_.rows() && x_dd.cols() == fn_.rows(), ErrorCode::DimensionMismatch,
            "isfft: grid must be K x N");
    return fk_ * x_dd * fn_.adjoint();
}

ComplexMatrix ModemBasis::sfft(const ComplexMatrix& y_ft) const {
    require(y_ft.rows() == fk_.rows() && y_ft.cols() == fn_.rows(), ErrorCode::DimensionMismatch,
            "sfft: grid must be K x N");
    return fk_.adjoint() * y_ft * fn_;
}

ComplexMatrix ModemBasis::ft_to_dd(const ComplexMatrix& ft_operator) const {
    const Eigen::Index k = fk_.rows();
    const Eigen::Index n = fn_.rows();
    const Eigen::Index kn = k * n;
    require(ft_operator.rows() == kn && ft_operator.cols() == kn, ErrorCode::DimensionMismatch,
            "ft_to_dd: operator must be KN x KN");
    // Left factor (F_N (x) F_K^H) acts as an SFFT on every column.
    ComplexMatrix left(kn, kn);
    for (Eigen::Index j = 0; j < kn; ++j) {
        const ComplexMatrix grid = ft_operator.col(j).reshaped(k, n);
        left.col(j) = (fk_.adjoint() * grid * fn_).reshaped();
    }
    // Right factor (F_N^* (x) F_K) is symmetric, so it acts as an ISFFT on every row.
    ComplexMatrix out(kn, kn);
    for (Eigen::Index i = 0; i < kn; ++i) {
        const ComplexMatrix grid = left.row(i).transpose().reshaped(k, n);
        out.row(i) = (fk_ * grid * fn_.adjoint()).reshaped().transpose();
    }
    return out;
}

}  // namespace ddmod
