#include "ddmod/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>

#include "ddmod/error.hpp"

namespace ddmod {

const PowerDelayProfile& eva_profile() {
    static const PowerDelayProfile eva{
        {0e-9, 30e-9, 150e-9, 310e-9, 370e-9, 710e-9, 1090e-9, 1730e-9, 2510e-9},
        {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9},
    };
    return eva;
}

double max_doppler_hz(double speed_mps, double carrier_hz) {
    return carrier_hz * speed_mps / kSpeedOfLight;
}

PathSet sample_eva_paths(std::uint64_t seed, double speed_mps, double carrier_hz) {
    require(speed_mps >= 0.0, ErrorCode::InvalidArgument, "sample_eva_paths: speed must be >= 0");
    require(carrier_hz > 0.0, ErrorCode::InvalidArgument, "sample_eva_paths: carrier must be > 0");
    const auto& eva = eva_profile();
    double total = 0.0;
    for (double p_db : eva.powers_db) total += std::pow(10.0, p_db / 10.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);

    PathSet set;
    set.max_doppler_hz = max_doppler_hz(speed_mps, carrier_hz);
    set.span_delay_s = eva.delays_s.back();
    for (std::size_t p = 0; p < eva.delays_s.size(); ++p) {
        const double power = std::pow(10.0, eva.powers_db[p] / 10.0) / total;
        const double sigma = std::sqrt(power / 2.0);
        Path path;
        const double re = normal(rng);
        const double im = normal(rng);
        path.gain = cplx(sigma * re, sigma * im);
        path.delay_s = eva.delays_s[p];
        path.doppler_hz = set.max_doppler_hz * std::cos(angle(rng));
        set.paths.push_back(path);
    }
    return set;
}

PathSet ideal_paths() {
    PathSet set;
    set.paths.push_back(Path{cplx(1.0, 0.0), 0.0, 0.0});
    return set;
}

int pulse_half_support(PulseShape pulse) {
    return pulse == PulseShape::Ideal ? 0 : 4;
}

double pulse_value(PulseShape pulse, double t) {
    if (pulse == PulseShape::Ideal) return std::lround(t) == 0 ? 1.0 : 0.0;
    constexpr double beta = 0.25;
    if (std::abs(t) > pulse_half_support(pulse)) return 0.0;
    const auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); };
    const double denom = 1.0 - (2.0 * beta * t) * (2.0 * beta * t);
    if (std::abs(denom) < 1e-12) return (kPi / 4.0) * sinc(1.0 / (2.0 * beta));
    return sinc(t) * std::cos(kPi * beta * t) / denom;
}

int channel_taps(const PathSet& paths, const ModemConfig& cfg) {
    double span = paths.span_delay_s;
    for (const auto& p : paths.paths) span = std::max(span, p.delay_s);
    const int half = pulse_half_support(cfg.pulse);
    const double in_samples = span / cfg.sample_period_s();
    // Shaped pulses need support on both sides of the longest delay.
    return static_cast<int>(std::ceil(in_samples - 1e-9)) + 2 * half + 1;
}

LtvChannelRealization::LtvChannelRealization(int symbols, int rows, int taps, int block_length,
                                             double sample_period_s)
    : symbols_(symbols),
      rows_(rows),
      taps_(taps),
      block_length_(block_length),
      sample_period_(sample_period_s),
      h_(static_cast<std::size_t>(symbols) * rows * taps, cplx(0.0, 0.0)) {
    require(symbols >= 1 && taps >= 1 && block_length >= 1 && rows == block_length + taps - 1,
            ErrorCode::InvalidSize, "LtvChannelRealization: inconsistent sizes");
}

void LtvChannelRealization::write_text(std::ostream& os) const {
    os << "# ddmod ltv-channel v1\n";
    os << "# symbols " << symbols_ << " rows " << rows_ << " taps " << taps_ << " block " << block_length_
       << " sample_period_s " << std::setprecision(17) << sample_period_ << "\n";
    os << "# columns: symbol delay then (re im) for rows 0.." << rows_ - 1 << "\n";
    os << std::setprecision(17);
    for (int i = 0; i < symbols_; ++i) {
        for (int l = 0; l < taps_; ++l) {
            os << i << ' ' << l;
            for (int r = 0; r < rows_; ++r) {
                const cplx v = tap(i, r, l);
                os << ' ' << v.real() << ' ' << v.imag();
            }
            os << '\n';
        }
    }
}

namespace {

double symbol_time_scale(const ModemConfig& cfg, int block_length) {
    return cfg.time_indexing == TimeIndexing::AsWritten ? 1.0 : static_cast<double>(block_length);
}

}  // namespace

cplx tap_formula(const PathSet& paths, const ModemConfig& cfg, int block_length, int symbol, int row,
                 int delay) {
    const double ts = cfg.sample_period_s();
    const int half = pulse_half_support(cfg.pulse);
    // One-based l, r, i as in the tap expression.
    const double l1 = delay + 1.0;
    const double r1 = row + 1.0;
    const double i_term = symbol * symbol_time_scale(cfg, block_length);
    const double t = (l1 + r1 + i_term) * ts - ts / 2.0;
    cplx acc(0.0, 0.0);
    for (const auto& p : paths.paths) {
        const double g = pulse_value(cfg.pulse, static_cast<double>(delay - half) - p.delay_s / ts);
        if (g == 0.0) continue;
        acc += p.gain * g * std::polar(1.0, 2.0 * kPi * p.doppler_hz * t);
    }
    return acc;
}

LtvChannelRealization materialize_taps(const PathSet& paths, const ModemConfig& cfg, int block_length) {
    return materialize_taps(paths, cfg, block_length, channel_taps(paths, cfg));
}

LtvChannelRealization materialize_taps(const PathSet& paths, const ModemConfig& cfg, int block_length,
                                       int taps) {
    require(block_length >= 1 && taps >= 1, ErrorCode::InvalidSize, "materialize_taps: bad sizes");
    const double ts = cfg.sample_period_s();
    const int half = pulse_half_support(cfg.pulse);
    for (const auto& p : paths.paths) {
        require(p.delay_s >= 0.0, ErrorCode::InvalidArgument, "materialize_taps: negative delay");
        const double pos = p.delay_s / ts + half;
        const long last = cfg.pulse == PulseShape::Ideal ? std::lround(pos) : static_cast<long>(std::ceil(pos - 1e-9));
        require(last < taps, ErrorCode::DelayExceedsSpan,
                "materialize_taps: path delay " + std::to_string(p.delay_s) + " s maps beyond " +
                    std::to_string(taps) + " taps");
    }

    const int rows = block_length + taps - 1;
    LtvChannelRealization real(cfg.symbols, rows, taps, block_length, ts);
    const double i_scale = symbol_time_scale(cfg, block_length);

    // Separate the delay-only pulse weights from the Doppler phase so the
    // inner loop is a single rotation per (path, row).
    struct Weighted {
        cplx gain;
        double doppler;
        std::vector<double> pulse;
    };
    std::vector<Weighted> weighted;
    for (const auto& p : paths.paths) {
        Weighted w{p.gain, p.doppler_hz, std::vector<double>(taps)};
        bool any = false;
        for (int l = 0; l < taps; ++l) {
            w.pulse[l] = pulse_value(cfg.pulse, static_cast<double>(l - half) - p.delay_s / ts);
            any = any || w.pulse[l] != 0.0;
        }
        if (any) weighted.push_back(std::move(w));
    }

    for (int i = 0; i < cfg.symbols; ++i) {
        for (int r = 0; r < rows; ++r) {
            for (int l = 0; l < taps; ++l) {
                const double t = ((l + 1.0) + (r + 1.0) + i * i_scale) * ts - ts / 2.0;
                cplx acc(0.0, 0.0);
                for (const auto& w : weighted) {
                    if (w.pulse[l] == 0.0) continue;
                    acc += w.gain * w.pulse[l] * std::polar(1.0, 2.0 * kPi * w.doppler * t);
                }
                real.tap(i, r, l) = acc;
            }
        }
    }
    return real;
}

ChannelMatrixSet::ChannelMatrixSet(LtvChannelRealization realization) : real_(std::move(realization)) {}

cplx ChannelMatrixSet::entry(int symbol, int r, int c) const {
    const int d = r - c;
    if (d < 0 || d >= taps() || c < 0 || c >= cols() || r < 0 || r >= rows()) return cplx(0.0, 0.0);
    return real_.tap(symbol, r, d);
}

ComplexMatrix ChannelMatrixSet::dense(int symbol) const {
    require(symbol >= 0 && symbol < symbols(), ErrorCode::IndexOutOfRange, "ChannelMatrixSet: symbol index");
    ComplexMatrix m = ComplexMatrix::Zero(rows(), cols());
    for (int c = 0; c < cols(); ++c) {
        for (int d = 0; d < taps(); ++d) m(c + d, c) = real_.tap(symbol, c + d, d);
    }
    return m;
}

ComplexVector ChannelMatrixSet::apply(int symbol, const ComplexVector& x) const {
    require(x.size() == cols(), ErrorCode::DimensionMismatch, "ChannelMatrixSet::apply: block length");
    ComplexVector y = ComplexVector::Zero(rows());
    for (int r = 0; r < rows(); ++r) {
        cplx acc(0.0, 0.0);
        const int d_lo = std::max(0, r - cols() + 1);
        const int d_hi = std::min(taps() - 1, r);
        for (int d = d_lo; d <= d_hi; ++d) acc += real_.tap(symbol, r, d) * x(r - d);
        y(r) = acc;
    }
    return y;
}

ComplexMatrix ChannelMatrixSet::left_multiply(const ComplexMatrix& a, int symbol) const {
    require(a.cols() == rows(), ErrorCode::DimensionMismatch, "ChannelMatrixSet::left_multiply: inner size");
    ComplexMatrix out = ComplexMatrix::Zero(a.rows(), cols());
    for (int c = 0; c < cols(); ++c) {
        for (int d = 0; d < taps(); ++d) out.col(c) += a.col(c + d) * real_.tap(symbol, c + d, d);
    }
    return out;
}

ComplexVector ChannelMatrixSet::apply_block_diagonal(const ComplexVector& s) const {
    require(s.size() == static_cast<Eigen::Index>(cols()) * symbols(), ErrorCode::DimensionMismatch,
            "apply_block_diagonal: signal length must be block * N");
    ComplexVector r(static_cast<Eigen::Index>(rows()) * symbols());
    for (int i = 0; i < symbols(); ++i) {
        r.segment(static_cast<Eigen::Index>(i) * rows(), rows()) =
            apply(i, s.segment(static_cast<Eigen::Index>(i) * cols(), cols()));
    }
    return r;
}

ComplexMatrix ChannelMatrixSet::block_diagonal() const {
    const Eigen::Index n = symbols();
    ComplexMatrix m = ComplexMatrix::Zero(rows() * n, cols() * n);
    for (int i = 0; i < symbols(); ++i) {
        m.block(static_cast<Eigen::Index>(i) * rows(), static_cast<Eigen::Index>(i) * cols(), rows(), cols()) =
            dense(i);
    }
    return m;
}

ChannelMatrixSet channel_matrices(const PathSet& paths, const ModemConfig& cfg, bool with_cp) {
    const int block = cfg.samples_per_symbol() + (with_cp ? cfg.cp_samples() : 0);
    return ChannelMatrixSet(materialize_taps(paths, cfg, block));
}

ComplexVector complex_gaussian(Eigen::Index length, double variance, std::uint64_t seed) {
    ComplexVector w(length);
    if (variance <= 0.0) {
        w.setZero();
        return w;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (Eigen::Index i = 0; i < length; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        w(i) = cplx(re, im);
    }
    return w;
}

ComplexVector apply_channel(const ComplexVector& s, const ChannelMatrixSet& chan, double tx_power,
                            double noise_var, std::uint64_t seed) {
    require(tx_power >= 0.0 && noise_var >= 0.0, ErrorCode::InvalidArgument,
            "apply_channel: power and noise variance must be >= 0");
    ComplexVector r = std::sqrt(tx_power) * chan.apply_block_diagonal(s);
    if (noise_var > 0.0) r += complex_gaussian(r.size(), noise_var, seed);
    return r;
}

}  // namespace ddmod
