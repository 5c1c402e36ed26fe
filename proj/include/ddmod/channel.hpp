#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ddmod/config.hpp"
#include "ddmod/types.hpp"

namespace ddmod {

struct Path {
    cplx gain;
    double delay_s = 0.0;
    double doppler_hz = 0.0;
};

/// Discrete multipath set: one gain, delay and Doppler shift per path.
struct PathSet {
    std::vector<Path> paths;  // delays sorted ascending
    double max_doppler_hz = 0.0;
    /// Largest delay the tap span must cover (profile maximum, not the draw).
    double span_delay_s = 0.0;
};

struct PowerDelayProfile {
    std::vector<double> delays_s;
    std::vector<double> powers_db;
};

/// Nine-tap Extended Vehicular A profile (0 .. 2510 ns).
const PowerDelayProfile& eva_profile();

/// nu_max = f_c v / c.
double max_doppler_hz(double speed_mps, double carrier_hz);
inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

/// Draws one EVA realisation: complex Gaussian gains with profile powers
/// normalised to unit total mean power, and Jakes Dopplers
/// nu_max cos(theta), theta ~ U[-pi, pi]. Deterministic in `seed`.
PathSet sample_eva_paths(std::uint64_t seed, double speed_mps, double carrier_hz);

/// Single unit path with zero delay and Doppler.
PathSet ideal_paths();

/// Number of delay taps L_ch = ceil(span / Ts~) + pulse half-support + 1.
int channel_taps(const PathSet& paths, const ModemConfig& cfg);
int pulse_half_support(PulseShape pulse);
/// Combined transmit/receive pulse g(t), t in units of the sample period.
double pulse_value(PulseShape pulse, double t_samples);

/// Per-symbol tap arrays h^(i)_{r,l}, i = 0..N-1, r = 0..rows-1, l = 0..L_ch-1
/// (all zero-based). Tap l carries delay (l - half_support) sample periods.
class LtvChannelRealization {
public:
    LtvChannelRealization(int symbols, int rows, int taps, int block_length, double sample_period_s);

    int symbols() const { return symbols_; }
    int rows() const { return rows_; }
    int taps() const { return taps_; }
    /// Input samples per symbol block (K O_s + N_CP for OTFS, K O_s for DR-UFMC).
    int block_length() const { return block_length_; }
    double sample_period_s() const { return sample_period_; }

    cplx tap(int symbol, int row, int delay) const { return h_[index(symbol, row, delay)]; }
    cplx& tap(int symbol, int row, int delay) { return h_[index(symbol, row, delay)]; }

    /// Text export, one line per (symbol, delay) tap vector across rows.
    void write_text(std::ostream& os) const;

private:
    std::size_t index(int symbol, int row, int delay) const {
        return (static_cast<std::size_t>(symbol) * rows_ + row) * taps_ + delay;
    }

    int symbols_;
    int rows_;
    int taps_;
    int block_length_;
    double sample_period_;
    std::vector<cplx> h_;
};

/// Evaluates the time-varying tap formula for every symbol, row and delay.
/// `block_length` is the number of input samples per symbol; the row count
/// is block_length + L_ch - 1. Throws DelayExceedsSpan when a path falls
/// outside the tap span.
LtvChannelRealization materialize_taps(const PathSet& paths, const ModemConfig& cfg, int block_length);
LtvChannelRealization materialize_taps(const PathSet& paths, const ModemConfig& cfg, int block_length,
                                       int taps);

/// Single-tap scalar evaluation of the same formula; used as a cross-check.
cplx tap_formula(const PathSet& paths, const ModemConfig& cfg, int block_length, int symbol, int row,
                 int delay);

/// Banded per-symbol channel matrices, M^(i)(r, c) = h^(i)_{r, r-c} for
/// 0 <= r - c < L_ch. Stored as taps; dense forms are built on request.
class ChannelMatrixSet {
public:
    explicit ChannelMatrixSet(LtvChannelRealization realization);

    int symbols() const { return real_.symbols(); }
    int rows() const { return real_.rows(); }
    int cols() const { return real_.block_length(); }
    int taps() const { return real_.taps(); }
    const LtvChannelRealization& realization() const { return real_; }

    cplx entry(int symbol, int r, int c) const;
    ComplexMatrix dense(int symbol) const;
    /// M^(i) x for one block.
    ComplexVector apply(int symbol, const ComplexVector& x) const;
    /// A M^(i), exploiting the band structure.
    ComplexMatrix left_multiply(const ComplexMatrix& a, int symbol) const;
    /// blkdiag(M^(1), ..., M^(N)) s.
    ComplexVector apply_block_diagonal(const ComplexVector& s) const;
    /// Dense blkdiag(M^(1), ..., M^(N)); only sensible for small grids.
    ComplexMatrix block_diagonal() const;

private:
    LtvChannelRealization real_;
};

/// Channel matrices for a waveform: `with_cp` selects the OTFS/OFDM block
/// (K O_s + N_CP input samples) instead of the DR-UFMC block (K O_s).
ChannelMatrixSet channel_matrices(const PathSet& paths, const ModemConfig& cfg, bool with_cp);

/// r = sqrt(P_T) blkdiag(M) s + w with w ~ CN(0, noise_var I), seeded.
ComplexVector apply_channel(const ComplexVector& s, const ChannelMatrixSet& chan, double tx_power,
                            double noise_var, std::uint64_t seed);

/// Circularly-symmetric complex Gaussian vector with per-sample variance `variance`.
ComplexVector complex_gaussian(Eigen::Index length, double variance, std::uint64_t seed);

}  // namespace ddmod
