#pragma once

#include <string>

namespace ddmod {

/// Delay-domain pulse g(.) used when turning path delays into discrete taps.
enum class PulseShape {
    Ideal,         // delay rounded to the nearest sample, single unit tap
    RaisedCosine,  // RRC transmit/receive pair, roll-off 0.25, truncated to +-4 samples
};

/// Which symbol-time term enters the Doppler phase of the channel taps.
enum class TimeIndexing {
    AsWritten,  // phase argument (l + r + i - 1) Ts - Ts/2, i being the symbol index
    Absolute,   // symbol index scaled by the transmitted block length
};

/// Scalar waveform parameters shared by every transceiver chain.
///
/// Defaults are the 28 GHz / 120 kHz numerology with K = 128 subcarriers,
/// N = 16 symbols and 10x oversampling.
struct ModemConfig {
    int subcarriers = 128;          // K
    int symbols = 16;               // N
    int oversampling = 10;          // O_s
    int subband_size = 16;          // D, so B = K / D
    int filter_length = 60;         // L
    double filter_attenuation_db = 100.0;
    double subcarrier_spacing_hz = 120e3;
    double carrier_hz = 28e9;
    double tx_power = 1.0;          // P_T, linear
    double cp_duration_s = 0.586e-6;
    PulseShape pulse = PulseShape::Ideal;
    TimeIndexing time_indexing = TimeIndexing::AsWritten;

    int subbands() const { return subcarriers / subband_size; }
    int samples_per_symbol() const { return subcarriers * oversampling; }
    /// N_CP = round(T_CP / Ts~) with Ts~ = 1 / (K * df * O_s).
    int cp_samples() const;
    double sample_period_s() const;
    double sample_rate_hz() const { return 1.0 / sample_period_s(); }
    double symbol_interval_s() const { return 1.0 / subcarrier_spacing_hz; }
    int grid_size() const { return subcarriers * symbols; }

    /// Throws Error(ConstraintViolation) naming the first broken invariant.
    void validate() const;
};

/// Reduced numerology used for CI-scale runs: K=32, N=8, O_s=4, B=4, D=8, L=16.
ModemConfig desk_config();

const char* to_string(PulseShape p) noexcept;
const char* to_string(TimeIndexing t) noexcept;

}  // namespace ddmod
