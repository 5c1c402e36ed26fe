#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddmod/channel.hpp"
#include "ddmod/config.hpp"
#include "ddmod/ofdm.hpp"
#include "ddmod/psd.hpp"

namespace ddmod {

enum class Waveform { Otfs, DrUfmc, OfdmFull, OfdmOneTap };

const char* to_string(Waveform w) noexcept;
std::optional<Waveform> parse_waveform(const std::string& name);

/// Where guard subcarriers take effect.
enum class GuardMode {
    Accounting,   // full grid transmitted, guard bins excluded from SINR/SE averages
    Transmitter,  // guard subcarriers also nulled in X_FT before modulation
};

struct ExperimentConfig {
    ModemConfig modem;
    std::vector<Waveform> waveforms{Waveform::Otfs, Waveform::DrUfmc, Waveform::OfdmFull, Waveform::OfdmOneTap};
    std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0};
    std::vector<double> speeds_kmh{50.0, 500.0};
    int trials = 50;
    std::uint64_t seed = 1;
    std::string out = "ddmod_results.csv";
    std::string psd_out = "ddmod_psd.csv";

    // Guard subcarriers per edge. Unset means: scale the 30 / 18 per-edge
    // counts of the 128-subcarrier grid to the configured K.
    std::optional<int> guard_otfs;
    std::optional<int> guard_drufmc;
    GuardMode guard_mode = GuardMode::Accounting;

    OneTapMode onetap = OneTapMode::Mmse;
    bool ideal_channel = false;
    bool record_runtime = false;

    int psd_trials = 100;
    double oob_threshold_db = -30.0;

    /// Keys given explicitly in the loaded file.
    std::set<std::string> explicit_keys;

    int otfs_guard() const;
    int drufmc_guard() const;
    int guard_for(Waveform w) const;
    double efficiency_for(Waveform w) const;

    /// Sets one key from its text form; throws ParseError / ConstraintViolation.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    /// Switches K, N, O_s, D, L to the desk-scale numerology unless the
    /// corresponding key was given explicitly.
    void apply_desk_scale();
    void validate() const;
};

/// Parses flat `key = value` text with `#` comments; unknown keys and
/// malformed lines raise ParseError with the line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
    Waveform waveform = Waveform::Otfs;
    double speed_kmh = 0.0;
    double snr_db = 0.0;
    int trial = 0;
    double net_sinr_db = 0.0;
    double avg_se = 0.0;
    double nmse = 0.0;
    double runtime_s = 0.0;
};

struct SweepResult {
    std::vector<ResultRow> rows;
    std::vector<std::string> failures;
};

inline constexpr const char* kCsvHeader = "waveform,speed_kmh,snr_db,trial,net_sinr_db,avg_se_bps_hz,nmse,runtime_s";

/// Channel draws depend on the trial only: every waveform and speed sees the
/// same gains and arrival angles, speed just scales the Doppler shifts.
std::uint64_t channel_seed(std::uint64_t base, int trial);
std::uint64_t trial_seed(std::uint64_t base, Waveform w, double speed_kmh, int snr_index, int trial);

/// Worker count: hardware concurrency capped by DDMOD_THREADS.
int worker_count();

SweepResult run_sweep(const ExperimentConfig& cfg);
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// Mean net SINR / SE / NMSE over trials per (waveform, speed, SNR).
void write_summary(std::ostream& os, const std::vector<ResultRow>& rows);

struct PsdSummary {
    Waveform waveform = Waveform::Otfs;
    GuardSearchResult search;
    PsdEstimate unguarded;
    PsdEstimate guarded;
};

/// Transmit-signal generator for PSD work: random QPSK frames with
/// `guard` edge subcarriers nulled per side.
SignalGenerator transmit_generator(Waveform w, const ModemConfig& cfg, int guard);
/// Welch settings: 4 K O_s segments, 50 % overlap.
WelchOptions psd_options(const ModemConfig& cfg);
PsdEstimate waveform_psd(Waveform w, const ModemConfig& cfg, int guard, int trials, std::uint64_t seed);
PsdSummary guard_search(Waveform w, const ExperimentConfig& cfg);
std::vector<PsdSummary> run_psd(const ExperimentConfig& cfg);
void write_psd_csv(std::ostream& os, const std::vector<PsdSummary>& summaries);

/// Random unit-energy QPSK K x N grid.
ComplexMatrix qpsk_grid(int rows, int cols, std::uint64_t seed);

/// Zeroes `guard` rows at both edges of an FT grid.
void null_edges(ComplexMatrix& x_ft, int guard);

/// Effective channel of a waveform on a channel realisation; the OFDM
/// variants return the FT-domain matrix.
EffectiveChannel effective_channel(Waveform w, const PathSet& paths, const ModemConfig& cfg);

/// Text dump of a complex matrix: header line then `row col re im` per entry.
void write_matrix_text(std::ostream& os, const ComplexMatrix& m);

}  // namespace ddmod
