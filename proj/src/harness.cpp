#include "ddmod/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "ddmod/drufmc.hpp"
#include "ddmod/error.hpp"
#include "ddmod/metrics.hpp"
#include "ddmod/otfs.hpp"

namespace ddmod {

const char* to_string(Waveform w) noexcept {
    switch (w) {
        case Waveform::Otfs: return "otfs";
        case Waveform::DrUfmc: return "drufmc";
        case Waveform::OfdmFull: return "ofdm_full";
        case Waveform::OfdmOneTap: return "ofdm_onetap";
    }
    return "unknown";
}

std::optional<Waveform> parse_waveform(const std::string& name) {
    for (auto w : {Waveform::Otfs, Waveform::DrUfmc, Waveform::OfdmFull, Waveform::OfdmOneTap}) {
        if (name == to_string(w)) return w;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

// Per-edge guard counts that keep OOB emission under -30 dB on the
// 128-subcarrier grid.
constexpr int kReferenceSubcarriers = 128;
constexpr int kReferenceGuardOtfs = 30;
constexpr int kReferenceGuardDrufmc = 18;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out)) {
        fail(ErrorCode::ParseError, key + ": expected a number, got '" + v + "'");
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) fail(ErrorCode::ParseError, key + ": expected an integer, got '" + v + "'");
    return out;
}

int parse_count(const std::string& key, const std::string& v) {
    const long long n = parse_int(key, v);
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
        fail(ErrorCode::ParseError, key + ": integer out of range");
    }
    return static_cast<int>(n);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    fail(ErrorCode::ParseError, key + ": expected true/false, got '" + v + "'");
}

std::string format_list(const std::vector<double>& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    return os.str();
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

int scaled_guard(int reference_guard, int subcarriers) {
    return static_cast<int>(std::lround(static_cast<double>(reference_guard) * subcarriers / kReferenceSubcarriers));
}

}  // namespace

int ExperimentConfig::otfs_guard() const {
    return guard_otfs.value_or(scaled_guard(kReferenceGuardOtfs, modem.subcarriers));
}

int ExperimentConfig::drufmc_guard() const {
    return guard_drufmc.value_or(scaled_guard(kReferenceGuardDrufmc, modem.subcarriers));
}

int ExperimentConfig::guard_for(Waveform w) const {
    return w == Waveform::DrUfmc ? drufmc_guard() : otfs_guard();
}

double ExperimentConfig::efficiency_for(Waveform w) const {
    return w == Waveform::DrUfmc ? drufmc_efficiency() : otfs_efficiency(modem);
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    auto& m = modem;
    if (key == "K") m.subcarriers = parse_count(key, v);
    else if (key == "N") m.symbols = parse_count(key, v);
    else if (key == "O_s") m.oversampling = parse_count(key, v);
    else if (key == "D") m.subband_size = parse_count(key, v);
    else if (key == "L") m.filter_length = parse_count(key, v);
    else if (key == "A_dB") m.filter_attenuation_db = parse_double(key, v);
    else if (key == "delta_f") m.subcarrier_spacing_hz = parse_double(key, v);
    else if (key == "f_c") m.carrier_hz = parse_double(key, v);
    else if (key == "P_T") m.tx_power = parse_double(key, v);
    else if (key == "T_CP") m.cp_duration_s = parse_double(key, v);
    else if (key == "pulse") {
        if (v == "ideal") m.pulse = PulseShape::Ideal;
        else if (v == "rrc") m.pulse = PulseShape::RaisedCosine;
        else fail(ErrorCode::ParseError, "pulse: expected ideal or rrc, got '" + v + "'");
    } else if (key == "time_indexing") {
        if (v == "as_written") m.time_indexing = TimeIndexing::AsWritten;
        else if (v == "absolute") m.time_indexing = TimeIndexing::Absolute;
        else fail(ErrorCode::ParseError, "time_indexing: expected as_written or absolute, got '" + v + "'");
    } else if (key == "waveforms") {
        std::vector<Waveform> ws;
        for (const auto& name : split_list(v)) {
            const auto w = parse_waveform(name);
            if (!w) fail(ErrorCode::ParseError, "waveforms: unknown waveform '" + name + "'");
            ws.push_back(*w);
        }
        waveforms = std::move(ws);
    } else if (key == "snr_db") {
        snr_db.clear();
        for (const auto& x : split_list(v)) snr_db.push_back(parse_double(key, x));
    } else if (key == "speeds_kmh") {
        speeds_kmh.clear();
        for (const auto& x : split_list(v)) speeds_kmh.push_back(parse_double(key, x));
    } else if (key == "trials") trials = parse_count(key, v);
    else if (key == "seed") {
        const long long s = parse_int(key, v);
        if (s < 0) fail(ErrorCode::ParseError, "seed: must be non-negative");
        seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") out = v;
    else if (key == "psd_out") psd_out = v;
    else if (key == "guard_otfs") guard_otfs = parse_count(key, v);
    else if (key == "guard_drufmc") guard_drufmc = parse_count(key, v);
    else if (key == "guard_mode") {
        if (v == "accounting") guard_mode = GuardMode::Accounting;
        else if (v == "transmitter") guard_mode = GuardMode::Transmitter;
        else fail(ErrorCode::ParseError, "guard_mode: expected accounting or transmitter, got '" + v + "'");
    } else if (key == "onetap") {
        if (v == "mmse") onetap = OneTapMode::Mmse;
        else if (v == "zf") onetap = OneTapMode::ZeroForcing;
        else fail(ErrorCode::ParseError, "onetap: expected mmse or zf, got '" + v + "'");
    } else if (key == "ideal_channel") ideal_channel = parse_bool(key, v);
    else if (key == "record_runtime") record_runtime = parse_bool(key, v);
    else if (key == "psd_trials") psd_trials = parse_count(key, v);
    else if (key == "delta_OOB") oob_threshold_db = parse_double(key, v);
    else fail(ErrorCode::ParseError, "unknown key '" + key + "'");
    explicit_keys.insert(key);
}

std::string ExperimentConfig::get(const std::string& key) const {
    const auto& m = modem;
    if (key == "K") return std::to_string(m.subcarriers);
    if (key == "N") return std::to_string(m.symbols);
    if (key == "O_s") return std::to_string(m.oversampling);
    if (key == "D") return std::to_string(m.subband_size);
    if (key == "L") return std::to_string(m.filter_length);
    if (key == "A_dB") return format_double(m.filter_attenuation_db);
    if (key == "delta_f") return format_double(m.subcarrier_spacing_hz);
    if (key == "f_c") return format_double(m.carrier_hz);
    if (key == "P_T") return format_double(m.tx_power);
    if (key == "T_CP") return format_double(m.cp_duration_s);
    if (key == "N_CP") return std::to_string(m.cp_samples());
    if (key == "pulse") return to_string(m.pulse);
    if (key == "time_indexing") return to_string(m.time_indexing);
    if (key == "waveforms") {
        std::string s;
        for (std::size_t i = 0; i < waveforms.size(); ++i) s += (i ? "," : "") + std::string(to_string(waveforms[i]));
        return s;
    }
    if (key == "snr_db") return format_list(snr_db);
    if (key == "speeds_kmh") return format_list(speeds_kmh);
    if (key == "trials") return std::to_string(trials);
    if (key == "seed") return std::to_string(seed);
    if (key == "out") return out;
    if (key == "psd_out") return psd_out;
    if (key == "guard_otfs") return std::to_string(otfs_guard());
    if (key == "guard_drufmc") return std::to_string(drufmc_guard());
    if (key == "guard_mode") return guard_mode == GuardMode::Accounting ? "accounting" : "transmitter";
    if (key == "onetap") return onetap == OneTapMode::Mmse ? "mmse" : "zf";
    if (key == "ideal_channel") return ideal_channel ? "true" : "false";
    if (key == "record_runtime") return record_runtime ? "true" : "false";
    if (key == "psd_trials") return std::to_string(psd_trials);
    if (key == "delta_OOB") return format_double(oob_threshold_db);
    fail(ErrorCode::InvalidArgument, "unknown key '" + key + "'");
}

void ExperimentConfig::apply_desk_scale() {
    const ModemConfig desk = desk_config();
    if (!explicit_keys.count("K")) modem.subcarriers = desk.subcarriers;
    if (!explicit_keys.count("N")) modem.symbols = desk.symbols;
    if (!explicit_keys.count("O_s")) modem.oversampling = desk.oversampling;
    if (!explicit_keys.count("D")) modem.subband_size = desk.subband_size;
    if (!explicit_keys.count("L")) modem.filter_length = desk.filter_length;
}

void ExperimentConfig::validate() const {
    modem.validate();
    auto check = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::ConstraintViolation, what);
    };
    check(!waveforms.empty(), "waveform list non-empty");
    check(!snr_db.empty(), "SNR grid non-empty");
    check(!speeds_kmh.empty(), "speed list non-empty");
    for (double s : speeds_kmh) check(s >= 0.0, "speeds >= 0");
    check(trials >= 1, "trials >= 1");
    check(psd_trials >= 1, "psd_trials >= 1");
    const int k = modem.subcarriers;
    check(otfs_guard() >= 0 && 2 * otfs_guard() < k, "0 <= 2·guard_otfs < K");
    check(drufmc_guard() >= 0 && 2 * drufmc_guard() < k, "0 <= 2·guard_drufmc < K");
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty key");
        try {
            cfg.set(key, line.substr(eq + 1));
        } catch (const Error& e) {
            fail(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
    return parse_config(in);
}

// ---------------------------------------------------------------------------
// Seeds, threads, shared helpers

std::uint64_t channel_seed(std::uint64_t base, int trial) {
    return mix_seed(mix_seed(base, 0x63686e6cULL), static_cast<std::uint64_t>(trial));
}

std::uint64_t trial_seed(std::uint64_t base, Waveform w, double speed_kmh, int snr_index, int trial) {
    std::uint64_t s = mix_seed(base, 0x64617461ULL);
    s = mix_seed(s, static_cast<std::uint64_t>(w));
    s = mix_seed(s, std::bit_cast<std::uint64_t>(speed_kmh));
    s = mix_seed(s, static_cast<std::uint64_t>(snr_index));
    return mix_seed(s, static_cast<std::uint64_t>(trial));
}

int worker_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("DDMOD_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

ComplexMatrix qpsk_grid(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double a = 1.0 / std::sqrt(2.0);
    ComplexMatrix x(rows, cols);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const std::uint64_t bits = rng();
        x(j) = cplx((bits & 1) ? a : -a, (bits & 2) ? a : -a);
    }
    return x;
}

void null_edges(ComplexMatrix& x_ft, int guard) {
    require(guard >= 0 && 2 * guard <= x_ft.rows(), ErrorCode::InvalidGuard, "null_edges: guard too large");
    if (guard == 0) return;
    x_ft.topRows(guard).setZero();
    x_ft.bottomRows(guard).setZero();
}

EffectiveChannel effective_channel(Waveform w, const PathSet& paths, const ModemConfig& cfg) {
    switch (w) {
        case Waveform::Otfs: {
            const ModemBasis basis(cfg);
            return otfs_effective_channel(channel_matrices(paths, cfg, true), basis);
        }
        case Waveform::DrUfmc: {
            const UfmcBasis ub(cfg);
            return drufmc_effective_channel(channel_matrices(paths, cfg, false), ub);
        }
        case Waveform::OfdmFull:
        case Waveform::OfdmOneTap: {
            const ModemBasis basis(cfg);
            return ofdm_full_effective_channel(channel_matrices(paths, cfg, true), basis);
        }
    }
    fail(ErrorCode::InvalidArgument, "effective_channel: unknown waveform");
}

void write_matrix_text(std::ostream& os, const ComplexMatrix& m) {
    os << "# ddmod matrix v1 rows " << m.rows() << " cols " << m.cols() << "\n";
    os << std::setprecision(17);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            os << r << ' ' << c << ' ' << m(r, c).real() << ' ' << m(r, c).imag() << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// SNR sweep

namespace {

bool is_dd_waveform(Waveform w) {
    return w == Waveform::Otfs || w == Waveform::DrUfmc;
}

// Restricts the transmitted grid to the non-guard subcarriers: in the DD
// domain that is C Q with Q = T^H diag(mask) T, T the ISFFT on vec(X).
ComplexMatrix transmitter_projection(const ModemBasis& basis, int guard) {
    const auto& cfg = basis.config();
    const Eigen::Index kn = cfg.grid_size();
    ComplexMatrix q(kn, kn);
    for (Eigen::Index j = 0; j < kn; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(cfg.subcarriers, cfg.symbols);
        e(j) = 1.0;
        ComplexMatrix ft = basis.isfft(e);
        null_edges(ft, guard);
        q.col(j) = basis.sfft(ft).reshaped();
    }
    return q;
}

struct SweepContext {
    const ExperimentConfig& cfg;
    ModemBasis basis;
    UfmcBasis ufmc;
    std::optional<ComplexMatrix> dd_projection[2];  // indexed by guard owner: 0 otfs, 1 drufmc
};

struct TaskOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> failures;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TaskOutput run_task(const SweepContext& ctx, int speed_index, int trial) {
    const auto& cfg = ctx.cfg;
    const auto& modem = cfg.modem;
    const double speed = cfg.speeds_kmh[speed_index];
    const int k = modem.subcarriers;
    const int n = modem.symbols;
    TaskOutput out;

    PathSet paths;
    std::optional<ChannelMatrixSet> chan_cp;
    std::optional<ChannelMatrixSet> chan_plain;
    try {
        paths = cfg.ideal_channel
                    ? ideal_paths()
                    : sample_eva_paths(channel_seed(cfg.seed, trial), kmh_to_mps(speed), modem.carrier_hz);
    } catch (const std::exception& e) {
        out.failures.push_back(std::string("speed ") + format_double(speed) + " trial " + std::to_string(trial) +
                               ": " + e.what());
        return out;
    }

    for (const Waveform w : cfg.waveforms) {
        try {
            const auto t_build = std::chrono::steady_clock::now();
            const int guard = cfg.guard_for(w);
            const bool tx_null = cfg.guard_mode == GuardMode::Transmitter && guard > 0;

            EffectiveChannel chan_eff;
            ComplexMatrix coeffs;
            if (w == Waveform::DrUfmc) {
                if (!chan_plain) chan_plain.emplace(channel_matrices(paths, modem, false));
                chan_eff = drufmc_effective_channel(*chan_plain, ctx.ufmc);
            } else {
                if (!chan_cp) chan_cp.emplace(channel_matrices(paths, modem, true));
                chan_eff = w == Waveform::Otfs ? otfs_effective_channel(*chan_cp, ctx.basis)
                                               : ofdm_full_effective_channel(*chan_cp, ctx.basis);
                if (w == Waveform::OfdmOneTap) coeffs = onetap_coefficients(*chan_cp, ctx.basis);
            }
            if (tx_null) {
                if (is_dd_waveform(w)) {
                    chan_eff.matrix = chan_eff.matrix * *ctx.dd_projection[w == Waveform::DrUfmc ? 1 : 0];
                } else {
                    for (int col = 0; col < k * n; ++col) {
                        const int kk = col % k;
                        if (kk < guard || kk >= k - guard) chan_eff.matrix.col(col).setZero();
                    }
                }
            }
            const double build_s = seconds_since(t_build);

            for (int si = 0; si < static_cast<int>(cfg.snr_db.size()); ++si) {
                const auto t_point = std::chrono::steady_clock::now();
                const double noise_var = modem.tx_power / from_db(cfg.snr_db[si]);
                const SinrMap map = w == Waveform::OfdmOneTap ? onetap_sinr_map(chan_eff, noise_var, k, n)
                                                              : sinr_map(chan_eff.matrix, noise_var, k, n);

                // One simulated frame through the sample-level chain for the NMSE column.
                const std::uint64_t seed = trial_seed(cfg.seed, w, speed, si, trial);
                const ComplexMatrix x = qpsk_grid(k, n, seed);
                ComplexMatrix x_tx = x;
                if (tx_null) {
                    if (is_dd_waveform(w)) {
                        ComplexMatrix ft = ctx.basis.isfft(x);
                        null_edges(ft, guard);
                        x_tx = ctx.basis.sfft(ft);
                    } else {
                        null_edges(x_tx, guard);
                    }
                }
                const std::uint64_t noise_seed = mix_seed(seed, 1);
                ComplexMatrix x_hat;
                switch (w) {
                    case Waveform::Otfs: {
                        const auto r = otfs_apply_channel(otfs_modulate(x_tx, ctx.basis), *chan_cp, modem.tx_power,
                                                          noise_var, noise_seed);
                        const ComplexVector y = otfs_demodulate(r, ctx.basis).reshaped();
                        x_hat = mmse_detect(chan_eff.matrix, y, noise_var).reshaped(k, n);
                        break;
                    }
                    case Waveform::DrUfmc: {
                        const auto r = drufmc_apply_channel(drufmc_modulate(x_tx, ctx.ufmc), *chan_plain,
                                                            modem.tx_power, noise_var, noise_seed);
                        const ComplexVector y = drufmc_demodulate(r, ctx.basis).reshaped();
                        x_hat = mmse_detect(chan_eff.matrix, y, noise_var).reshaped(k, n);
                        break;
                    }
                    case Waveform::OfdmFull: {
                        const auto r = apply_channel(ofdm_modulate(x_tx, ctx.basis), *chan_cp, modem.tx_power,
                                                     noise_var, noise_seed);
                        const ComplexVector y = ofdm_demodulate(r, ctx.basis).reshaped();
                        x_hat = mmse_detect(chan_eff.matrix, y, noise_var).reshaped(k, n);
                        break;
                    }
                    case Waveform::OfdmOneTap: {
                        const auto r = apply_channel(ofdm_modulate(x_tx, ctx.basis), *chan_cp, modem.tx_power,
                                                     noise_var, noise_seed);
                        x_hat = ofdm_onetap_fde(ofdm_demodulate(r, ctx.basis), coeffs, noise_var, modem.tx_power,
                                                cfg.onetap);
                        break;
                    }
                }
                const int rows = k - 2 * guard;
                const ComplexVector ref = x.middleRows(guard, rows).reshaped();
                const ComplexVector est = x_hat.middleRows(guard, rows).reshaped();

                ResultRow row;
                row.waveform = w;
                row.speed_kmh = speed;
                row.snr_db = cfg.snr_db[si];
                row.trial = trial;
                row.net_sinr_db = net_sinr_db(map, guard);
                row.avg_se = avg_spectral_efficiency(map, cfg.efficiency_for(w), guard);
                row.nmse = normalized_mse(est, ref);
                row.runtime_s =
                    cfg.record_runtime ? build_s / static_cast<double>(cfg.snr_db.size()) + seconds_since(t_point) : 0.0;
                out.rows.push_back(row);
            }
        } catch (const std::exception& e) {
            out.failures.push_back(std::string(to_string(w)) + " speed " + format_double(speed) + " trial " +
                                   std::to_string(trial) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    SweepContext ctx{cfg, ModemBasis(cfg.modem), UfmcBasis(cfg.modem), {}};
    if (cfg.guard_mode == GuardMode::Transmitter) {
        if (cfg.otfs_guard() > 0) ctx.dd_projection[0] = transmitter_projection(ctx.basis, cfg.otfs_guard());
        if (cfg.drufmc_guard() > 0) ctx.dd_projection[1] = transmitter_projection(ctx.basis, cfg.drufmc_guard());
    }

    const int speeds = static_cast<int>(cfg.speeds_kmh.size());
    const int tasks = speeds * cfg.trials;
    std::vector<TaskOutput> outputs(tasks);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int t = next++; t < tasks; t = next++) outputs[t] = run_task(ctx, t / cfg.trials, t % cfg.trials);
    };
    const int threads = std::min(worker_count(), tasks);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Deterministic order: waveform (config order), speed, SNR, trial.
    SweepResult result;
    std::map<Waveform, int> wave_rank;
    for (std::size_t i = 0; i < cfg.waveforms.size(); ++i) wave_rank.emplace(cfg.waveforms[i], static_cast<int>(i));
    std::map<double, int> snr_rank;
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) snr_rank.emplace(cfg.snr_db[i], static_cast<int>(i));
    for (int t = 0; t < tasks; ++t) {
        for (auto& r : outputs[t].rows) result.rows.push_back(r);
        for (auto& f : outputs[t].failures) result.failures.push_back(f);
    }
    std::map<double, int> speed_rank;
    for (int i = 0; i < speeds; ++i) speed_rank.emplace(cfg.speeds_kmh[i], i);
    std::stable_sort(result.rows.begin(), result.rows.end(), [&](const ResultRow& a, const ResultRow& b) {
        const auto key = [&](const ResultRow& r) {
            return std::tuple(wave_rank[r.waveform], speed_rank[r.speed_kmh], snr_rank[r.snr_db], r.trial);
        };
        return key(a) < key(b);
    });
    return result;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << '\n';
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%g,%g,%d,%.6f,%.6f,%.6e,%.3f\n", to_string(r.waveform), r.speed_kmh,
                      r.snr_db, r.trial, r.net_sinr_db, r.avg_se, r.nmse, r.runtime_s);
        os << buf;
    }
}

void write_summary(std::ostream& os, const std::vector<ResultRow>& rows) {
    struct Acc {
        double sinr = 0.0, se = 0.0, nmse = 0.0;
        int count = 0;
    };
    std::vector<std::tuple<Waveform, double, double>> order;
    std::map<std::tuple<Waveform, double, double>, Acc> acc;
    for (const auto& r : rows) {
        const auto key = std::tuple(r.waveform, r.speed_kmh, r.snr_db);
        auto [it, fresh] = acc.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.sinr += from_db(r.net_sinr_db);
        it->second.se += r.avg_se;
        it->second.nmse += r.nmse;
        ++it->second.count;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %10s %8s %6s %14s %12s %12s\n", "waveform", "speed_kmh", "snr_db", "trials",
                  "net_sinr_db", "avg_se", "nmse");
    os << buf;
    for (const auto& key : order) {
        const auto& a = acc.at(key);
        std::snprintf(buf, sizeof buf, "%-12s %10g %8g %6d %14.3f %12.4f %12.4e\n", to_string(std::get<0>(key)),
                      std::get<1>(key), std::get<2>(key), a.count, to_db(a.sinr / a.count), a.se / a.count,
                      a.nmse / a.count);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// PSD and guard search

SignalGenerator transmit_generator(Waveform w, const ModemConfig& cfg, int guard) {
    cfg.validate();
    require(guard >= 0 && 2 * guard <= cfg.subcarriers, ErrorCode::InvalidGuard, "transmit_generator: guard too large");
    if (w == Waveform::DrUfmc) {
        auto ub = std::make_shared<const UfmcBasis>(cfg);
        return [ub, guard](std::uint64_t seed) -> ComplexVector {
            const auto& c = ub->config();
            ComplexMatrix ft = ub->basis().isfft(qpsk_grid(c.subcarriers, c.symbols, seed));
            null_edges(ft, guard);
            return drufmc_symbol_block_ft(ft, *ub).overlapped.reshaped();
        };
    }
    auto basis = std::make_shared<const ModemBasis>(cfg);
    const bool dd = w == Waveform::Otfs;
    return [basis, guard, dd](std::uint64_t seed) -> ComplexVector {
        const auto& c = basis->config();
        ComplexMatrix grid = qpsk_grid(c.subcarriers, c.symbols, seed);
        ComplexMatrix ft = dd ? basis->isfft(grid) : grid;
        null_edges(ft, guard);
        return cp_ofdm_modulate(ft, *basis);
    };
}

WelchOptions psd_options(const ModemConfig& cfg) {
    const int seg = 4 * cfg.samples_per_symbol();
    return WelchOptions{seg, seg / 2};
}

PsdEstimate waveform_psd(Waveform w, const ModemConfig& cfg, int guard, int trials, std::uint64_t seed) {
    return psd_estimate(transmit_generator(w, cfg, guard), cfg.sample_rate_hz(), trials, seed, psd_options(cfg));
}

PsdSummary guard_search(Waveform w, const ExperimentConfig& cfg) {
    const auto& modem = cfg.modem;
    const double half_band = modem.subcarriers * modem.subcarrier_spacing_hz / 2.0;
    // Every candidate reuses the same frames, so the OOB curve is smooth in N_G.
    const std::uint64_t seed = mix_seed(cfg.seed, 0x707364ULL + static_cast<std::uint64_t>(w));
    std::map<int, PsdEstimate> cache;
    auto measure = [&](int guard) -> PsdEstimate {
        auto it = cache.find(guard);
        if (it == cache.end()) it = cache.emplace(guard, waveform_psd(w, modem, guard, cfg.psd_trials, seed)).first;
        return it->second;
    };
    PsdSummary s;
    s.waveform = w;
    s.search = guard_count_for_threshold(measure, cfg.oob_threshold_db, half_band, modem.subcarriers / 2 - 1);
    s.unguarded = measure(0);
    s.guarded = measure(s.search.guard);
    return s;
}

std::vector<PsdSummary> run_psd(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Waveform> todo;
    for (Waveform w : cfg.waveforms) {
        // Both OFDM baselines transmit the same signal.
        const Waveform tx = w == Waveform::OfdmOneTap ? Waveform::OfdmFull : w;
        if (std::find(todo.begin(), todo.end(), tx) == todo.end()) todo.push_back(tx);
    }
    std::vector<PsdSummary> out;
    for (Waveform w : todo) out.push_back(guard_search(w, cfg));
    return out;
}

void write_psd_csv(std::ostream& os, const std::vector<PsdSummary>& summaries) {
    os << "waveform,guard_per_edge,freq_hz,power_db\n";
    char buf[160];
    for (const auto& s : summaries) {
        const std::pair<int, const PsdEstimate*> curves[] = {{0, &s.unguarded}, {s.search.guard, &s.guarded}};
        for (const auto& [guard, psd] : curves) {
            if (guard == s.search.guard && guard == 0 && psd == &s.guarded) continue;
            for (std::size_t b = 0; b < psd->freq_hz.size(); ++b) {
                std::snprintf(buf, sizeof buf, "%s,%d,%.3f,%.4f\n", to_string(s.waveform), guard, psd->freq_hz[b],
                              psd->power_db[b]);
                os << buf;
            }
        }
    }
}

}  // namespace ddmod
