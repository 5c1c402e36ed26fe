#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddmod/ddmod.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitConfig = 2;

const char* waveform_name(ddmod_waveform w) {
    switch (w) {
        case DDMOD_OTFS: return "otfs";
        case DDMOD_DRUFMC: return "drufmc";
        case DDMOD_OFDM_FULL: return "ofdm_full";
        case DDMOD_OFDM_ONETAP: return "ofdm_onetap";
    }
    return "?";
}

int report(ddmod_status s) {
    std::fprintf(stderr, "ddmod: %s: %s\n", ddmod_status_string(s), ddmod_last_error());
    return s == DDMOD_E_PARSE || s == DDMOD_E_CONSTRAINT ? kExitConfig : kExitFailures;
}

struct Experiment {
    ddmod_experiment* handle = nullptr;
    ~Experiment() { ddmod_experiment_destroy(handle); }
};

// Loads and validates the config; any failure here is a config error.
int load(const std::string& path, bool desk_scale, Experiment& exp) {
    ddmod_status s = ddmod_experiment_load(path.c_str(), &exp.handle);
    if (s == DDMOD_OK && desk_scale) s = ddmod_experiment_use_desk_scale(exp.handle);
    if (s == DDMOD_OK) s = ddmod_experiment_validate(exp.handle);
    if (s != DDMOD_OK) {
        std::fprintf(stderr, "ddmod: config error: %s\n", ddmod_last_error());
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_run(const std::string& config, bool full, const std::string& out) {
    Experiment exp;
    if (int rc = load(config, !full, exp)) return rc;
    ddmod_sweep_stats stats{};
    const ddmod_status s = ddmod_run_sweep(exp.handle, out.empty() ? nullptr : out.c_str(), 1, &stats);
    if (s != DDMOD_OK) return report(s);
    std::fprintf(stderr, "ddmod: %zu rows, %zu failures, %.1f s\n", stats.rows, stats.failures, stats.elapsed_s);
    return stats.failures ? kExitFailures : kExitOk;
}

int cmd_psd(const std::string& config, const std::string& out) {
    Experiment exp;
    if (int rc = load(config, false, exp)) return rc;
    ddmod_psd_summary summaries[4];
    size_t count = 0;
    const ddmod_status s = ddmod_run_psd(exp.handle, out.empty() ? nullptr : out.c_str(), summaries, 4, &count);
    if (s != DDMOD_OK) return report(s);
    for (size_t i = 0; i < count; ++i) {
        const auto& r = summaries[i];
        std::printf("%-10s guard/edge %3d  2N_G %3d  OOB %.2f dB  (unguarded %.2f dB)\n", waveform_name(r.waveform),
                    r.guard_per_edge, 2 * r.guard_per_edge, r.oob_db, r.unguarded_oob_db);
    }
    return kExitOk;
}

int cmd_selftest() {
    size_t failed = 0;
    const ddmod_status s = ddmod_selftest(&failed);
    if (s != DDMOD_OK) return report(s);
    return failed ? kExitFailures : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-Doppler multicarrier waveform simulator"};
    app.set_version_flag("--version", ddmod_version());
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool full = false;

    auto* run = app.add_subcommand("run", "SNR / speed sweep, one CSV row per trial");
    run->add_option("--config", config, "experiment config (key = value)")->required();
    run->add_flag("--full", full, "use the configured numerology instead of the desk-scale grid");
    run->add_option("--out", out, "CSV output path (default: config `out`)");

    auto* psd = app.add_subcommand("psd", "transmit PSD and guard-band search");
    psd->add_option("--config", config, "experiment config (key = value)")->required();
    psd->add_option("--out", out, "CSV output path (default: config `psd_out`)");

    auto* selftest = app.add_subcommand("selftest", "internal consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(config, full, out);
    if (psd->parsed()) return cmd_psd(config, out);
    if (selftest->parsed()) return cmd_selftest();
    return kExitConfig;
}
