#include "ddmod/ddmod.h"

#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "ddmod/error.hpp"
#include "ddmod/harness.hpp"
#include "ddmod/metrics.hpp"
#include "ddmod/selftest.hpp"

struct ddmod_experiment {
    ddmod::ExperimentConfig cfg;
};

struct ddmod_channel {
    ddmod::ModemConfig modem;
    ddmod::PathSet paths;
};

namespace {

thread_local std::string last_error;

ddmod_status set_error(ddmod_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <class F>
ddmod_status guarded(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const ddmod::Error& e) {
        return set_error(static_cast<ddmod_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DDMOD_E_OUT_OF_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DDMOD_E_INTERNAL, e.what());
    } catch (...) {
        return set_error(DDMOD_E_INTERNAL, "unknown error");
    }
}

ddmod_status null_arg(const char* what) {
    return set_error(DDMOD_E_INVALID_ARGUMENT, std::string(what) + " is NULL");
}

bool valid_waveform(ddmod_waveform w) {
    return w >= DDMOD_OTFS && w <= DDMOD_OFDM_ONETAP;
}

ddmod::Waveform to_cpp(ddmod_waveform w) {
    return static_cast<ddmod::Waveform>(w);
}

}  // namespace

extern "C" {

const char* ddmod_version(void) {
    return "0.1.0";
}

const char* ddmod_last_error(void) {
    return last_error.c_str();
}

const char* ddmod_status_string(ddmod_status status) {
    switch (status) {
        case DDMOD_OK: return "ok";
        case DDMOD_E_BUFFER_TOO_SMALL: return "buffer too small";
        case DDMOD_E_OUT_OF_MEMORY: return "out of memory";
        case DDMOD_E_INTERNAL: return "internal error";
        default: break;
    }
    if (status >= DDMOD_E_INVALID_SIZE && status <= DDMOD_E_IO) {
        return ddmod::to_string(static_cast<ddmod::ErrorCode>(status));
    }
    return "unknown status";
}

ddmod_status ddmod_experiment_create(ddmod_experiment** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new ddmod_experiment{};
        return DDMOD_OK;
    });
}

ddmod_status ddmod_experiment_load(const char* path, ddmod_experiment** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        *out = new ddmod_experiment{ddmod::load_config(path)};
        return DDMOD_OK;
    });
}

void ddmod_experiment_destroy(ddmod_experiment* exp) {
    delete exp;
}

ddmod_status ddmod_experiment_set(ddmod_experiment* exp, const char* key, const char* value) {
    if (!exp) return null_arg("experiment");
    if (!key || !value) return null_arg("key/value");
    return guarded([&] {
        ddmod::ExperimentConfig next = exp->cfg;
        next.set(key, value);
        exp->cfg = std::move(next);
        return DDMOD_OK;
    });
}

ddmod_status ddmod_experiment_get(const ddmod_experiment* exp, const char* key, char* buf, size_t cap,
                                  size_t* needed) {
    if (!exp) return null_arg("experiment");
    if (!key) return null_arg("key");
    return guarded([&] {
        const std::string v = exp->cfg.get(key);
        if (needed) *needed = v.size() + 1;
        if (!buf || cap < v.size() + 1) return set_error(DDMOD_E_BUFFER_TOO_SMALL, "buffer too small");
        std::memcpy(buf, v.c_str(), v.size() + 1);
        return DDMOD_OK;
    });
}

ddmod_status ddmod_experiment_use_desk_scale(ddmod_experiment* exp) {
    if (!exp) return null_arg("experiment");
    return guarded([&] {
        exp->cfg.apply_desk_scale();
        return DDMOD_OK;
    });
}

ddmod_status ddmod_experiment_validate(const ddmod_experiment* exp) {
    if (!exp) return null_arg("experiment");
    return guarded([&] {
        exp->cfg.validate();
        return DDMOD_OK;
    });
}

ddmod_status ddmod_grid_size(const ddmod_experiment* exp, size_t* kn) {
    if (!exp) return null_arg("experiment");
    if (!kn) return null_arg("kn");
    *kn = static_cast<size_t>(exp->cfg.modem.grid_size());
    return DDMOD_OK;
}

ddmod_status ddmod_run_sweep(const ddmod_experiment* exp, const char* csv_path, int print_summary,
                             ddmod_sweep_stats* stats) {
    if (!exp) return null_arg("experiment");
    return guarded([&] {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string path = csv_path ? csv_path : exp->cfg.out;
        std::ofstream os(path);
        if (!os) ddmod::fail(ddmod::ErrorCode::Io, "cannot open '" + path + "' for writing");
        const auto result = ddmod::run_sweep(exp->cfg);
        ddmod::write_csv(os, result.rows);
        os.close();
        if (!os) ddmod::fail(ddmod::ErrorCode::Io, "write to '" + path + "' failed");
        for (const auto& f : result.failures) std::cerr << "ddmod: row failed: " << f << '\n';
        if (print_summary) ddmod::write_summary(std::cout, result.rows);
        if (stats) {
            stats->rows = result.rows.size();
            stats->failures = result.failures.size();
            stats->elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        return DDMOD_OK;
    });
}

ddmod_status ddmod_run_psd(const ddmod_experiment* exp, const char* csv_path, ddmod_psd_summary* out, size_t cap,
                           size_t* count) {
    if (!exp) return null_arg("experiment");
    return guarded([&] {
        const std::string path = csv_path ? csv_path : exp->cfg.psd_out;
        std::ofstream os(path);
        if (!os) ddmod::fail(ddmod::ErrorCode::Io, "cannot open '" + path + "' for writing");
        const auto summaries = ddmod::run_psd(exp->cfg);
        ddmod::write_psd_csv(os, summaries);
        os.close();
        if (!os) ddmod::fail(ddmod::ErrorCode::Io, "write to '" + path + "' failed");
        if (count) *count = summaries.size();
        if (out) {
            if (cap < summaries.size()) return set_error(DDMOD_E_BUFFER_TOO_SMALL, "summary buffer too small");
            const double half_band =
                exp->cfg.modem.subcarriers * exp->cfg.modem.subcarrier_spacing_hz / 2.0;
            for (size_t i = 0; i < summaries.size(); ++i) {
                out[i].waveform = static_cast<ddmod_waveform>(summaries[i].waveform);
                out[i].guard_per_edge = summaries[i].search.guard;
                out[i].oob_db = summaries[i].search.oob_db;
                out[i].unguarded_oob_db = ddmod::oob_level_db(summaries[i].unguarded, half_band);
            }
        }
        return DDMOD_OK;
    });
}

ddmod_status ddmod_selftest(size_t* failed) {
    return guarded([&] {
        size_t bad = 0;
        for (const auto& c : ddmod::run_selftest()) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
            if (!c.passed) ++bad;
        }
        if (failed) *failed = bad;
        return DDMOD_OK;
    });
}

ddmod_status ddmod_channel_sample_eva(const ddmod_experiment* exp, double speed_kmh, uint64_t seed,
                                      ddmod_channel** out) {
    if (!exp) return null_arg("experiment");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        if (!(speed_kmh >= 0.0)) ddmod::fail(ddmod::ErrorCode::InvalidArgument, "speed must be >= 0");
        exp->cfg.modem.validate();
        auto paths = ddmod::sample_eva_paths(seed, ddmod::kmh_to_mps(speed_kmh), exp->cfg.modem.carrier_hz);
        *out = new ddmod_channel{exp->cfg.modem, std::move(paths)};
        return DDMOD_OK;
    });
}

ddmod_status ddmod_channel_ideal(const ddmod_experiment* exp, ddmod_channel** out) {
    if (!exp) return null_arg("experiment");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        exp->cfg.modem.validate();
        *out = new ddmod_channel{exp->cfg.modem, ddmod::ideal_paths()};
        return DDMOD_OK;
    });
}

void ddmod_channel_destroy(ddmod_channel* ch) {
    delete ch;
}

ddmod_status ddmod_channel_export(const ddmod_channel* ch, int with_cp, const char* path) {
    if (!ch) return null_arg("channel");
    if (!path) return null_arg("path");
    return guarded([&] {
        const auto set = ddmod::channel_matrices(ch->paths, ch->modem, with_cp != 0);
        std::ofstream os(path);
        if (!os) ddmod::fail(ddmod::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
        set.realization().write_text(os);
        return DDMOD_OK;
    });
}

ddmod_status ddmod_effective_channel(const ddmod_channel* ch, ddmod_waveform w, double* out, size_t cap_doubles) {
    if (!ch) return null_arg("channel");
    if (!out) return null_arg("out");
    if (!valid_waveform(w)) return set_error(DDMOD_E_INVALID_ARGUMENT, "unknown waveform");
    return guarded([&] {
        const size_t kn = static_cast<size_t>(ch->modem.grid_size());
        if (cap_doubles < 2 * kn * kn) return set_error(DDMOD_E_BUFFER_TOO_SMALL, "output buffer too small");
        const auto eff = ddmod::effective_channel(to_cpp(w), ch->paths, ch->modem);
        std::memcpy(out, eff.matrix.data(), 2 * kn * kn * sizeof(double));
        return DDMOD_OK;
    });
}

ddmod_status ddmod_effective_channel_export(const ddmod_channel* ch, ddmod_waveform w, const char* path) {
    if (!ch) return null_arg("channel");
    if (!path) return null_arg("path");
    if (!valid_waveform(w)) return set_error(DDMOD_E_INVALID_ARGUMENT, "unknown waveform");
    return guarded([&] {
        const auto eff = ddmod::effective_channel(to_cpp(w), ch->paths, ch->modem);
        std::ofstream os(path);
        if (!os) ddmod::fail(ddmod::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
        ddmod::write_matrix_text(os, eff.matrix);
        return DDMOD_OK;
    });
}

ddmod_status ddmod_sinr_map(const ddmod_channel* ch, ddmod_waveform w, double snr_db, double* out, size_t cap) {
    if (!ch) return null_arg("channel");
    if (!out) return null_arg("out");
    if (!valid_waveform(w)) return set_error(DDMOD_E_INVALID_ARGUMENT, "unknown waveform");
    return guarded([&] {
        const int k = ch->modem.subcarriers;
        const int n = ch->modem.symbols;
        if (cap < static_cast<size_t>(k) * n) return set_error(DDMOD_E_BUFFER_TOO_SMALL, "output buffer too small");
        const auto eff = ddmod::effective_channel(to_cpp(w), ch->paths, ch->modem);
        const double noise_var = ch->modem.tx_power / ddmod::from_db(snr_db);
        const auto map = w == DDMOD_OFDM_ONETAP ? ddmod::onetap_sinr_map(eff, noise_var, k, n)
                                                : ddmod::sinr_map(eff.matrix, noise_var, k, n);
        std::memcpy(out, map.values.data(), static_cast<size_t>(k) * n * sizeof(double));
        return DDMOD_OK;
    });
}

}  // extern "C"
