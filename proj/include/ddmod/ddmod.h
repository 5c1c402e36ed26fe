/* ddmod C API: delay-Doppler waveform simulator. */
#ifndef DDMOD_DDMOD_H
#define DDMOD_DDMOD_H

#include <stddef.h>
#include <stdint.h>

#if defined(DDMOD_BUILDING_LIBRARY)
#define DDMOD_API __attribute__((visibility("default")))
#else
#define DDMOD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ddmod_status {
    DDMOD_OK = 0,
    DDMOD_E_INVALID_SIZE = 1,
    DDMOD_E_DIMENSION_MISMATCH = 2,
    DDMOD_E_INVALID_ATTENUATION = 3,
    DDMOD_E_INDEX_OUT_OF_RANGE = 4,
    DDMOD_E_INVALID_ARGUMENT = 5,
    DDMOD_E_DELAY_EXCEEDS_SPAN = 6,
    DDMOD_E_ILL_CONDITIONED = 7,
    DDMOD_E_INVALID_GUARD = 8,
    DDMOD_E_ZERO_REFERENCE = 9,
    DDMOD_E_NOT_ACHIEVABLE = 10,
    DDMOD_E_PARSE = 11,
    DDMOD_E_CONSTRAINT = 12,
    DDMOD_E_IO = 13,
    DDMOD_E_BUFFER_TOO_SMALL = 14,
    DDMOD_E_OUT_OF_MEMORY = 15,
    DDMOD_E_INTERNAL = 16
} ddmod_status;

typedef enum ddmod_waveform {
    DDMOD_OTFS = 0,
    DDMOD_DRUFMC = 1,
    DDMOD_OFDM_FULL = 2,
    DDMOD_OFDM_ONETAP = 3
} ddmod_waveform;

typedef struct ddmod_experiment ddmod_experiment;
typedef struct ddmod_channel ddmod_channel;

typedef struct ddmod_sweep_stats {
    size_t rows;
    size_t failures;
    double elapsed_s;
} ddmod_sweep_stats;

typedef struct ddmod_psd_summary {
    ddmod_waveform waveform;
    int guard_per_edge;     /* smallest guard meeting the OOB threshold */
    double oob_db;          /* OOB level at that guard */
    double unguarded_oob_db;
} ddmod_psd_summary;

DDMOD_API const char* ddmod_version(void);
/* Message of the last failed call on this thread. */
DDMOD_API const char* ddmod_last_error(void);
DDMOD_API const char* ddmod_status_string(ddmod_status status);

/* Experiment configuration. Keys follow the config-file syntax. */
DDMOD_API ddmod_status ddmod_experiment_create(ddmod_experiment** out);
DDMOD_API ddmod_status ddmod_experiment_load(const char* path, ddmod_experiment** out);
DDMOD_API void ddmod_experiment_destroy(ddmod_experiment* exp);
DDMOD_API ddmod_status ddmod_experiment_set(ddmod_experiment* exp, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated); *needed gets the required size. */
DDMOD_API ddmod_status ddmod_experiment_get(const ddmod_experiment* exp, const char* key, char* buf, size_t cap,
                                            size_t* needed);
/* Switches K, N, O_s, D, L to the small desk numerology unless set explicitly. */
DDMOD_API ddmod_status ddmod_experiment_use_desk_scale(ddmod_experiment* exp);
DDMOD_API ddmod_status ddmod_experiment_validate(const ddmod_experiment* exp);
DDMOD_API ddmod_status ddmod_grid_size(const ddmod_experiment* exp, size_t* kn);

/* Runs the SNR/speed sweep and writes the CSV (csv_path NULL: the configured
 * `out`). Row failures are reported on stderr and counted in stats. */
DDMOD_API ddmod_status ddmod_run_sweep(const ddmod_experiment* exp, const char* csv_path, int print_summary,
                                       ddmod_sweep_stats* stats);
/* Guard search and PSD export (csv_path NULL: the configured `psd_out`). */
DDMOD_API ddmod_status ddmod_run_psd(const ddmod_experiment* exp, const char* csv_path, ddmod_psd_summary* out,
                                     size_t cap, size_t* count);
/* Prints one PASS/FAIL line per internal check to stdout. */
DDMOD_API ddmod_status ddmod_selftest(size_t* failed);

/* Channel realisations bound to the experiment's numerology. */
DDMOD_API ddmod_status ddmod_channel_sample_eva(const ddmod_experiment* exp, double speed_kmh, uint64_t seed,
                                                ddmod_channel** out);
DDMOD_API ddmod_status ddmod_channel_ideal(const ddmod_experiment* exp, ddmod_channel** out);
DDMOD_API void ddmod_channel_destroy(ddmod_channel* ch);
/* Text dump of the per-symbol taps; with_cp selects the CP block length. */
DDMOD_API ddmod_status ddmod_channel_export(const ddmod_channel* ch, int with_cp, const char* path);

/* KN x KN effective channel (DD domain for OTFS / DR-UFMC, FT domain for the
 * OFDM variants), column-major, interleaved re/im: 2 (KN)^2 doubles. */
DDMOD_API ddmod_status ddmod_effective_channel(const ddmod_channel* ch, ddmod_waveform w, double* out,
                                               size_t cap_doubles);
DDMOD_API ddmod_status ddmod_effective_channel_export(const ddmod_channel* ch, ddmod_waveform w, const char* path);
/* Post-detection SINR per grid bin (linear), K x N column-major. */
DDMOD_API ddmod_status ddmod_sinr_map(const ddmod_channel* ch, ddmod_waveform w, double snr_db, double* out,
                                      size_t cap);

#ifdef __cplusplus
}
#endif

#endif
