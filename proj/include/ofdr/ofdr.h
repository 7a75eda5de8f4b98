/*
 * ofdr: coherent sweep reflectometry toolkit for repeatered-cable monitoring.
 *
 * C interface to the simulation, processing, analysis and streaming pipeline.
 * All functions return ofdr_status; on failure, ofdr_last_error() gives a
 * thread-local message valid until the next call on the same thread. Handles
 * are opaque and must be released with their matching free function.
 */
#ifndef OFDR_H
#define OFDR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ofdr_status {
    OFDR_OK = 0,
    OFDR_ERR_INVALID_ARGUMENT = 1,
    OFDR_ERR_CONFIG = 2,
    OFDR_ERR_IO = 3,
    OFDR_ERR_CALIBRATION = 4,
    OFDR_ERR_STREAM = 5,
    OFDR_ERR_RUNTIME = 6
} ofdr_status;

/* Opaque scenario configuration. */
typedef struct ofdr_config ofdr_config;

const char* ofdr_version(void);
const char* ofdr_status_name(ofdr_status status);
const char* ofdr_last_error(void);

/* Configuration */
ofdr_status ofdr_config_create(ofdr_config** out);
ofdr_status ofdr_config_load(const char* path, ofdr_config** out);
ofdr_status ofdr_config_from_json(const char* json_text, ofdr_config** out);
ofdr_status ofdr_config_preset(const char* name, ofdr_config** out);
/* Dotted-path override, e.g. ("run.sweeps", "128"). Values parse as JSON when
 * possible, else as strings. */
ofdr_status ofdr_config_set(ofdr_config* cfg, const char* dotted_key, const char* value);
/* Reads a value (JSON-encoded unless it is a plain string) into buf. */
ofdr_status ofdr_config_get(const ofdr_config* cfg, const char* dotted_key, char* buf,
                            size_t buf_len);
ofdr_status ofdr_config_validate(const ofdr_config* cfg);
ofdr_status ofdr_config_save(const ofdr_config* cfg, const char* path);
void ofdr_config_free(ofdr_config* cfg);

/* Pipeline stages. Paths are created or truncated as needed. */
ofdr_status ofdr_run_simulate(const ofdr_config* cfg, const char* out_path);
ofdr_status ofdr_run_process(const ofdr_config* cfg, const char* in_path,
                             const char* out_path);
ofdr_status ofdr_run_analyze(const ofdr_config* cfg, const char* in_path,
                             const char* out_dir);
ofdr_status ofdr_run_e2e(const ofdr_config* cfg, const char* out_dir);

/* Noise-floor calibration: per-repeater ASE density hitting the target SNR at
 * the given averaging window. */
ofdr_status ofdr_calibrate_noise(const ofdr_config* cfg, double target_snr_db,
                                 double averaging_s, double* density_out);

/* Live streaming pair over TCP; endpoint is "host:port". */
ofdr_status ofdr_stream_tx(const ofdr_config* cfg, const char* endpoint);
ofdr_status ofdr_stream_rx(const ofdr_config* cfg, const char* endpoint,
                           const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* OFDR_H */
