#include "ofdr/ofdr.h"

#include <cstring>
#include <string>

#include "calibration.hpp"
#include "pipeline.hpp"
#include "scenario.hpp"
#include "types.hpp"

using namespace ofdr;

struct ofdr_config {
    Scenario scenario;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
ofdr_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        set_error(e.what());
        return OFDR_ERR_CONFIG;
    } catch (const IoError& e) {
        set_error(e.what());
        return OFDR_ERR_IO;
    } catch (const CalibrationError& e) {
        set_error(e.what());
        return OFDR_ERR_CALIBRATION;
    } catch (const StreamError& e) {
        set_error(e.what());
        return OFDR_ERR_STREAM;
    } catch (const std::exception& e) {
        set_error(e.what());
        return OFDR_ERR_RUNTIME;
    } catch (...) {
        set_error("unknown error");
        return OFDR_ERR_RUNTIME;
    }
}

ofdr_status copy_out(const std::string& s, char* buf, size_t buf_len) {
    if (!buf || buf_len == 0) {
        set_error("output buffer is null or empty");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    if (s.size() + 1 > buf_len) {
        set_error("output buffer too small (" + std::to_string(s.size() + 1) + " bytes needed)");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return OFDR_OK;
}

}  // namespace

extern "C" {

const char* ofdr_version(void) { return ofdr_version_string(); }

const char* ofdr_status_name(ofdr_status status) {
    switch (status) {
        case OFDR_OK: return "ok";
        case OFDR_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case OFDR_ERR_CONFIG: return "config";
        case OFDR_ERR_IO: return "io";
        case OFDR_ERR_CALIBRATION: return "calibration";
        case OFDR_ERR_STREAM: return "stream";
        case OFDR_ERR_RUNTIME: return "runtime";
    }
    return "unknown";
}

const char* ofdr_last_error(void) { return g_last_error.c_str(); }

ofdr_status ofdr_config_create(ofdr_config** out) {
    if (!out) {
        set_error("out is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *out = new ofdr_config{Scenario::defaults()};
        return OFDR_OK;
    });
}

ofdr_status ofdr_config_load(const char* path, ofdr_config** out) {
    if (!path || !out) {
        set_error("path or out is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *out = new ofdr_config{Scenario::load(path)};
        return OFDR_OK;
    });
}

ofdr_status ofdr_config_from_json(const char* json_text, ofdr_config** out) {
    if (!json_text || !out) {
        set_error("json_text or out is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *out = new ofdr_config{Scenario::from_json_text(json_text)};
        return OFDR_OK;
    });
}

ofdr_status ofdr_config_preset(const char* name, ofdr_config** out) {
    if (!name || !out) {
        set_error("name or out is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *out = new ofdr_config{Scenario::preset(name)};
        return OFDR_OK;
    });
}

ofdr_status ofdr_config_set(ofdr_config* cfg, const char* dotted_key, const char* value) {
    if (!cfg || !dotted_key || !value) {
        set_error("cfg, key or value is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        cfg->scenario.set_override(dotted_key, value);
        return OFDR_OK;
    });
}

ofdr_status ofdr_config_get(const ofdr_config* cfg, const char* dotted_key, char* buf,
                            size_t buf_len) {
    if (!cfg || !dotted_key) {
        set_error("cfg or key is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    ofdr_status rc = OFDR_OK;
    const ofdr_status run = guarded([&] {
        rc = copy_out(cfg->scenario.get(dotted_key), buf, buf_len);
        return OFDR_OK;
    });
    return run != OFDR_OK ? run : rc;
}

ofdr_status ofdr_config_validate(const ofdr_config* cfg) {
    if (!cfg) {
        set_error("cfg is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        cfg->scenario.validate();
        return OFDR_OK;
    });
}

ofdr_status ofdr_config_save(const ofdr_config* cfg, const char* path) {
    if (!cfg || !path) {
        set_error("cfg or path is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        cfg->scenario.save(path);
        return OFDR_OK;
    });
}

void ofdr_config_free(ofdr_config* cfg) { delete cfg; }

ofdr_status ofdr_run_simulate(const ofdr_config* cfg, const char* out_path) {
    if (!cfg || !out_path) {
        set_error("cfg or out_path is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        Pipeline(cfg->scenario).simulate_to_file(out_path);
        return OFDR_OK;
    });
}

ofdr_status ofdr_run_process(const ofdr_config* cfg, const char* in_path,
                             const char* out_path) {
    if (!cfg || !in_path || !out_path) {
        set_error("cfg, in_path or out_path is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        Pipeline(cfg->scenario).process_file(in_path, out_path);
        return OFDR_OK;
    });
}

ofdr_status ofdr_run_analyze(const ofdr_config* cfg, const char* in_path,
                             const char* out_dir) {
    if (!cfg || !in_path || !out_dir) {
        set_error("cfg, in_path or out_dir is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        Pipeline(cfg->scenario).analyze_file(in_path, out_dir);
        return OFDR_OK;
    });
}

ofdr_status ofdr_run_e2e(const ofdr_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) {
        set_error("cfg or out_dir is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        Pipeline(cfg->scenario).e2e(out_dir);
        return OFDR_OK;
    });
}

ofdr_status ofdr_calibrate_noise(const ofdr_config* cfg, double target_snr_db,
                                 double averaging_s, double* density_out) {
    if (!cfg || !density_out) {
        set_error("cfg or density_out is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *density_out =
            calibrate_noise_floor(cfg->scenario.cable(), cfg->scenario.laser(),
                                  cfg->scenario.sweep(), target_snr_db, averaging_s,
                                  cfg->scenario.run().seed);
        return OFDR_OK;
    });
}

ofdr_status ofdr_stream_tx(const ofdr_config* cfg, const char* endpoint) {
    if (!cfg || !endpoint) {
        set_error("cfg or endpoint is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        Pipeline(cfg->scenario).stream_tx(endpoint);
        return OFDR_OK;
    });
}

ofdr_status ofdr_stream_rx(const ofdr_config* cfg, const char* endpoint,
                           const char* out_path) {
    if (!cfg || !endpoint || !out_path) {
        set_error("cfg, endpoint or out_path is null");
        return OFDR_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        Pipeline(cfg->scenario).stream_rx(endpoint, out_path);
        return OFDR_OK;
    });
}

}  // extern "C"
