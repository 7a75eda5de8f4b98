#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cable.hpp"
#include "laser.hpp"
#include "observation.hpp"
#include "phase.hpp"
#include "sweep_config.hpp"
#include "welch.hpp"

namespace ofdr {

enum class NoiseMode : uint8_t { Fixed, Calibrate };

struct NoiseParams {
    NoiseMode mode = NoiseMode::Fixed;
    double ase_density = 0.0;             // per repeater, Fixed mode
    double target_snr_db = 30.0;          // Calibrate mode
    double averaging_s = 1.0;             // SNR averaging window
    double extra_broadband_density = 0.0; // live-traffic coexistence term
};

struct RunParams {
    size_t sweeps = 64;
    uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    size_t snr_average_sweeps = 0;  // 0 = derive from noise.averaging_s
    bool power_average_snr = false;
    bool emit_columns = false;
    ObservationFormat obs_format = ObservationFormat::JsonLines;
    PhaseConvention phase_convention = PhaseConvention::LargestElement;
    double threshold_db = 10.0;
};

struct OutputParams {
    std::string captures;      // default capture file for simulate
    std::string observations;  // default observation file for process
    std::string dir;           // default output directory for e2e/analyze
};

struct AnalysisParams {
    std::vector<std::string> products;  // empty = all
    std::vector<uint32_t> psd_repeaters;  // empty = all
    size_t spectrogram_window = 256;
    double spectrogram_overlap = 0.5;
    double band_lo_hz = 0.1;
    double band_hi_hz = 10.0;
    double movement_threshold = -0.8;
    WelchOptions welch;
};

// Scenario document: the canonical JSON configuration with typed, validated
// views. Presets: "transatlantic-mini" (8 x 10 km desk spans) and
// "transatlantic-full" (80 spans at system-scale converter rates; heavy).
class Scenario {
public:
    static Scenario defaults();
    static Scenario preset(const std::string& name);
    static Scenario load(const std::string& path);
    static Scenario from_json_text(const std::string& text);

    void save(const std::string& path) const;
    std::string dump(int indent = 2) const { return doc_.dump(indent); }

    // Dotted-path override, e.g. "run.sweeps=128" or "events.0.amplitude=2".
    // Values are parsed as JSON when possible, else taken as strings.
    void set_override(const std::string& dotted_key, const std::string& value);
    std::string get(const std::string& dotted_key) const;

    SweepConfig sweep() const;
    CableModel cable() const;
    LaserModel laser() const;
    NoiseParams noise() const;
    RunParams run() const;
    AnalysisParams analysis() const;
    OutputParams output() const;

    // Full cross-field validation; throws ConfigError naming the field.
    void validate() const;

    const nlohmann::json& doc() const { return doc_; }

private:
    explicit Scenario(nlohmann::json doc) : doc_(std::move(doc)) {}
    nlohmann::json doc_;
};

}  // namespace ofdr
