#pragma once

#include <optional>
#include <span>
#include <vector>

#include "matched_filter.hpp"

namespace ofdr {

struct PeakInfo {
    size_t repeater = 0;  // 1-based when expected delays were supplied, else ordinal
    size_t bin = 0;
    double delay_s = 0.0;       // sub-sample refined
    double quality_db = 0.0;    // peak power over median noise floor
    bool missing = false;       // expected peak absent above the floor
    cplx vx{};                  // complex matched-filter values at the peak bin
    cplx vy{};
};

// Locate repeater peaks. With expected delays (normal monitoring mode) each is
// searched within +/-3 bins and flagged missing when below the floor by
// threshold_db; without them, bins above median floor + threshold_db are
// returned with non-maximum suppression one resolution cell (fs/B bins) wide.
std::vector<PeakInfo> detect_peaks(const ImpulseResponse& ir,
                                   std::optional<std::span<const double>> expected_delays,
                                   double threshold_db, const SweepConfig& cfg);

// Three-point parabolic interpolation on |bins| around the peak; returns the
// refined delay in seconds. Throws if bin touches the array edge.
double estimate_delay_subsample(const ImpulseResponse& ir, size_t bin);

// Complex mean of same-launch-pol responses; W = 0 means all of them.
ImpulseResponse coherent_average(std::span<const ImpulseResponse> irs, size_t w = 0);

// Incoherent alternative: per-bin rms of the responses (phase discarded).
// Peaks survive arbitrary sweep-to-sweep phase wander; the floor level stays
// put and only its variance shrinks.
ImpulseResponse power_average(std::span<const ImpulseResponse> irs, size_t w = 0);

struct SnrEstimate {
    size_t repeater = 0;
    double snr_db = 0.0;
    double noise_floor_db = 0.0;  // median noise power, dB re full-scale peak units
    bool low_confidence = false;  // fewer than 100 clean noise bins
    bool clamped = false;         // noiseless floor, clamped at 99 dB
};

// Peak power over the median power of noise bins at least 5/B away from any
// peak. meas_bandwidth_hz() gives the effective noise bandwidth of the
// averaging configuration that produced the response.
std::vector<SnrEstimate> estimate_snr(const ImpulseResponse& ir,
                                      std::span<const PeakInfo> peaks, const SweepConfig& cfg);

inline double meas_bandwidth_hz(const SweepConfig& cfg, size_t averaged_sweeps) {
    return 1.0 / (cfg.sweep_period_s * static_cast<double>(std::max<size_t>(averaged_sweeps, 1)));
}

}  // namespace ofdr
