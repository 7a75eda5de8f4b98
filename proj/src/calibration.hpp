#pragma once

#include <cstdint>

#include "cable.hpp"
#include "laser.hpp"
#include "sweep_config.hpp"

namespace ofdr {

// Find the per-repeater ASE density at which the measured SNR (matched filter,
// coherent averaging over the given window, median-floor estimator) lands
// within 0.5 dB of target_snr_db. Deterministic given seed. Throws
// CalibrationError with the achievable bound when the target cannot be reached
// (e.g. above the quantization-limited ceiling).
double calibrate_noise_floor(const CableModel& cable, const LaserModel& laser,
                             const SweepConfig& cfg, double target_snr_db, double averaging_s,
                             uint64_t seed);

// Measured mean per-repeater SNR at a given per-repeater density (used by the
// calibration loop and by tests).
double measure_snr_db(const CableModel& cable, const LaserModel& laser, const SweepConfig& cfg,
                      double per_repeater_density, double averaging_s, uint64_t seed);

}  // namespace ofdr
