#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cable.hpp"
#include "capture.hpp"
#include "laser.hpp"
#include "sweep_config.hpp"
#include "waveform.hpp"

namespace ofdr {

// Simulates digitized heterodyne captures for a run of n_sweeps sweeps.
// Immutable after construction; simulate_sweep is const and thread-safe, and
// every random draw derives from (seed, sweep_index), so sweeps may be
// generated in any order or in parallel with identical results.
class Propagator {
public:
    Propagator(CableModel cable, LaserModel laser, SweepConfig cfg, uint64_t seed,
               size_t n_sweeps, double extra_noise_density = 0.0);

    SweepCapture simulate_sweep(size_t sweep_index) const;

    const CableModel& cable() const { return cable_; }
    const SweepConfig& config() const { return cfg_; }
    size_t n_sweeps() const { return n_sweeps_; }
    double full_scale() const { return full_scale_; }
    double noise_sigma() const { return noise_sigma_; }
    const std::vector<double>& nominal_delays() const { return nominal_delays_; }

private:
    CableModel cable_;
    LaserModel laser_;
    SweepConfig cfg_;
    uint64_t seed_;
    size_t n_sweeps_;
    size_t n_;
    bool laser_noise_on_;
    double noise_sigma_;  // per-sample ASE + coexistence noise, model units
    double full_scale_;
    std::vector<double> amp_linear_;  // static round-trip amplitude per repeater
    std::vector<double> nominal_delays_;
    std::unique_ptr<LaserPhaseRealization> laser_phase_;
};

// Single-sweep convenience wrapper matching the per-operation contract. The
// probe must be consistent with cfg (length and launch polarization).
SweepCapture propagate(const CableModel& cable, const ProbeWaveform& probe,
                       const LaserModel& laser, double t0, const SweepConfig& cfg,
                       uint64_t seed);

}  // namespace ofdr
