#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "types.hpp"

namespace ofdr {

enum class LaserKind : uint8_t { FreeRunningFiber = 0, CavityStabilized = 1 };

// Frequency band with a gain applied to the frequency-noise PSD. Bands must be
// ordered and non-overlapping; gaps are interpolated log-linearly (dB vs log f)
// and the table is extended flat at both ends.
struct GainBand {
    double f_lo_hz = 0.0;
    double f_hi_hz = 0.0;
    double gain_db = 0.0;
};

struct LaserModel {
    LaserKind kind = LaserKind::FreeRunningFiber;
    double linewidth_hz = 100.0;
    double flicker_hz2 = 0.0;  // h_-1 coefficient of the h_-1/f frequency-noise term
    std::vector<GainBand> stabilization_gain = default_stabilization_table();

    static std::vector<GainBand> default_stabilization_table();

    // PSD multiplier at frequency f: 1 for the free-running laser, the gain
    // table (interpolated) for the cavity-stabilized one.
    double gain_linear(double f_hz) const;

    // One-sided frequency-noise PSD target in Hz^2/Hz before stabilization.
    double base_psd(double f_hz) const {
        double s = linewidth_hz / kPi;
        if (flicker_hz2 > 0 && f_hz > 0) s += flicker_hz2 / f_hz;
        return s;
    }

    double shaped_psd(double f_hz) const { return base_psd(f_hz) * gain_linear(f_hz); }

    void validate() const;
};

// Synthesize n samples of laser phase (rad) at rate fs via spectral shaping of
// white Gaussian noise to the model's frequency-noise PSD, integrated to phase.
// Pure function of (model, n, fs, seed).
std::vector<double> synth_laser_phase(const LaserModel& model, size_t n, double fs,
                                      uint64_t seed);

// Laser phase over a whole multi-sweep run. Low-frequency structure (below the
// sweep rate) comes from one spectral synthesis over per-sweep anchor points;
// in-sweep detail is a Brownian bridge between anchors at the high-frequency
// white noise level. Sampling any sweep is independent of the others, so
// parallel and serial capture generation agree bit for bit.
class LaserPhaseRealization {
public:
    LaserPhaseRealization(const LaserModel& model, double sweep_period_s, size_t n_sweeps,
                          double sample_rate_hz, uint64_t seed);

    // Phase samples for sweep m: out[i] = phase(m*T + i/fs), i in [0, N).
    void sweep_phase(size_t sweep_index, std::span<double> out) const;

    size_t samples_per_sweep() const { return samples_per_sweep_; }
    size_t n_sweeps() const { return n_sweeps_; }
    double anchor(size_t m) const { return anchors_[m]; }

private:
    double sweep_period_;
    size_t n_sweeps_;
    size_t samples_per_sweep_;
    double sample_rate_;
    uint64_t seed_;
    double bridge_sigma_;          // per-sample std-dev of the white FM component
    std::vector<double> anchors_;  // phase at sweep boundaries, n_sweeps + 1 values
};

}  // namespace ofdr
