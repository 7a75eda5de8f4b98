#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sweep_config.hpp"
#include "types.hpp"

namespace ofdr {

// One sweep of the constant-power single-sideband probe at complex baseband.
// Samples are exactly unit magnitude before quantization.
struct ProbeWaveform {
    uint64_t sweep_index = 0;
    LaunchPol launch_pol = LaunchPol::X;
    std::vector<cplx> samples;
};

// Launch polarization for a sweep. Time-interleaved scheme: X on even sweep
// indices, Y on odd. Stateless.
LaunchPol pol_multiplex(const SweepConfig& cfg, uint64_t sweep_index);

// Generate sweep m: s[i] = exp(j*2pi*(f_if*t + (rate/2)*t^2 - (B/2)*t)) with
// t = i/fs. Instantaneous frequency ramps from f_if - B/2 to f_if + B/2 over
// one period; the pattern repeats as a sawtooth with per-sweep phase reset.
ProbeWaveform generate_sweep(const SweepConfig& cfg, uint64_t sweep_index);

// Probe sample at continuous time x (seconds, may be negative or beyond one
// period; the sawtooth repetition is applied).
cplx probe_sample_at(const SweepConfig& cfg, double x);

struct QuantizeResult {
    std::vector<int32_t> codes;
    size_t clipped = 0;
};

// Mid-tread uniform quantizer. full_scale maps to 2^(bits-1) steps; outputs are
// clipped to [-2^(bits-1), 2^(bits-1)-1]. Rounding is half away from zero.
QuantizeResult quantize(std::span<const double> samples, int bits, double full_scale);

inline int32_t quantize_one(double x, int bits, double full_scale) {
    const double scale = static_cast<double>(int64_t{1} << (bits - 1)) / full_scale;
    const double v = x * scale;
    const int64_t code = static_cast<int64_t>(v < 0 ? std::ceil(v - 0.5) : std::floor(v + 0.5));
    const int64_t lo = -(int64_t{1} << (bits - 1));
    const int64_t hi = (int64_t{1} << (bits - 1)) - 1;
    return static_cast<int32_t>(std::clamp(code, lo, hi));
}

// Sequential evaluator for exp(j*2pi*(f_if*x + (rate/2)*x^2 - (B/2)*x)) at
// x = x0 + n/fs, n = 0, 1, ...  Two complex multiplies per sample with
// periodic exact re-seeding so rounding error stays bounded.
class ChirpOscillator {
public:
    ChirpOscillator(const SweepConfig& cfg, double x0);

    cplx next() {
        if ((step_ & 0xfff) == 0) reseed();
        const cplx v = value_;
        value_ *= delta_;
        delta_ *= ratio_;
        ++step_;
        return v;
    }

private:
    void reseed();

    double x0_;
    double fs_;
    double f_start_;   // instantaneous frequency at x = 0
    double rate_;      // sweep rate
    uint64_t step_ = 0;
    cplx value_{1.0, 0.0};
    cplx delta_{1.0, 0.0};
    cplx ratio_{1.0, 0.0};
};

}  // namespace ofdr
