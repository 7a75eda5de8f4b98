#include "waveform.hpp"

#include <algorithm>
#include <cmath>

namespace ofdr {

LaunchPol pol_multiplex(const SweepConfig& cfg, uint64_t sweep_index) {
    (void)cfg;  // single scheme for now
    return (sweep_index % 2 == 0) ? LaunchPol::X : LaunchPol::Y;
}

namespace {

double chirp_phase(const SweepConfig& cfg, double x) {
    return kTwoPi * (cfg.if_center_hz * x + 0.5 * cfg.sweep_rate() * x * x -
                     0.5 * cfg.sweep_bandwidth_hz * x);
}

}  // namespace

cplx probe_sample_at(const SweepConfig& cfg, double x) {
    // Sawtooth repetition with per-sweep phase reset: evaluate at local time.
    const double t_local = x - cfg.sweep_period_s * std::floor(x / cfg.sweep_period_s);
    const double ph = chirp_phase(cfg, t_local);
    return cplx{std::cos(ph), std::sin(ph)};
}

ProbeWaveform generate_sweep(const SweepConfig& cfg, uint64_t sweep_index) {
    cfg.validate();
    ProbeWaveform w;
    w.sweep_index = sweep_index;
    w.launch_pol = pol_multiplex(cfg, sweep_index);
    const size_t n = cfg.samples_per_sweep();
    w.samples.resize(n);
    const double fs = cfg.sample_rate_hz;
    for (size_t i = 0; i < n; ++i) {
        const double ph = chirp_phase(cfg, static_cast<double>(i) / fs);
        w.samples[i] = cplx{std::cos(ph), std::sin(ph)};
    }
    return w;
}

QuantizeResult quantize(std::span<const double> samples, int bits, double full_scale) {
    if (bits < 2 || bits > 16) throw ConfigError("quantize: bits must be in [2, 16]");
    if (!(full_scale > 0)) throw ConfigError("quantize: full_scale must be positive");
    QuantizeResult r;
    r.codes.resize(samples.size());
    const int64_t lo = -(int64_t{1} << (bits - 1));
    const int64_t hi = (int64_t{1} << (bits - 1)) - 1;
    const double scale = static_cast<double>(int64_t{1} << (bits - 1)) / full_scale;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i] * scale;
        const int64_t code =
            static_cast<int64_t>(v < 0 ? std::ceil(v - 0.5) : std::floor(v + 0.5));
        if (code < lo || code > hi) ++r.clipped;
        r.codes[i] = static_cast<int32_t>(std::clamp(code, lo, hi));
    }
    return r;
}

ChirpOscillator::ChirpOscillator(const SweepConfig& cfg, double x0)
    : x0_(x0),
      fs_(cfg.sample_rate_hz),
      f_start_(cfg.if_center_hz - 0.5 * cfg.sweep_bandwidth_hz),
      rate_(cfg.sweep_rate()) {
    const double dt = 1.0 / fs_;
    const double two_a = kTwoPi * rate_ * dt * dt;  // 2a with a = pi*rate*dt^2
    ratio_ = cplx{std::cos(two_a), std::sin(two_a)};
    reseed();
}

void ChirpOscillator::reseed() {
    const double dt = 1.0 / fs_;
    const double x = x0_ + static_cast<double>(step_) * dt;
    const double ph = kTwoPi * (f_start_ * x + 0.5 * rate_ * x * x);
    value_ = cplx{std::cos(ph), std::sin(ph)};
    // Increment from x to x + dt.
    const double d = kTwoPi * dt * (f_start_ + rate_ * x) + kPi * rate_ * dt * dt;
    delta_ = cplx{std::cos(d), std::sin(d)};
}

}  // namespace ofdr
