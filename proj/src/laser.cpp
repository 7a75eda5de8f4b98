#include "laser.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "rng.hpp"

namespace ofdr {

std::vector<GainBand> LaserModel::default_stabilization_table() {
    // Suppression of the free-running frequency noise by the cavity lock:
    // -10 dB below 1 Hz rising to -20 dB between 10 Hz and 1 kHz, log-linear in
    // between, held flat above the table.
    return {{0.0, 1.0, -10.0}, {10.0, 1000.0, -20.0}};
}

double LaserModel::gain_linear(double f_hz) const {
    if (kind == LaserKind::FreeRunningFiber) return 1.0;
    const auto& t = stabilization_gain;
    if (t.empty()) return 1.0;
    double db = t.back().gain_db;
    if (f_hz <= t.front().f_hi_hz) {
        db = t.front().gain_db;
    } else {
        for (size_t i = 0; i < t.size(); ++i) {
            if (f_hz >= t[i].f_lo_hz && f_hz <= t[i].f_hi_hz) {
                db = t[i].gain_db;
                break;
            }
            if (i + 1 < t.size() && f_hz > t[i].f_hi_hz && f_hz < t[i + 1].f_lo_hz) {
                // Log-linear interpolation across the gap.
                const double x0 = std::log10(t[i].f_hi_hz);
                const double x1 = std::log10(t[i + 1].f_lo_hz);
                const double u = (std::log10(f_hz) - x0) / (x1 - x0);
                db = t[i].gain_db + u * (t[i + 1].gain_db - t[i].gain_db);
                break;
            }
        }
    }
    return std::pow(10.0, db / 10.0);
}

void LaserModel::validate() const {
    if (linewidth_hz < 0) throw ConfigError("laser linewidth_hz must be non-negative");
    if (flicker_hz2 < 0) throw ConfigError("laser flicker_hz2 must be non-negative");
    for (size_t i = 0; i + 1 < stabilization_gain.size(); ++i) {
        if (stabilization_gain[i].f_hi_hz > stabilization_gain[i + 1].f_lo_hz) {
            throw ConfigError("laser stabilization_gain bands must be ordered, non-overlapping");
        }
    }
    for (const auto& b : stabilization_gain) {
        if (b.f_hi_hz < b.f_lo_hz)
            throw ConfigError("laser stabilization_gain band has f_hi < f_lo");
    }
}

namespace {

// Real Gaussian sequence with one-sided PSD psd(f), length n at rate fs,
// via Hermitian spectral shaping. Deterministic in (seed, stream).
template <typename PsdFn>
std::vector<double> spectral_noise(size_t n, double fs, uint64_t seed, uint64_t stream,
                                   PsdFn psd) {
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    std::vector<cplx> spec(n, cplx{});
    const size_t half = n / 2;
    for (size_t k = 1; k < half; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        const double var = static_cast<double>(n) * fs * psd(f) / 2.0;  // E|X[k]|^2
        const auto [a, b] = rng::gaussian_pair(rng::key(seed, stream, k));
        spec[k] = cplx{a, b} * std::sqrt(var / 2.0);
        spec[n - k] = std::conj(spec[k]);
    }
    if (n % 2 == 0) {
        const double f = fs / 2.0;
        const double var = static_cast<double>(n) * fs * psd(f) / 2.0;
        spec[half] = cplx{rng::gaussian(rng::key(seed, stream, half)) * std::sqrt(var), 0.0};
    }
    fft_inverse(spec);
    for (size_t i = 0; i < n; ++i) out[i] = spec[i].real();
    return out;
}

}  // namespace

std::vector<double> synth_laser_phase(const LaserModel& model, size_t n, double fs,
                                      uint64_t seed) {
    model.validate();
    std::vector<double> phase(n, 0.0);
    if (n == 0) return phase;
    if (model.linewidth_hz == 0.0 && model.flicker_hz2 == 0.0) return phase;
    const auto nu = spectral_noise(n, fs, seed, rng::kGeneric,
                                   [&](double f) { return model.shaped_psd(f); });
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        phase[i] = acc;
        acc += kTwoPi * nu[i] / fs;
    }
    return phase;
}

LaserPhaseRealization::LaserPhaseRealization(const LaserModel& model, double sweep_period_s,
                                             size_t n_sweeps, double sample_rate_hz,
                                             uint64_t seed)
    : sweep_period_(sweep_period_s),
      n_sweeps_(n_sweeps),
      samples_per_sweep_(static_cast<size_t>(std::llround(sweep_period_s * sample_rate_hz))),
      sample_rate_(sample_rate_hz),
      seed_(seed) {
    model.validate();
    anchors_.assign(n_sweeps_ + 1, 0.0);
    if (model.linewidth_hz == 0.0 && model.flicker_hz2 == 0.0) {
        bridge_sigma_ = 0.0;
        return;
    }
    // Anchor process at the sweep rate carries all shaped low-frequency
    // content; the in-sweep bridge carries the white level above it.
    const double fs_anchor = 1.0 / sweep_period_;
    const auto nu = spectral_noise(n_sweeps_ + 1, fs_anchor, seed, rng::kLaserAnchor,
                                   [&](double f) { return model.shaped_psd(f); });
    double acc = 0.0;
    for (size_t m = 0; m <= n_sweeps_; ++m) {
        anchors_[m] = acc;
        if (m < n_sweeps_) acc += kTwoPi * nu[m] * sweep_period_;
    }
    const double hf_gain = model.gain_linear(0.5 / sweep_period_);
    const double s_white = (model.linewidth_hz / kPi) * hf_gain;
    // Wiener diffusion D = (2pi)^2 * S_white / 2, per-sample increment variance D/fs.
    bridge_sigma_ = kTwoPi * std::sqrt(s_white / (2.0 * sample_rate_));
}

void LaserPhaseRealization::sweep_phase(size_t sweep_index, std::span<double> out) const {
    const size_t n = samples_per_sweep_;
    if (out.size() != n) throw ConfigError("sweep_phase: output span size mismatch");
    const double a0 = anchors_[sweep_index];
    const double a1 = anchors_[sweep_index + 1];
    if (bridge_sigma_ == 0.0) {
        // Noiseless white component: linear interpolation between anchors.
        for (size_t i = 0; i < n; ++i)
            out[i] = a0 + (a1 - a0) * static_cast<double>(i) / static_cast<double>(n);
        return;
    }
    // Brownian bridge pinned to the anchors.
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        out[i] = acc;
        acc += bridge_sigma_ * rng::gaussian(rng::key(seed_, rng::kLaserBridge, sweep_index, i));
    }
    const double w_total = acc;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double delta = a1 - a0;
    for (size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) * inv_n;
        out[i] = a0 + out[i] - u * w_total + u * delta;
    }
}

}  // namespace ofdr
