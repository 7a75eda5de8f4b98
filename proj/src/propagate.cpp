#include "propagate.hpp"

#include <algorithm>
#include <cmath>

#include "rng.hpp"

namespace ofdr {

Propagator::Propagator(CableModel cable, LaserModel laser, SweepConfig cfg, uint64_t seed,
                       size_t n_sweeps, double extra_noise_density)
    : cable_(std::move(cable)),
      laser_(std::move(laser)),
      cfg_(cfg),
      seed_(seed),
      n_sweeps_(n_sweeps) {
    cfg_.validate();
    cable_.validate(cfg_.sweep_period_s);
    laser_.validate();
    n_ = cfg_.samples_per_sweep();
    laser_noise_on_ = laser_.linewidth_hz > 0.0 || laser_.flicker_hz2 > 0.0;
    if (laser_noise_on_) {
        laser_phase_ = std::make_unique<LaserPhaseRealization>(
            laser_, cfg_.sweep_period_s, n_sweeps_, cfg_.sample_rate_hz, seed_);
    }
    noise_sigma_ = std::sqrt((cable_.total_ase_density() + extra_noise_density) *
                             cfg_.sample_rate_hz / 2.0);

    const size_t n_rep = cable_.n_repeaters();
    amp_linear_.resize(n_rep);
    double sig_power = 0.0;
    for (size_t k = 1; k <= n_rep; ++k) {
        amp_linear_[k - 1] = std::pow(10.0, cable_.roundtrip_amplitude_db(k) / 20.0);
        sig_power += 0.5 * amp_linear_[k - 1] * amp_linear_[k - 1];
    }
    nominal_delays_ = cable_.nominal_roundtrip_delays(cfg_.sweep_period_s);

    // Deterministic converter range: headroom above the expected RMS so that
    // clipping stays rare; clip counts are reported on each capture.
    const double rms = std::sqrt(sig_power + noise_sigma_ * noise_sigma_);
    full_scale_ = rms > 0 ? 4.5 * rms : 1.0;
}

SweepCapture Propagator::simulate_sweep(size_t sweep_index) const {
    const size_t n = n_;
    const double fs = cfg_.sample_rate_hz;
    const double period = cfg_.sweep_period_s;
    const double t0 = static_cast<double>(sweep_index) * period;
    const LaunchPol pol = pol_multiplex(cfg_, sweep_index);

    // Laser phase over [t0 - T, t0 + T) as complex conj(exp(j*phi_L)); index 0
    // corresponds to t0 - T. Only built when laser noise is enabled.
    std::vector<cplx> laser_conj;
    if (laser_noise_on_) {
        std::vector<double> window(2 * n);
        if (sweep_index > 0) {
            laser_phase_->sweep_phase(sweep_index - 1, {window.data(), n});
        } else {
            std::fill(window.begin(), window.begin() + static_cast<ptrdiff_t>(n), 0.0);
        }
        laser_phase_->sweep_phase(sweep_index, {window.data() + n, n});
        laser_conj.resize(2 * n);
        for (size_t i = 0; i < 2 * n; ++i)
            laser_conj[i] = cplx{std::cos(window[i]), -std::sin(window[i])};
    }

    std::vector<cplx> acc_x(n, cplx{}), acc_y(n, cplx{});

    for (size_t k = 1; k <= cable_.n_repeaters(); ++k) {
        const double tau = cable_.roundtrip_delay(k, t0, period);
        const double phi = cable_.roundtrip_phase(k, t0, period);
        const Jones jones = cable_.roundtrip_jones(k, t0, period);
        const double amp = amp_linear_[k - 1];
        // Heterodyne phase against the shared laser: the carrier term is taken
        // at the intermediate frequency (desk-scale stand-in for the optical
        // carrier; delay/phase coupling adds the optical-scale term on top).
        const double psi = -kTwoPi * cfg_.if_center_hz * tau + phi;
        const cplx coef = amp * cplx{std::cos(psi), std::sin(psi)};

        const auto [col_x, col_y] =
            jones.apply(pol == LaunchPol::X ? coef : cplx{}, pol == LaunchPol::X ? cplx{} : coef);

        const double tau_samples = tau * fs;
        const size_t n_wrap = std::min(n, static_cast<size_t>(std::ceil(tau_samples)));
        const long lag = std::lround(tau_samples);  // for laser-phase lookup

        // Self-heterodyne residual exp(j*(phi_L(t_i) - phi_L(t_i - tau))), with
        // the delayed phase taken at the nearest sample.
        auto laser_factor = [&](size_t i) -> cplx {
            const long w = static_cast<long>(n + i) - lag;
            const size_t wd =
                static_cast<size_t>(std::clamp(w, 0L, static_cast<long>(2 * n - 1)));
            return std::conj(laser_conj[n + i]) * laser_conj[wd];
        };

        // The echo is the periodic extension of the sweep delayed by tau; the
        // region before the echo of this period arrives carries the tail of the
        // previous period (same launch polarization in steady state).
        if (n_wrap > 0) {
            ChirpOscillator osc(cfg_, period - tau);
            for (size_t i = 0; i < n_wrap; ++i) {
                cplx v = osc.next();
                if (laser_noise_on_) v *= laser_factor(i);
                acc_x[i] += col_x * v;
                acc_y[i] += col_y * v;
            }
        }
        {
            ChirpOscillator osc(cfg_, static_cast<double>(n_wrap) / fs - tau);
            for (size_t i = n_wrap; i < n; ++i) {
                cplx v = osc.next();
                if (laser_noise_on_) v *= laser_factor(i);
                acc_x[i] += col_x * v;
                acc_y[i] += col_y * v;
            }
        }
    }

    SweepCapture cap;
    cap.sweep_index = sweep_index;
    cap.launch_pol = pol;
    cap.t0 = t0;
    cap.adc_bits = cfg_.adc_bits;
    cap.full_scale = full_scale_;
    cap.chan_x.resize(n);
    cap.chan_y.resize(n);

    const int64_t lo = -(int64_t{1} << (cfg_.adc_bits - 1));
    const int64_t hi = (int64_t{1} << (cfg_.adc_bits - 1)) - 1;
    const double scale = static_cast<double>(int64_t{1} << (cfg_.adc_bits - 1)) / full_scale_;
    uint64_t clipped = 0;
    for (size_t i = 0; i < n; ++i) {
        double vx = acc_x[i].real();
        double vy = acc_y[i].real();
        if (noise_sigma_ > 0) {
            vx += noise_sigma_ * rng::gaussian(rng::key(seed_, rng::kAseX, sweep_index, i));
            vy += noise_sigma_ * rng::gaussian(rng::key(seed_, rng::kAseY, sweep_index, i));
        }
        const double sx = vx * scale;
        const double sy = vy * scale;
        int64_t cx = static_cast<int64_t>(sx < 0 ? std::ceil(sx - 0.5) : std::floor(sx + 0.5));
        int64_t cy = static_cast<int64_t>(sy < 0 ? std::ceil(sy - 0.5) : std::floor(sy + 0.5));
        if (cx < lo || cx > hi) ++clipped;
        if (cy < lo || cy > hi) ++clipped;
        cap.chan_x[i] = static_cast<int16_t>(std::clamp(cx, lo, hi));
        cap.chan_y[i] = static_cast<int16_t>(std::clamp(cy, lo, hi));
    }
    cap.clipped = clipped;
    return cap;
}

SweepCapture propagate(const CableModel& cable, const ProbeWaveform& probe,
                       const LaserModel& laser, double t0, const SweepConfig& cfg,
                       uint64_t seed) {
    cfg.validate();
    if (probe.samples.size() != cfg.samples_per_sweep())
        throw ConfigError("propagate: probe length does not match cfg sample rate and period");
    const auto m = static_cast<size_t>(std::llround(t0 / cfg.sweep_period_s));
    if (probe.launch_pol != pol_multiplex(cfg, m))
        throw ConfigError("propagate: probe launch polarization inconsistent with sweep index");
    Propagator p(cable, laser, cfg, seed, m + 1);
    return p.simulate_sweep(m);
}

}  // namespace ofdr
