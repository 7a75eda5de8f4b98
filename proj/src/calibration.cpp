#include "calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matched_filter.hpp"
#include "peaks.hpp"
#include "propagate.hpp"

namespace ofdr {

namespace {

CableModel with_density(CableModel cable, double per_repeater_density) {
    for (auto& r : cable.repeaters) r.ase_noise_density = per_repeater_density;
    return cable;
}

}  // namespace

double measure_snr_db(const CableModel& cable, const LaserModel& laser, const SweepConfig& cfg,
                      double per_repeater_density, double averaging_s, uint64_t seed) {
    const size_t w_pol = std::max<size_t>(
        1, static_cast<size_t>(std::llround(averaging_s / cfg.sweep_period_s / 2.0)));
    const size_t n_sweeps = 2 * w_pol;
    Propagator prop(with_density(cable, per_repeater_density), laser, cfg, seed, n_sweeps);
    MatchedFilter mf(cfg);

    // Coherent average of the X-launch responses over the window.
    ImpulseResponse avg;
    size_t count = 0;
    for (size_t m = 0; m < n_sweeps; m += 2) {
        ImpulseResponse ir = mf.apply(prop.simulate_sweep(m));
        if (count == 0) {
            avg = std::move(ir);
        } else {
            for (size_t i = 0; i < avg.size(); ++i) {
                avg.ch_x[i] += ir.ch_x[i];
                avg.ch_y[i] += ir.ch_y[i];
            }
        }
        ++count;
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (size_t i = 0; i < avg.size(); ++i) {
        avg.ch_x[i] *= inv;
        avg.ch_y[i] *= inv;
    }

    const auto nominal = prop.nominal_delays();
    const auto peaks = detect_peaks(avg, std::span<const double>(nominal), 3.0, cfg);
    const auto snrs = estimate_snr(avg, peaks, cfg);
    double mean = 0.0;
    for (const auto& s : snrs) mean += s.snr_db;
    return mean / static_cast<double>(snrs.size());
}

double calibrate_noise_floor(const CableModel& cable, const LaserModel& laser,
                             const SweepConfig& cfg, double target_snr_db, double averaging_s,
                             uint64_t seed) {
    if (cable.n_repeaters() == 0)
        throw CalibrationError("calibrate_noise_floor: cable has no repeaters", -999.0);
    const double tol_db = 0.5;

    // Ceiling: quantization / numerical floor with zero injected noise. A short
    // window suffices since the floor barely averages down.
    const double probe_s = std::min(averaging_s, 32.0 * cfg.sweep_period_s);
    const double ceiling_db = measure_snr_db(cable, laser, cfg, 0.0, probe_s, seed);
    if (target_snr_db > ceiling_db - 1.0) {
        std::ostringstream err;
        err << "target SNR " << target_snr_db << " dB unreachable; quantization-limited ceiling is "
            << ceiling_db << " dB";
        throw CalibrationError(err.str(), ceiling_db);
    }
    if (target_snr_db < 3.0) {
        std::ostringstream err;
        err << "target SNR " << target_snr_db << " dB below the measurable range (3 dB)";
        throw CalibrationError(err.str(), ceiling_db);
    }

    // Analytic starting point: delay-domain noise power per bin relative to the
    // weakest peak, inverted through the processing gain.
    double a_min = 1e300;
    for (size_t k = 1; k <= cable.n_repeaters(); ++k)
        a_min = std::min(a_min, std::pow(10.0, cable.roundtrip_amplitude_db(k) / 20.0));
    const double n_samples = static_cast<double>(cfg.samples_per_sweep());
    const size_t w_pol = std::max<size_t>(
        1, static_cast<size_t>(std::llround(averaging_s / cfg.sweep_period_s / 2.0)));
    const double target_lin = std::pow(10.0, target_snr_db / 10.0);
    // Median-floor SNR ~ N a^2 W / (4 ln2 sigma^2); solve for sigma^2.
    double sigma2 =
        n_samples * a_min * a_min * static_cast<double>(w_pol) / (4.0 * 0.6931 * target_lin);
    double density = 2.0 * sigma2 / cfg.sample_rate_hz / static_cast<double>(cable.n_repeaters());

    // Newton-style correction on the log scale, then bisection as a fallback.
    double lo = 0.0, hi = 0.0;  // bracket in density
    for (int iter = 0; iter < 12; ++iter) {
        const double snr = measure_snr_db(cable, laser, cfg, density, averaging_s, seed);
        if (std::abs(snr - target_snr_db) <= tol_db) return density;
        if (snr > target_snr_db) {
            lo = std::max(lo, density);  // too quiet, more noise needed
        } else {
            hi = (hi == 0.0) ? density : std::min(hi, density);
        }
        if (lo > 0.0 && hi > 0.0) {
            density = std::sqrt(lo * hi);  // geometric bisection
        } else {
            density *= std::pow(10.0, (snr - target_snr_db) / 10.0);
        }
    }
    const double achieved = measure_snr_db(cable, laser, cfg, density, averaging_s, seed);
    if (std::abs(achieved - target_snr_db) <= tol_db) return density;
    std::ostringstream err;
    err << "calibration did not converge; achieved " << achieved << " dB at density " << density;
    throw CalibrationError(err.str(), achieved);
}

}  // namespace ofdr
