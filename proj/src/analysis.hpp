#pragma once

#include <span>
#include <string>
#include <vector>

#include "phase.hpp"
#include "welch.hpp"

namespace ofdr {

struct PsdReport {
    uint32_t repeater = 0;
    std::vector<double> freq_hz;
    std::vector<double> s_phi;  // rad^2/Hz
    std::vector<double> s_nu;   // Hz^2/Hz, f^2 * s_phi
    double parseval_ratio = 0.0;
    size_t segment_count = 0;
    double resolution_hz = 0.0;
};

// Welch estimate of the phase PSD with S_nu = f^2 * S_phi. Series with unwrap
// resets are split at the resets and the estimates averaged.
PsdReport frequency_noise_psd(const PhaseSeries& series, const WelchOptions& opt = {});
PsdReport frequency_noise_psd_raw(std::span<const double> phi, double fs,
                                  const WelchOptions& opt = {});

struct SpectrogramGrid {
    uint32_t repeater = 0;
    std::vector<double> time_s;    // segment centers
    std::vector<double> freq_hz;   // bins above DC
    std::vector<std::vector<double>> power_db;  // [time][freq]
    size_t window_len = 0;
    double overlap = 0.0;
    double band_lo_hz = 0.1;
    double band_hi_hz = 10.0;
};

// Short-time PSD on linearly detrended Hann-windowed segments, power in dB.
SpectrogramGrid spectrogram(const PhaseSeries& series, size_t window_len, double overlap,
                            double band_lo_hz = 0.1, double band_hi_hz = 10.0);

struct BandPower {
    double power = 0.0;   // integrated PSD over the band
    double total = 0.0;   // integrated PSD over the full band
    double rel_db = 0.0;  // 10*log10(power/total), clamped at -999
};

// Integrated PSD over [f_lo, f_hi]; throws if the band exceeds Nyquist.
BandPower band_power(std::span<const double> series, double fs, double f_lo, double f_hi,
                     const WelchOptions& opt = {});

struct MovementReport {
    // Per-span differential movement in ns: diff[k] = d_{k+1} - d_k series
    // (diff[0] is repeater 1 against the launch point), mean-removed.
    std::vector<std::vector<double>> differential_ns;
    std::vector<std::vector<double>> correlation;  // K x K Pearson of repeater series
    std::vector<std::pair<uint32_t, uint32_t>> flagged_pairs;  // 1-based repeater indices
    double flag_threshold = -0.8;
};

// Differential span movement and pairwise correlation of repeater delay
// series; adjacent pairs with correlation below the threshold are flagged as
// stretch/contraction candidates. Requires >= 32 aligned samples.
MovementReport span_movement_report(const std::vector<std::vector<double>>& delay_series_ns,
                                    double flag_threshold = -0.8);

// CSV helpers shared by the pipeline products. Columns must be equal length.
void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const std::vector<const std::vector<double>*>& columns);

}  // namespace ofdr
