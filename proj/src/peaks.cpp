#include "peaks.hpp"

#include <algorithm>
#include <cmath>

namespace ofdr {

namespace {

double median_of(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<ptrdiff_t>(mid), v.end());
    return v[mid];
}

// Median power over bins away from the given peak bins.
double noise_floor(const ImpulseResponse& ir, std::span<const size_t> peak_bins,
                   size_t guard_bins, size_t* clean_count = nullptr) {
    const size_t n = ir.size();
    std::vector<double> noise;
    noise.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        bool near_peak = false;
        for (size_t b : peak_bins) {
            const size_t d = (i > b) ? i - b : b - i;
            const size_t dw = std::min(d, n - d);  // circular distance
            if (dw <= guard_bins) {
                near_peak = true;
                break;
            }
        }
        if (!near_peak) noise.push_back(ir.power(i));
    }
    if (clean_count) *clean_count = noise.size();
    return median_of(noise);
}

}  // namespace

std::vector<PeakInfo> detect_peaks(const ImpulseResponse& ir,
                                   std::optional<std::span<const double>> expected_delays,
                                   double threshold_db, const SweepConfig& cfg) {
    const size_t n = ir.size();
    if (n == 0) return {};
    const double fs = cfg.sample_rate_hz;
    const size_t res_bins = std::max<size_t>(
        1, static_cast<size_t>(std::lround(fs / cfg.sweep_bandwidth_hz)));
    const double thresh_lin = std::pow(10.0, threshold_db / 10.0);

    std::vector<PeakInfo> peaks;

    if (expected_delays.has_value()) {
        // Monitoring mode: look near each programmed delay.
        std::vector<size_t> expected_bins;
        expected_bins.reserve(expected_delays->size());
        for (double d : *expected_delays)
            expected_bins.push_back(static_cast<size_t>(std::llround(d * fs)) % n);
        const double floor = noise_floor(ir, expected_bins, 5 * res_bins);

        for (size_t j = 0; j < expected_bins.size(); ++j) {
            const size_t center = expected_bins[j];
            size_t best = center;
            double best_p = -1.0;
            for (long off = -3; off <= 3; ++off) {
                const size_t b = static_cast<size_t>(
                    (static_cast<long>(center) + off + static_cast<long>(n)) %
                    static_cast<long>(n));
                const double p = ir.power(b);
                if (p > best_p) {
                    best_p = p;
                    best = b;
                }
            }
            PeakInfo pk;
            pk.repeater = j + 1;
            pk.bin = best;
            pk.vx = ir.ch_x[best];
            pk.vy = ir.ch_y[best];
            pk.quality_db = floor > 0 ? 10.0 * std::log10(best_p / floor) : 99.0;
            pk.missing = floor > 0 && best_p < floor * thresh_lin;
            pk.delay_s = pk.missing || best == 0 || best + 1 >= n
                             ? static_cast<double>(best) * ir.bin_spacing_s
                             : estimate_delay_subsample(ir, best);
            peaks.push_back(pk);
        }
        return peaks;
    }

    // Acquisition mode: threshold over the noise floor with non-maximum
    // suppression one resolution cell wide. The median is rescaled to the
    // exponential mean so threshold_db reads as dB over the mean noise power.
    std::vector<double> pow_all(n);
    for (size_t i = 0; i < n; ++i) pow_all[i] = ir.power(i);
    std::vector<double> tmp = pow_all;
    const double floor = median_of(tmp) / 0.6931;
    if (floor <= 0) return {};

    std::vector<size_t> candidates;
    for (size_t i = 0; i < n; ++i) {
        if (pow_all[i] < floor * thresh_lin) continue;
        bool local_max = true;
        for (size_t d = 1; d <= res_bins && local_max; ++d) {
            if (pow_all[(i + d) % n] > pow_all[i] || pow_all[(i + n - d) % n] > pow_all[i])
                local_max = false;
        }
        if (local_max) candidates.push_back(i);
    }
    // Suppress shoulders: keep strongest within each resolution cell.
    std::sort(candidates.begin(), candidates.end(),
              [&](size_t a, size_t b) { return pow_all[a] > pow_all[b]; });
    std::vector<size_t> kept;
    for (size_t c : candidates) {
        bool close = false;
        for (size_t k : kept) {
            const size_t d = (c > k) ? c - k : k - c;
            if (std::min(d, n - d) < res_bins) {
                close = true;
                break;
            }
        }
        if (!close) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end());
    for (size_t j = 0; j < kept.size(); ++j) {
        PeakInfo pk;
        pk.repeater = j + 1;
        pk.bin = kept[j];
        pk.vx = ir.ch_x[kept[j]];
        pk.vy = ir.ch_y[kept[j]];
        pk.quality_db = 10.0 * std::log10(pow_all[kept[j]] / floor);
        pk.delay_s = (kept[j] > 0 && kept[j] + 1 < n)
                         ? estimate_delay_subsample(ir, kept[j])
                         : static_cast<double>(kept[j]) * ir.bin_spacing_s;
        peaks.push_back(pk);
    }
    return peaks;
}

double estimate_delay_subsample(const ImpulseResponse& ir, size_t bin) {
    const size_t n = ir.size();
    if (bin == 0 || bin + 1 >= n)
        throw ConfigError("estimate_delay_subsample: peak bin on array edge");
    const double a = std::sqrt(ir.power(bin - 1));
    const double b = std::sqrt(ir.power(bin));
    const double c = std::sqrt(ir.power(bin + 1));
    const double denom = a - 2.0 * b + c;
    double offset = 0.0;
    if (std::abs(denom) > 1e-300) offset = 0.5 * (a - c) / denom;
    offset = std::clamp(offset, -0.5, 0.5);
    return (static_cast<double>(bin) + offset) * ir.bin_spacing_s;
}

ImpulseResponse coherent_average(std::span<const ImpulseResponse> irs, size_t w) {
    if (irs.empty()) throw ConfigError("coherent_average: empty input");
    const size_t count = (w == 0) ? irs.size() : std::min(w, irs.size());
    const LaunchPol pol = irs[0].launch_pol;
    const size_t n = irs[0].size();
    ImpulseResponse avg;
    avg.sweep_index = irs[0].sweep_index;
    avg.launch_pol = pol;
    avg.t0 = irs[0].t0;
    avg.bin_spacing_s = irs[0].bin_spacing_s;
    avg.code_scale = irs[0].code_scale;
    avg.ch_x.assign(n, cplx{});
    avg.ch_y.assign(n, cplx{});
    for (size_t j = 0; j < count; ++j) {
        const auto& ir = irs[j];
        if (ir.launch_pol != pol)
            throw ConfigError("coherent_average: mixed launch polarizations in input");
        if (ir.size() != n) throw ConfigError("coherent_average: length mismatch");
        for (size_t i = 0; i < n; ++i) {
            avg.ch_x[i] += ir.ch_x[i];
            avg.ch_y[i] += ir.ch_y[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (size_t i = 0; i < n; ++i) {
        avg.ch_x[i] *= inv;
        avg.ch_y[i] *= inv;
    }
    return avg;
}

ImpulseResponse power_average(std::span<const ImpulseResponse> irs, size_t w) {
    if (irs.empty()) throw ConfigError("power_average: empty input");
    const size_t count = (w == 0) ? irs.size() : std::min(w, irs.size());
    const LaunchPol pol = irs[0].launch_pol;
    const size_t n = irs[0].size();
    std::vector<double> px(n, 0.0), py(n, 0.0);
    for (size_t j = 0; j < count; ++j) {
        const auto& ir = irs[j];
        if (ir.launch_pol != pol)
            throw ConfigError("power_average: mixed launch polarizations in input");
        if (ir.size() != n) throw ConfigError("power_average: length mismatch");
        for (size_t i = 0; i < n; ++i) {
            px[i] += std::norm(ir.ch_x[i]);
            py[i] += std::norm(ir.ch_y[i]);
        }
    }
    ImpulseResponse avg;
    avg.sweep_index = irs[0].sweep_index;
    avg.launch_pol = pol;
    avg.t0 = irs[0].t0;
    avg.bin_spacing_s = irs[0].bin_spacing_s;
    avg.code_scale = irs[0].code_scale;
    avg.ch_x.resize(n);
    avg.ch_y.resize(n);
    const double inv = 1.0 / static_cast<double>(count);
    for (size_t i = 0; i < n; ++i) {
        avg.ch_x[i] = cplx{std::sqrt(px[i] * inv), 0.0};
        avg.ch_y[i] = cplx{std::sqrt(py[i] * inv), 0.0};
    }
    return avg;
}

std::vector<SnrEstimate> estimate_snr(const ImpulseResponse& ir,
                                      std::span<const PeakInfo> peaks, const SweepConfig& cfg) {
    const size_t res_bins = std::max<size_t>(
        1, static_cast<size_t>(std::lround(cfg.sample_rate_hz / cfg.sweep_bandwidth_hz)));
    std::vector<size_t> peak_bins;
    peak_bins.reserve(peaks.size());
    for (const auto& p : peaks) peak_bins.push_back(p.bin);
    size_t clean = 0;
    const double floor = noise_floor(ir, peak_bins, 5 * res_bins, &clean);

    std::vector<SnrEstimate> out;
    out.reserve(peaks.size());
    for (const auto& p : peaks) {
        SnrEstimate e;
        e.repeater = p.repeater;
        e.low_confidence = clean < 100;
        const double ppow = ir.power(p.bin);
        if (floor <= 0.0) {
            e.snr_db = 99.0;
            e.clamped = true;
            e.noise_floor_db = -999.0;
        } else {
            e.snr_db = std::min(10.0 * std::log10(ppow / floor), 99.0);
            e.clamped = e.snr_db >= 99.0;
            e.noise_floor_db = 10.0 * std::log10(floor);
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace ofdr
