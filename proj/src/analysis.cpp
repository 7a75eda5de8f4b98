#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fft.hpp"

namespace ofdr {

PsdReport frequency_noise_psd_raw(std::span<const double> phi, double fs,
                                  const WelchOptions& opt) {
    const WelchResult w = welch_psd(phi, fs, opt);
    PsdReport r;
    r.freq_hz = w.freq_hz;
    r.s_phi = w.psd;
    r.s_nu.resize(w.psd.size());
    for (size_t k = 0; k < w.psd.size(); ++k)
        r.s_nu[k] = w.freq_hz[k] * w.freq_hz[k] * w.psd[k];
    r.parseval_ratio = w.parseval_ratio;
    r.segment_count = w.segments_used;
    r.resolution_hz = w.resolution_hz;
    return r;
}

PsdReport frequency_noise_psd(const PhaseSeries& series, const WelchOptions& opt) {
    // Split at unwrap resets and average the per-run estimates.
    std::vector<std::pair<size_t, size_t>> runs;
    size_t start = 0;
    for (size_t i = 1; i < series.phi.size(); ++i) {
        if (i < series.reset.size() && series.reset[i]) {
            runs.emplace_back(start, i);
            start = i;
        }
    }
    runs.emplace_back(start, series.phi.size());

    PsdReport total;
    size_t used = 0;
    for (auto [lo, hi] : runs) {
        if (hi - lo < 8) continue;
        PsdReport r = frequency_noise_psd_raw(
            std::span<const double>(series.phi).subspan(lo, hi - lo), series.fs_hz, opt);
        if (total.freq_hz.empty()) {
            total = r;
            used = 1;
        } else if (r.freq_hz.size() == total.freq_hz.size()) {
            for (size_t k = 0; k < r.s_phi.size(); ++k) {
                total.s_phi[k] += r.s_phi[k];
                total.s_nu[k] += r.s_nu[k];
            }
            total.segment_count += r.segment_count;
            ++used;
        }
    }
    if (used == 0) throw ConfigError("frequency_noise_psd: series too short");
    if (used > 1) {
        for (size_t k = 0; k < total.s_phi.size(); ++k) {
            total.s_phi[k] /= static_cast<double>(used);
            total.s_nu[k] /= static_cast<double>(used);
        }
    }
    total.repeater = series.repeater;
    return total;
}

SpectrogramGrid spectrogram(const PhaseSeries& series, size_t window_len, double overlap,
                            double band_lo_hz, double band_hi_hz) {
    const auto& x = series.phi;
    const double fs = series.fs_hz;
    if (x.size() < window_len) throw ConfigError("spectrogram: series shorter than one window");

    SpectrogramGrid g;
    g.repeater = series.repeater;
    g.window_len = window_len;
    g.overlap = overlap;
    g.band_lo_hz = band_lo_hz;
    g.band_hi_hz = band_hi_hz;

    const size_t n_bins = window_len / 2 + 1;
    g.freq_hz.reserve(n_bins - 1);
    for (size_t k = 1; k < n_bins; ++k)
        g.freq_hz.push_back(static_cast<double>(k) * fs / static_cast<double>(window_len));

    const size_t step = std::max<size_t>(
        1, static_cast<size_t>(std::lround(static_cast<double>(window_len) * (1.0 - overlap))));

    for (size_t startidx = 0; startidx + window_len <= x.size(); startidx += step) {
        const auto w = welch_psd_seglen(
            std::span<const double>(x).subspan(startidx, window_len), fs, window_len, 0.0,
            Detrend::Linear);
        std::vector<double> row(n_bins - 1);
        for (size_t k = 1; k < n_bins; ++k)
            row[k - 1] = w.psd[k] > 0 ? 10.0 * std::log10(w.psd[k]) : -999.0;
        g.power_db.push_back(std::move(row));
        const double t0 = series.t.empty() ? 0.0 : series.t[0];
        g.time_s.push_back(t0 + (static_cast<double>(startidx) +
                                 static_cast<double>(window_len) / 2.0) /
                                    fs);
    }
    return g;
}

BandPower band_power(std::span<const double> series, double fs, double f_lo, double f_hi,
                     const WelchOptions& opt) {
    if (f_lo > f_hi) throw ConfigError("band_power: f_lo must be <= f_hi");
    if (f_hi > fs / 2.0 + 1e-9) throw ConfigError("band_power: band exceeds Nyquist");
    const WelchResult w = welch_psd(series, fs, opt);
    BandPower bp;
    for (size_t k = 0; k < w.freq_hz.size(); ++k) {
        const double p = w.psd[k] * w.resolution_hz;
        bp.total += p;
        if (w.freq_hz[k] >= f_lo && w.freq_hz[k] <= f_hi) bp.power += p;
    }
    bp.rel_db = (bp.power > 0 && bp.total > 0) ? 10.0 * std::log10(bp.power / bp.total) : -999.0;
    return bp;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = std::min(a.size(), b.size());
    double ma = 0, mb = 0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    const double denom = std::sqrt(saa * sbb);
    return denom > 0 ? sab / denom : 0.0;
}

}  // namespace

MovementReport span_movement_report(const std::vector<std::vector<double>>& delay_series_ns,
                                    double flag_threshold) {
    const size_t k_count = delay_series_ns.size();
    if (k_count == 0) throw ConfigError("span_movement_report: no series");
    size_t n = delay_series_ns[0].size();
    for (const auto& s : delay_series_ns) n = std::min(n, s.size());
    if (n < 32) throw ConfigError("span_movement_report: fewer than 32 samples");

    MovementReport r;
    r.flag_threshold = flag_threshold;
    r.differential_ns.resize(k_count);
    for (size_t k = 0; k < k_count; ++k) {
        auto& d = r.differential_ns[k];
        d.resize(n);
        double mean = 0.0;
        for (size_t i = 0; i < n; ++i) {
            d[i] = (k == 0) ? delay_series_ns[0][i]
                            : delay_series_ns[k][i] - delay_series_ns[k - 1][i];
            mean += d[i];
        }
        mean /= static_cast<double>(n);
        for (auto& v : d) v -= mean;
    }

    r.correlation.assign(k_count, std::vector<double>(k_count, 1.0));
    for (size_t a = 0; a < k_count; ++a) {
        for (size_t b = a + 1; b < k_count; ++b) {
            const double c = pearson(delay_series_ns[a], delay_series_ns[b]);
            r.correlation[a][b] = c;
            r.correlation[b][a] = c;
        }
    }
    for (size_t a = 0; a + 1 < k_count; ++a) {
        if (r.correlation[a][a + 1] < flag_threshold)
            r.flagged_pairs.emplace_back(static_cast<uint32_t>(a + 1),
                                         static_cast<uint32_t>(a + 2));
    }
    return r;
}

void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const std::vector<const std::vector<double>*>& columns) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    for (size_t c = 0; c < headers.size(); ++c) {
        if (c) f << ',';
        f << headers[c];
    }
    f << '\n';
    size_t rows = 0;
    for (const auto* col : columns) rows = std::max(rows, col->size());
    char buf[40];
    for (size_t i = 0; i < rows; ++i) {
        for (size_t c = 0; c < columns.size(); ++c) {
            if (c) f << ',';
            if (i < columns[c]->size()) {
                std::snprintf(buf, sizeof(buf), "%.12g", (*columns[c])[i]);
                f << buf;
            }
        }
        f << '\n';
    }
}

}  // namespace ofdr
