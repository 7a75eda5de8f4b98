#include "welch.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"

namespace ofdr {

namespace {

void detrend_segment(std::vector<double>& seg, Detrend mode) {
    const size_t n = seg.size();
    if (n == 0 || mode == Detrend::None) return;
    if (mode == Detrend::Mean) {
        double mean = 0.0;
        for (double v : seg) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : seg) v -= mean;
        return;
    }
    // Least-squares line removal.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += seg[i];
        sxx += x * x;
        sxy += x * seg[i];
    }
    const double d = static_cast<double>(n) * sxx - sx * sx;
    const double slope = d != 0 ? (static_cast<double>(n) * sxy - sx * sy) / d : 0.0;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) seg[i] -= intercept + slope * static_cast<double>(i);
}

}  // namespace

WelchResult welch_psd_seglen(std::span<const double> x, double fs, size_t seg_len,
                             double overlap, Detrend detrend) {
    if (seg_len < 4) throw ConfigError("welch_psd: segment length too short");
    if (x.size() < seg_len) throw ConfigError("welch_psd: series shorter than one segment");
    const size_t step =
        std::max<size_t>(1, static_cast<size_t>(std::lround(
                                static_cast<double>(seg_len) * (1.0 - overlap))));

    std::vector<double> window(seg_len);
    double u = 0.0;
    for (size_t i = 0; i < seg_len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) /
                                          static_cast<double>(seg_len - 1)));
        u += window[i] * window[i];
    }

    WelchResult r;
    r.segment_len = seg_len;
    r.resolution_hz = fs / static_cast<double>(seg_len);
    const size_t n_bins = seg_len / 2 + 1;
    r.freq_hz.resize(n_bins);
    for (size_t k = 0; k < n_bins; ++k)
        r.freq_hz[k] = static_cast<double>(k) * fs / static_cast<double>(seg_len);
    r.psd.assign(n_bins, 0.0);

    std::vector<double> seg(seg_len);
    std::vector<cplx> spec(seg_len);
    double var_sum = 0.0;
    size_t used = 0;
    for (size_t start = 0; start + seg_len <= x.size(); start += step) {
        std::copy(x.begin() + static_cast<ptrdiff_t>(start),
                  x.begin() + static_cast<ptrdiff_t>(start + seg_len), seg.begin());
        detrend_segment(seg, detrend);
        double var = 0.0;
        for (double v : seg) var += v * v;
        var_sum += var / static_cast<double>(seg_len);
        for (size_t i = 0; i < seg_len; ++i) spec[i] = cplx{seg[i] * window[i], 0.0};
        fft_forward(spec);
        for (size_t k = 0; k < n_bins; ++k) {
            const double scale = (k == 0 || (seg_len % 2 == 0 && k == seg_len / 2)) ? 1.0 : 2.0;
            r.psd[k] += scale * std::norm(spec[k]) / (fs * u);
        }
        ++used;
    }
    if (used == 0) throw ConfigError("welch_psd: no complete segments");
    for (double& p : r.psd) p /= static_cast<double>(used);
    r.segments_used = used;

    double integral = 0.0;
    for (size_t k = 0; k < n_bins; ++k) integral += r.psd[k] * r.resolution_hz;
    const double mean_var = var_sum / static_cast<double>(used);
    r.parseval_ratio = integral > 0 ? mean_var / integral : 0.0;
    return r;
}

WelchResult welch_psd(std::span<const double> x, double fs, const WelchOptions& opt) {
    const double denom = 1.0 + (static_cast<double>(opt.n_segments) - 1.0) * (1.0 - opt.overlap);
    const size_t seg_len = static_cast<size_t>(std::floor(static_cast<double>(x.size()) / denom));
    return welch_psd_seglen(x, fs, seg_len, opt.overlap, opt.detrend);
}

}  // namespace ofdr
