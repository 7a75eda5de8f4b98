#pragma once

#include <span>
#include <vector>

#include "types.hpp"

namespace ofdr {

enum class Detrend : uint8_t { None, Mean, Linear };

struct WelchOptions {
    size_t n_segments = 8;
    double overlap = 0.5;
    Detrend detrend = Detrend::Linear;
};

struct WelchResult {
    std::vector<double> freq_hz;  // k = 0 .. L/2
    std::vector<double> psd;      // one-sided
    size_t segment_len = 0;
    size_t segments_used = 0;
    double resolution_hz = 0.0;
    double parseval_ratio = 0.0;  // mean segment variance / PSD integral
};

// Welch PSD estimate with Hann window. Throws if the series is shorter than
// one segment.
WelchResult welch_psd(std::span<const double> x, double fs, const WelchOptions& opt = {});

// Variant with explicit segment length instead of a segment count.
WelchResult welch_psd_seglen(std::span<const double> x, double fs, size_t seg_len,
                             double overlap, Detrend detrend);

}  // namespace ofdr
