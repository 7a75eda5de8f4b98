#pragma once

#include <span>
#include <vector>

#include "observation.hpp"

namespace ofdr {

enum class PhaseConvention : uint8_t {
    LargestElement,  // phase of the dominant Jones element (chosen at reference time)
    DetHalf,         // arg(det J)/2, invariant under polarization rotation
};

// Unwrapped phase of one repeater over time, referenced to the first accepted
// sweep. reset[i] marks an unwrap restart caused by a gap in the series.
struct PhaseSeries {
    uint32_t repeater = 0;
    double fs_hz = 0.0;  // 1/(2T) for paired series, 1/T for column series
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<uint8_t> reset;
};

// Wrap to (-pi, pi].
double wrap_phase(double x);

// Unwrap in place given per-sample wrapped phases; returns reset markers
// honoring the provided gap flags.
std::vector<double> unwrap(std::span<const double> wrapped, std::span<const uint8_t> gap,
                           std::vector<uint8_t>* resets_out = nullptr);

// Build the unwrapped series for one repeater from its observation records
// (sorted by sweep index). Missing-flagged records are skipped; gaps trigger an
// unwrap reset with a marked discontinuity.
PhaseSeries phase_series(std::span<const RepeaterObservation> obs,
                         PhaseConvention conv = PhaseConvention::LargestElement);

// Group a mixed observation stream by repeater (1-based, contiguous).
std::vector<std::vector<RepeaterObservation>> split_by_repeater(
    std::span<const RepeaterObservation> obs);

// Differential series: out[0] = series[0] (first span vs the launch point),
// out[k] = series[k] - series[k-1]. Series must share timestamps.
std::vector<PhaseSeries> differential_phase(std::span<const PhaseSeries> series);

}  // namespace ofdr
