#include "phase.hpp"

#include <algorithm>
#include <cmath>

namespace ofdr {

double wrap_phase(double x) {
    x = std::fmod(x + kPi, kTwoPi);
    if (x <= 0) x += kTwoPi;
    return x - kPi;
}

std::vector<double> unwrap(std::span<const double> wrapped, std::span<const uint8_t> gap,
                           std::vector<uint8_t>* resets_out) {
    std::vector<double> out(wrapped.size());
    if (resets_out) resets_out->assign(wrapped.size(), 0);
    double acc = 0.0;
    for (size_t i = 0; i < wrapped.size(); ++i) {
        if (i == 0 || (!gap.empty() && gap[i])) {
            // Restart the accumulator; the discontinuity is marked, not hidden.
            acc = wrapped[i];
            if (resets_out && i > 0) (*resets_out)[i] = 1;
        } else {
            acc += wrap_phase(wrapped[i] - wrapped[i - 1]);
        }
        out[i] = acc;
    }
    return out;
}

namespace {

// Dominant element index (0..3) of a Jones matrix, row-major.
size_t dominant_element(const Jones& j) {
    const double m[4] = {std::abs(j.xx), std::abs(j.xy), std::abs(j.yx), std::abs(j.yy)};
    return static_cast<size_t>(std::max_element(m, m + 4) - m);
}

cplx element(const Jones& j, size_t idx) {
    switch (idx) {
        case 0: return j.xx;
        case 1: return j.xy;
        case 2: return j.yx;
        default: return j.yy;
    }
}

}  // namespace

PhaseSeries phase_series(std::span<const RepeaterObservation> obs, PhaseConvention conv) {
    PhaseSeries s;
    if (obs.empty()) return s;
    s.repeater = obs[0].repeater;

    std::vector<double> wrapped;
    std::vector<uint8_t> gap;
    wrapped.reserve(obs.size());
    gap.reserve(obs.size());

    size_t sel = 4;  // dominant element, fixed at the first accepted record
    for (const auto& o : obs) {
        if (o.flags & kObsMissing) continue;
        double ph;
        if (o.flags & kObsColumnOnly) {
            // Alternating launches populate alternating columns; the dominant
            // element of each record lives in whichever column is present.
            // (det(J) is degenerate for a single column, so the element
            // convention applies here regardless.)
            ph = std::arg(element(o.jones, dominant_element(o.jones)));
        } else if (conv == PhaseConvention::DetHalf) {
            const cplx det = o.jones.xx * o.jones.yy - o.jones.xy * o.jones.yx;
            ph = 0.5 * std::arg(det);
        } else {
            if (sel == 4) sel = dominant_element(o.jones);
            ph = std::arg(element(o.jones, sel));
        }
        wrapped.push_back(ph);
        gap.push_back((o.flags & kObsGapBefore) ? 1 : 0);
        s.t.push_back(o.timestamp_s);
    }
    if (wrapped.empty()) return s;
    s.phi = unwrap(wrapped, gap, &s.reset);
    // Reference to the first accepted sweep.
    const double ref = s.phi[0];
    for (auto& p : s.phi) p -= ref;
    if (s.t.size() >= 2) s.fs_hz = 1.0 / (s.t[1] - s.t[0]);
    return s;
}

std::vector<std::vector<RepeaterObservation>> split_by_repeater(
    std::span<const RepeaterObservation> obs) {
    uint32_t max_rep = 0;
    for (const auto& o : obs) max_rep = std::max(max_rep, o.repeater);
    std::vector<std::vector<RepeaterObservation>> out(max_rep);
    for (const auto& o : obs) {
        if (o.repeater >= 1) out[o.repeater - 1].push_back(o);
    }
    return out;
}

std::vector<PhaseSeries> differential_phase(std::span<const PhaseSeries> series) {
    std::vector<PhaseSeries> out;
    out.reserve(series.size());
    for (size_t k = 0; k < series.size(); ++k) {
        PhaseSeries d;
        d.repeater = series[k].repeater;
        d.fs_hz = series[k].fs_hz;
        if (k == 0) {
            d.t = series[0].t;
            d.phi = series[0].phi;
            d.reset = series[0].reset;
        } else {
            // Align by timestamp intersection; skipped records (e.g. missing
            // flags during warmup) leave a marked discontinuity.
            const auto& a = series[k];
            const auto& b = series[k - 1];
            size_t ia = 0, ib = 0;
            bool skipped = false;
            while (ia < a.t.size() && ib < b.t.size()) {
                if (std::abs(a.t[ia] - b.t[ib]) < 1e-12) {
                    d.t.push_back(a.t[ia]);
                    d.phi.push_back(a.phi[ia] - b.phi[ib]);
                    d.reset.push_back(
                        static_cast<uint8_t>(a.reset[ia] | b.reset[ib] | (skipped ? 1 : 0)));
                    skipped = false;
                    ++ia;
                    ++ib;
                } else if (a.t[ia] < b.t[ib]) {
                    ++ia;
                    skipped = true;
                } else {
                    ++ib;
                    skipped = true;
                }
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace ofdr
