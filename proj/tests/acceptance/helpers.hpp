#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "matched_filter.hpp"
#include "observation.hpp"
#include "peaks.hpp"
#include "phase.hpp"
#include "pipeline.hpp"
#include "propagate.hpp"
#include "scenario.hpp"
#include "tracker.hpp"

namespace acceptance {

struct Result {
    bool pass = true;
    std::string detail;
};

struct Check {
    Result& r;
    // Records the worst failure but keeps running so the printed detail is
    // complete for the criterion.
    void require(bool ok, const std::string& what) {
        if (!ok) {
            r.pass = false;
            if (!r.detail.empty()) r.detail += "; ";
            r.detail += what;
        }
    }
    void note(const std::string& what) {
        if (!r.detail.empty()) r.detail += "; ";
        r.detail += what;
    }
};

inline std::string fmt(double v, int prec = 2) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

// Quadrature amplitude of a tone at f_hz (mean removed).
inline double tone_amplitude(const std::vector<double>& x, double fs, double f_hz) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    ofdr::cplx acc{};
    for (size_t i = 0; i < x.size(); ++i) {
        const double ang = ofdr::kTwoPi * f_hz * static_cast<double>(i) / fs;
        acc += (x[i] - mean) * ofdr::cplx{std::cos(ang), -std::sin(ang)};
    }
    return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    return var / static_cast<double>(x.size());
}

// Full receive chain on a scenario with a fixed noise density: returns all
// observation records in sweep order.
inline std::vector<ofdr::RepeaterObservation> run_chain(const ofdr::Scenario& s) {
    ofdr::Pipeline pipe(s);
    ofdr::Propagator prop(
        [&] {
            auto cable = s.cable();
            for (auto& r : cable.repeaters) r.ase_noise_density = s.noise().ase_density;
            return cable;
        }(),
        s.laser(), s.sweep(), s.run().seed, s.run().sweeps,
        s.noise().extra_broadband_density);
    size_t next = 0;
    return pipe.process_captures([&]() -> std::optional<ofdr::SweepCapture> {
        if (next >= s.run().sweeps) return std::nullopt;
        return prop.simulate_sweep(next++);
    });
}

// Criterion registry.
Result criterion_01_snr_anchor();
Result criterion_02_averaging_law();
Result criterion_03_differential_isolation();
Result criterion_04_noise_growth();
Result criterion_05_laser_comparison();
Result criterion_06_delay_tracking();
Result criterion_07_matched_filter_oracle();
Result criterion_08_probe_invariants();
Result criterion_09_wire_protocol();
Result criterion_10_determinism();

}  // namespace acceptance
