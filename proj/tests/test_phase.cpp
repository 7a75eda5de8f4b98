#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phase.hpp"

using namespace ofdr;

namespace {

RepeaterObservation make_obs(uint32_t k, uint64_t sweep, double t, double phase,
                             uint32_t flags = 0) {
    RepeaterObservation o;
    o.repeater = k;
    o.sweep_index = sweep;
    o.timestamp_s = t;
    o.jones.xx = std::polar(1.0, phase);
    o.jones.yy = std::polar(0.5, phase * 0.5);
    o.flags = flags;
    return o;
}

}  // namespace

TEST_CASE("unwrap reproduces ramps with sub-pi steps to 1e-9") {
    const size_t n = 4000;
    std::vector<double> truth(n), wrapped(n);
    for (size_t i = 0; i < n; ++i) {
        // Ramp plus wiggle, increments always below pi.
        truth[i] = 0.9 * kPi * static_cast<double>(i) * 0.9 +
                   1.2 * std::sin(0.01 * static_cast<double>(i));
        wrapped[i] = wrap_phase(truth[i]);
    }
    const auto un = unwrap(wrapped, {});
    for (size_t i = 0; i < n; ++i) {
        CHECK(std::abs((un[i] - un[0]) - (truth[i] - truth[0])) < 1e-9);
    }
}

TEST_CASE("phase series: reference to first sweep and missing-skip") {
    std::vector<RepeaterObservation> obs;
    for (size_t m = 0; m < 64; ++m) {
        const double phase = 0.3 + 0.4 * std::sin(0.2 * static_cast<double>(m));
        obs.push_back(make_obs(1, m, 1e-3 * static_cast<double>(m), phase,
                               m == 10 ? kObsMissing : 0));
    }
    const auto s = phase_series(obs);
    CHECK(s.repeater == 1);
    CHECK(s.t.size() == 63);  // missing record skipped
    CHECK(s.phi[0] == 0.0);   // referenced to first accepted sweep
    CHECK(s.fs_hz == doctest::Approx(1000.0));
    // Values track the injected modulation.
    const double want = 0.4 * (std::sin(0.2 * 5.0) - std::sin(0.0));
    CHECK(s.phi[5] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("gap flag resets the unwrap with a marked discontinuity") {
    std::vector<RepeaterObservation> obs;
    for (size_t m = 0; m < 10; ++m)
        obs.push_back(make_obs(1, m, 1e-3 * static_cast<double>(m),
                               0.2 * static_cast<double>(m),
                               m == 5 ? kObsGapBefore : 0));
    const auto s = phase_series(obs);
    REQUIRE(s.reset.size() == 10);
    CHECK(s.reset[5] == 1);
    size_t resets = 0;
    for (auto r : s.reset) resets += r;
    CHECK(resets == 1);
}

TEST_CASE("det-half convention is invariant under polarization rotation") {
    std::vector<RepeaterObservation> a, b;
    for (size_t m = 0; m < 32; ++m) {
        const double phase = 0.05 * static_cast<double>(m);
        RepeaterObservation o;
        o.repeater = 1;
        o.sweep_index = m;
        o.timestamp_s = 1e-3 * static_cast<double>(m);
        const Jones base = Jones::identity() * std::polar(1.0, phase);
        o.jones = base;
        a.push_back(o);
        o.jones = Jones::rotation(0.3 + 0.02 * static_cast<double>(m)) * base;
        b.push_back(o);
    }
    const auto sa = phase_series(a, PhaseConvention::DetHalf);
    const auto sb = phase_series(b, PhaseConvention::DetHalf);
    for (size_t i = 0; i < sa.phi.size(); ++i)
        CHECK(sa.phi[i] == doctest::Approx(sb.phi[i]).epsilon(1e-9));
}

TEST_CASE("differential phase isolates the active span") {
    // Repeaters 1..4; a tone only on span 3's accumulated series (k >= 3).
    // 1500 samples at 1 kHz = three full cycles of the 2 Hz tone.
    std::vector<std::vector<RepeaterObservation>> groups(4);
    const size_t n = 1500;
    for (size_t m = 0; m < n; ++m) {
        const double t = 1e-3 * static_cast<double>(m);
        const double tone = 1.5 * std::sin(kTwoPi * 2.0 * t);
        for (uint32_t k = 1; k <= 4; ++k) {
            const double phase = (k >= 3 ? tone : 0.0) + 0.1 * static_cast<double>(k);
            groups[k - 1].push_back(make_obs(k, m, t, phase));
        }
    }
    std::vector<PhaseSeries> series;
    for (const auto& g : groups) series.push_back(phase_series(g));
    const auto diffs = differential_phase(series);
    REQUIRE(diffs.size() == 4);

    const double fs = 1000.0;
    CHECK(oracle::tone_amplitude(diffs[2].phi, fs, 2.0) == doctest::Approx(1.5).epsilon(0.01));
    CHECK(oracle::tone_amplitude(diffs[0].phi, fs, 2.0) < 0.01);
    CHECK(oracle::tone_amplitude(diffs[1].phi, fs, 2.0) < 0.01);
    CHECK(oracle::tone_amplitude(diffs[3].phi, fs, 2.0) < 0.01);
    // Integrated series carry it for k >= 3 only.
    CHECK(oracle::tone_amplitude(series[3].phi, fs, 2.0) == doctest::Approx(1.5).epsilon(0.01));
    CHECK(oracle::tone_amplitude(series[1].phi, fs, 2.0) < 0.01);
}

TEST_CASE("differential aligns by timestamp intersection and marks skips") {
    // Series 2 misses the record at t = 2 ms; the differential keeps the
    // matching instants and marks the discontinuity.
    std::vector<RepeaterObservation> a{make_obs(1, 0, 0e-3, 0.1), make_obs(1, 2, 2e-3, 0.2),
                                       make_obs(1, 4, 4e-3, 0.3)};
    std::vector<RepeaterObservation> b{make_obs(2, 0, 0e-3, 0.2), make_obs(2, 4, 4e-3, 0.5)};
    std::vector<PhaseSeries> series{phase_series(a), phase_series(b)};
    const auto diffs = differential_phase(series);
    REQUIRE(diffs[1].t.size() == 2);
    CHECK(diffs[1].t[0] == 0e-3);
    CHECK(diffs[1].t[1] == 4e-3);
    CHECK(diffs[1].phi[1] == doctest::Approx((0.5 - 0.2) - (0.3 - 0.1)).epsilon(1e-9));
    CHECK(diffs[1].reset[1] == 1);

    // Disjoint timestamps intersect to an empty differential.
    std::vector<RepeaterObservation> c{make_obs(2, 1, 1e-3, 0.1), make_obs(2, 3, 3e-3, 0.2)};
    std::vector<PhaseSeries> series2{phase_series(a), phase_series(c)};
    CHECK(differential_phase(series2)[1].t.empty());
}
