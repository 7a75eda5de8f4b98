#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace ofdr {

enum class PerturbKind : uint8_t { Sinusoid, LinearDrift, RandomWalk, Step, Chirp };
enum class PerturbTarget : uint8_t { Phase, Delay, Polarization };

// Injectable disturbance on one span. Amplitude is rad for Phase and
// Polarization (rotation angle) targets, ns for Delay. LinearDrift ramps from
// 0 to amplitude across [start, stop] and holds; Step switches at start;
// Chirp sweeps frequency_hz..frequency_hz + chirp_rate*(t-start); RandomWalk
// takes one seeded Gaussian step per sweep period.
struct PerturbationEvent {
    PerturbKind kind = PerturbKind::Sinusoid;
    PerturbTarget target = PerturbTarget::Phase;
    size_t span_index = 0;  // 0-based
    double amplitude = 0.0;
    double frequency_hz = 0.0;
    double chirp_rate_hz_per_s = 0.0;
    double start_s = 0.0;
    double stop_s = 1e18;

    // Value at time t (rad or ns). Pure function of (t, seed, event_id).
    double value(double t, uint64_t seed, uint32_t event_id, double sweep_period_s) const;

    void validate(size_t n_spans) const;
};

struct SpanModel {
    double length_km = 10.0;
    double group_index = 1.468;
    double loss_db = 2.0;
    Jones jones = Jones::identity();

    // One-way static propagation delay.
    double base_delay_s() const { return length_km * group_index / kSpeedOfLightKmPerS; }
};

struct RepeaterModel {
    double gain_db = 2.0;
    double hllb_coupling_db = -45.0;
    double ase_noise_density = 0.0;  // relative linear power per Hz reaching the receiver
};

// Ordered spans and repeaters (one repeater at the far end of each span) plus
// perturbation sources. Immutable during simulation.
struct CableModel {
    std::vector<SpanModel> spans;
    std::vector<RepeaterModel> repeaters;
    std::vector<PerturbationEvent> events;
    uint64_t seed = 0;

    // Correlation of return-path phase perturbations with forward-path ones
    // (fibers of a pair share the cable).
    double fwd_ret_correlation = 1.0;

    // When enabled, a delay drift of dtau on a span also adds
    // 2*pi*optical_carrier_hz*dtau to that span's phase.
    bool couple_delay_phase = false;
    double optical_carrier_hz = 193.4e12;

    size_t n_repeaters() const { return spans.size(); }

    // One-way delay of span i (0-based) at time t, including drift events.
    double span_delay_one_way(size_t i, double t, double sweep_period_s) const;

    // Forward-path phase of span i at time t (rad), including events and,
    // when enabled, the delay/phase coupling term.
    double span_phase_forward(size_t i, double t, double sweep_period_s) const;

    // Polarization rotation events folded into span i's Jones at time t.
    Jones span_jones(size_t i, double t, double sweep_period_s) const;

    // Round trip to repeater k (k spans out and back, k in [0, n]).
    double roundtrip_delay(size_t k, double t, double sweep_period_s) const;
    double roundtrip_phase(size_t k, double t, double sweep_period_s) const;
    Jones roundtrip_jones(size_t k, double t, double sweep_period_s) const;

    // Static round-trip amplitude to repeater k (k >= 1) in dB: span losses and
    // repeater gains both ways plus the loopback coupling at repeater k.
    double roundtrip_amplitude_db(size_t k) const;

    // Sum of per-repeater ASE densities (plus extra broadband term added by the
    // scenario) and nominal delays used by the tracker.
    double total_ase_density() const;
    std::vector<double> nominal_roundtrip_delays(double sweep_period_s) const;

    void validate(double sweep_period_s) const;

    // Uniform cable helper: n identical spans with transparent repeaters.
    static CableModel uniform(size_t n_spans, double length_km, double loss_db_per_km,
                              double hllb_db = -45.0);
};

}  // namespace ofdr
