#include "cable.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rng.hpp"

namespace ofdr {

double PerturbationEvent::value(double t, uint64_t seed, uint32_t event_id,
                                double sweep_period_s) const {
    if (t < start_s) return 0.0;
    const double t_end = std::min(t, stop_s);
    const double u = t_end - start_s;
    switch (kind) {
        case PerturbKind::Sinusoid:
            if (t > stop_s) return 0.0;
            return amplitude * std::sin(kTwoPi * frequency_hz * u);
        case PerturbKind::LinearDrift: {
            const double dur = std::max(stop_s - start_s, 1e-30);
            return amplitude * std::min(u / dur, 1.0);
        }
        case PerturbKind::Step:
            return (t <= stop_s) ? amplitude : 0.0;
        case PerturbKind::Chirp: {
            if (t > stop_s) return 0.0;
            const double f = frequency_hz + 0.5 * chirp_rate_hz_per_s * u;
            return amplitude * std::sin(kTwoPi * f * u);
        }
        case PerturbKind::RandomWalk: {
            // One Gaussian step per sweep period, accumulated. Deterministic in
            // (seed, event_id); O(steps) per evaluation keeps it a pure function.
            const size_t steps = static_cast<size_t>(u / sweep_period_s);
            double acc = 0.0;
            for (size_t j = 0; j < steps; ++j)
                acc += rng::gaussian(rng::key(seed, rng::kEvent, event_id, j));
            return amplitude * acc;
        }
    }
    return 0.0;
}

void PerturbationEvent::validate(size_t n_spans) const {
    if (span_index >= n_spans) {
        std::ostringstream err;
        err << "event span_index " << span_index << " out of range (cable has " << n_spans
            << " spans)";
        throw ConfigError(err.str());
    }
    if (!(start_s < stop_s)) throw ConfigError("event start_s must be < stop_s");
}

double CableModel::span_delay_one_way(size_t i, double t, double sweep_period_s) const {
    double d = spans[i].base_delay_s();
    for (size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        if (ev.span_index == i && ev.target == PerturbTarget::Delay)
            d += 1e-9 * ev.value(t, seed, static_cast<uint32_t>(e), sweep_period_s);
    }
    return d;
}

double CableModel::span_phase_forward(size_t i, double t, double sweep_period_s) const {
    double p = 0.0;
    for (size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        if (ev.span_index == i && ev.target == PerturbTarget::Phase)
            p += ev.value(t, seed, static_cast<uint32_t>(e), sweep_period_s);
    }
    if (couple_delay_phase) {
        const double drift = span_delay_one_way(i, t, sweep_period_s) - spans[i].base_delay_s();
        p += kTwoPi * optical_carrier_hz * drift;
    }
    return p;
}

Jones CableModel::span_jones(size_t i, double t, double sweep_period_s) const {
    Jones j = spans[i].jones;
    for (size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        if (ev.span_index == i && ev.target == PerturbTarget::Polarization) {
            const double ang = ev.value(t, seed, static_cast<uint32_t>(e), sweep_period_s);
            j = Jones::rotation(ang) * j;
        }
    }
    return j;
}

double CableModel::roundtrip_delay(size_t k, double t, double sweep_period_s) const {
    if (k > spans.size()) throw ConfigError("roundtrip_delay: repeater index out of range");
    double d = 0.0;
    for (size_t i = 0; i < k; ++i) d += 2.0 * span_delay_one_way(i, t, sweep_period_s);
    return d;
}

double CableModel::roundtrip_phase(size_t k, double t, double sweep_period_s) const {
    if (k > spans.size()) throw ConfigError("roundtrip_phase: repeater index out of range");
    double p = 0.0;
    for (size_t i = 0; i < k; ++i)
        p += (1.0 + fwd_ret_correlation) * span_phase_forward(i, t, sweep_period_s);
    return p;
}

Jones CableModel::roundtrip_jones(size_t k, double t, double sweep_period_s) const {
    if (k > spans.size()) throw ConfigError("roundtrip_jones: repeater index out of range");
    // J_k = (J_k^ret ... J_1^ret) * C_k * (J_k^fwd ... J_1^fwd) with the return
    // fiber modeled identically to the forward one; C_k is scalar coupling and
    // is kept in the amplitude term.
    Jones fwd = Jones::identity();
    for (size_t i = 0; i < k; ++i) fwd = span_jones(i, t, sweep_period_s) * fwd;
    Jones ret = Jones::identity();
    for (size_t i = k; i-- > 0;) ret = ret * span_jones(i, t, sweep_period_s);
    return ret * fwd;
}

double CableModel::roundtrip_amplitude_db(size_t k) const {
    if (k == 0 || k > spans.size())
        throw ConfigError("roundtrip_amplitude_db: repeater index out of range");
    double db = repeaters[k - 1].hllb_coupling_db;
    for (size_t i = 0; i < k; ++i) db += 2.0 * (repeaters[i].gain_db - spans[i].loss_db);
    return db;
}

double CableModel::total_ase_density() const {
    double d = 0.0;
    for (const auto& r : repeaters) d += r.ase_noise_density;
    return d;
}

std::vector<double> CableModel::nominal_roundtrip_delays(double sweep_period_s) const {
    std::vector<double> out(spans.size());
    for (size_t k = 1; k <= spans.size(); ++k)
        out[k - 1] = roundtrip_delay(k, 0.0, sweep_period_s);
    return out;
}

void CableModel::validate(double sweep_period_s) const {
    if (repeaters.size() != spans.size()) {
        std::ostringstream err;
        err << "cable must have one repeater per span (spans=" << spans.size()
            << ", repeaters=" << repeaters.size() << ")";
        throw ConfigError(err.str());
    }
    for (size_t i = 0; i < spans.size(); ++i) {
        if (!(spans[i].length_km > 0)) {
            std::ostringstream err;
            err << "span " << i << " length_km must be positive";
            throw ConfigError(err.str());
        }
        if (spans[i].loss_db < 0) {
            std::ostringstream err;
            err << "span " << i << " loss_db must be non-negative";
            throw ConfigError(err.str());
        }
    }
    for (size_t i = 0; i < repeaters.size(); ++i) {
        if (repeaters[i].hllb_coupling_db > 0) {
            std::ostringstream err;
            err << "repeater " << i << " hllb_coupling_db must be <= 0";
            throw ConfigError(err.str());
        }
        if (repeaters[i].gain_db < 0) {
            std::ostringstream err;
            err << "repeater " << i << " gain_db must be >= 0";
            throw ConfigError(err.str());
        }
        if (repeaters[i].ase_noise_density < 0) {
            std::ostringstream err;
            err << "repeater " << i << " ase_noise_density must be >= 0";
            throw ConfigError(err.str());
        }
    }
    for (const auto& ev : events) ev.validate(spans.size());
    if (fwd_ret_correlation < 0 || fwd_ret_correlation > 1)
        throw ConfigError("fwd_ret_correlation must be in [0, 1]");
    if (!spans.empty() && sweep_period_s > 0) {
        const double rt = roundtrip_delay(spans.size(), 0.0, sweep_period_s);
        if (rt >= sweep_period_s) {
            std::ostringstream err;
            err << "round-trip delay to the last repeater (" << rt
                << " s) must stay below sweep_period_s (" << sweep_period_s
                << " s) for unambiguous delay mapping";
            throw ConfigError(err.str());
        }
    }
}

CableModel CableModel::uniform(size_t n_spans, double length_km, double loss_db_per_km,
                               double hllb_db) {
    CableModel c;
    c.spans.resize(n_spans);
    c.repeaters.resize(n_spans);
    for (size_t i = 0; i < n_spans; ++i) {
        c.spans[i].length_km = length_km;
        c.spans[i].loss_db = loss_db_per_km * length_km;
        c.repeaters[i].gain_db = c.spans[i].loss_db;  // transparent repeaters
        c.repeaters[i].hllb_coupling_db = hllb_db;
    }
    return c;
}

}  // namespace ofdr
