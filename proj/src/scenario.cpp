#include "scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ofdr {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown field '" + context + "." + it.key() + "'");
    }
}

template <typename T>
T field(const json& obj, const std::string& key, T fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + context + "." + key + "' has the wrong type");
    }
}

json default_doc() {
    return json{
        {"sweep",
         {{"sample_rate_hz", 50e6},
          {"if_center_hz", 15e6},
          {"sweep_bandwidth_hz", 10e6},
          {"sweep_period_s", 1e-3},
          {"dac_bits", 14},
          {"adc_bits", 14},
          {"pol_scheme", "time_interleaved"},
          {"guard_band_hz", 1e6}}},
        {"cable",
         {{"uniform",
           {{"count", 8}, {"length_km", 10.0}, {"loss_db_per_km", 0.2}, {"hllb_db", -45.0}}},
          {"fwd_ret_correlation", 1.0},
          {"couple_delay_phase", false},
          {"optical_carrier_hz", 193.4e12}}},
        {"laser", {{"kind", "free_running"}, {"linewidth_hz", 100.0}, {"flicker_hz2", 0.0}}},
        {"noise",
         {{"mode", "fixed"},
          {"ase_density", 0.0},
          {"target_snr_db", 30.0},
          {"averaging_s", 1.0},
          {"extra_broadband_density", 0.0}}},
        {"events", json::array()},
        {"drift", json::array()},
        {"output", json::object()},
        {"run",
         {{"sweeps", 64},
          {"seed", 1},
          {"threads", 0},
          {"snr_average_sweeps", 0},
          {"snr_averaging", "coherent"},
          {"emit_columns", false},
          {"observation_format", "jsonl"},
          {"phase_convention", "largest_element"},
          {"threshold_db", 10.0}}},
        {"analysis",
         {{"products", json::array()},
          {"psd_repeaters", json::array()},
          {"spectrogram_window", 256},
          {"spectrogram_overlap", 0.5},
          {"band_lo_hz", 0.1},
          {"band_hi_hz", 10.0},
          {"movement_threshold", -0.8}}},
    };
}

}  // namespace

Scenario Scenario::defaults() { return Scenario(default_doc()); }

Scenario Scenario::preset(const std::string& name) {
    json doc = default_doc();
    if (name == "transatlantic-mini") {
        // Desk-scale stand-in for the long cable: 8 x 10 km spans, noise
        // calibrated to the 30 dB operating point at 1 s averaging.
        doc["run"]["sweeps"] = 1000;
        doc["noise"]["mode"] = "calibrate";
        // Desk-scale round trips approach the sweep period; a quiet laser
        // keeps 1 s coherent averaging from decohering the far repeaters.
        doc["laser"]["linewidth_hz"] = 5.0;
    } else if (name == "transatlantic-full") {
        // System-scale converter rates with 80 spans. Heavy: one sweep is
        // one million samples; expect long runtimes.
        doc["sweep"]["sample_rate_hz"] = 2e9;
        doc["sweep"]["if_center_hz"] = 500e6;
        doc["sweep"]["sweep_bandwidth_hz"] = 125e6;
        doc["sweep"]["sweep_period_s"] = 0.5e-3;
        doc["sweep"]["guard_band_hz"] = 12.5e6;
        doc["cable"]["uniform"]["count"] = 80;
        doc["cable"]["uniform"]["length_km"] = 0.6;
        doc["run"]["sweeps"] = 16;
        doc["noise"]["mode"] = "calibrate";
        doc["noise"]["averaging_s"] = 0.004;
    } else if (name == "default") {
        // as-is
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return Scenario(doc);
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json_text(ss.str());
}

Scenario Scenario::from_json_text(const std::string& text) {
    json user;
    try {
        user = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    // Overlay onto defaults so partial configs stay terse.
    json doc = default_doc();
    doc.merge_patch(user);
    // merge_patch replaces whole arrays/objects; uniform vs spans handled in cable().
    if (user.contains("cable") && user["cable"].contains("spans"))
        doc["cable"].erase("uniform");
    return Scenario(doc);
}

void Scenario::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config file for writing: " + path);
    f << doc_.dump(2) << '\n';
}

namespace {

json* navigate(json& doc, const std::string& dotted, bool create) {
    json* cur = &doc;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("empty path segment in '" + dotted + "'");
        if (cur->is_array()) {
            size_t idx;
            try {
                idx = std::stoul(part);
            } catch (...) {
                throw ConfigError("array index expected at '" + part + "' in '" + dotted + "'");
            }
            if (idx >= cur->size()) throw ConfigError("array index out of range in '" + dotted + "'");
            cur = &(*cur)[idx];
        } else {
            if (!cur->contains(part)) {
                if (!create)
                    throw ConfigError("unknown config field '" + dotted + "'");
                (*cur)[part] = json();
            }
            cur = &(*cur)[part];
        }
    }
    return cur;
}

}  // namespace

void Scenario::set_override(const std::string& dotted_key, const std::string& value) {
    json* slot = navigate(doc_, dotted_key, true);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // plain string
    }
    *slot = parsed;
}

std::string Scenario::get(const std::string& dotted_key) const {
    json copy = doc_;
    const json* slot = navigate(copy, dotted_key, false);
    return slot->is_string() ? slot->get<std::string>() : slot->dump();
}

SweepConfig Scenario::sweep() const {
    const json& s = doc_.at("sweep");
    check_keys(s,
               {"sample_rate_hz", "if_center_hz", "sweep_bandwidth_hz", "sweep_period_s",
                "dac_bits", "adc_bits", "pol_scheme", "guard_band_hz"},
               "sweep");
    SweepConfig cfg;
    cfg.sample_rate_hz = field(s, "sample_rate_hz", cfg.sample_rate_hz, "sweep");
    cfg.if_center_hz = field(s, "if_center_hz", cfg.if_center_hz, "sweep");
    cfg.sweep_bandwidth_hz = field(s, "sweep_bandwidth_hz", cfg.sweep_bandwidth_hz, "sweep");
    cfg.sweep_period_s = field(s, "sweep_period_s", cfg.sweep_period_s, "sweep");
    cfg.dac_bits = field(s, "dac_bits", cfg.dac_bits, "sweep");
    cfg.adc_bits = field(s, "adc_bits", cfg.adc_bits, "sweep");
    cfg.guard_band_hz = field(s, "guard_band_hz", cfg.guard_band_hz, "sweep");
    const auto scheme = field<std::string>(s, "pol_scheme", "time_interleaved", "sweep");
    if (scheme != "time_interleaved")
        throw ConfigError("sweep.pol_scheme: only 'time_interleaved' is supported");
    return cfg;
}

CableModel Scenario::cable() const {
    const json& c = doc_.at("cable");
    check_keys(c,
               {"uniform", "spans", "repeaters", "fwd_ret_correlation", "couple_delay_phase",
                "optical_carrier_hz", "seed"},
               "cable");
    CableModel cable;
    if (c.contains("spans")) {
        const json& spans = c.at("spans");
        if (!spans.is_array()) throw ConfigError("cable.spans must be an array");
        for (size_t i = 0; i < spans.size(); ++i) {
            const json& sp = spans[i];
            check_keys(sp, {"length_km", "group_index", "loss_db", "jones_rotation_deg"},
                       "cable.spans[]");
            SpanModel m;
            m.length_km = field(sp, "length_km", 10.0, "cable.spans[]");
            m.group_index = field(sp, "group_index", 1.468, "cable.spans[]");
            m.loss_db = field(sp, "loss_db", 0.2 * m.length_km, "cable.spans[]");
            const double rot = field(sp, "jones_rotation_deg", 0.0, "cable.spans[]");
            if (rot != 0.0) m.jones = Jones::rotation(rot * kPi / 180.0);
            cable.spans.push_back(m);
            RepeaterModel r;
            r.gain_db = m.loss_db;
            cable.repeaters.push_back(r);
        }
    } else if (c.contains("uniform")) {
        const json& u = c.at("uniform");
        check_keys(u, {"count", "length_km", "loss_db_per_km", "hllb_db", "group_index"},
                   "cable.uniform");
        const auto count = field<size_t>(u, "count", 8, "cable.uniform");
        const double len = field(u, "length_km", 10.0, "cable.uniform");
        const double loss = field(u, "loss_db_per_km", 0.2, "cable.uniform");
        const double hllb = field(u, "hllb_db", -45.0, "cable.uniform");
        cable = CableModel::uniform(count, len, loss, hllb);
        const double gi = field(u, "group_index", 1.468, "cable.uniform");
        for (auto& sp : cable.spans) sp.group_index = gi;
    } else {
        throw ConfigError("cable needs either 'uniform' or 'spans'");
    }
    if (c.contains("repeaters")) {
        const json& reps = c.at("repeaters");
        if (!reps.is_array()) throw ConfigError("cable.repeaters must be an array");
        for (size_t i = 0; i < reps.size() && i < cable.repeaters.size(); ++i) {
            const json& r = reps[i];
            check_keys(r, {"gain_db", "hllb_db", "ase_density"}, "cable.repeaters[]");
            cable.repeaters[i].gain_db =
                field(r, "gain_db", cable.repeaters[i].gain_db, "cable.repeaters[]");
            cable.repeaters[i].hllb_coupling_db =
                field(r, "hllb_db", cable.repeaters[i].hllb_coupling_db, "cable.repeaters[]");
            cable.repeaters[i].ase_noise_density = field(
                r, "ase_density", cable.repeaters[i].ase_noise_density, "cable.repeaters[]");
        }
    }
    cable.fwd_ret_correlation = field(c, "fwd_ret_correlation", 1.0, "cable");
    cable.couple_delay_phase = field(c, "couple_delay_phase", false, "cable");
    cable.optical_carrier_hz = field(c, "optical_carrier_hz", 193.4e12, "cable");
    cable.seed = field<uint64_t>(c, "seed", run().seed, "cable");

    // Events: 1-based span indices in config. The drift section is a list of
    // delay-targeted events kept separate for readability.
    json evs = doc_.value("events", json::array());
    for (const auto& d : doc_.value("drift", json::array())) {
        json e = d;
        if (!e.contains("target")) e["target"] = "delay";
        if (!e.contains("kind")) e["kind"] = "linear_drift";
        evs.push_back(e);
    }
    for (size_t i = 0; i < evs.size(); ++i) {
        const json& e = evs[i];
        check_keys(e,
                   {"kind", "target", "span", "amplitude", "frequency_hz",
                    "chirp_rate_hz_per_s", "start_s", "stop_s"},
                   "events[]");
        PerturbationEvent ev;
        const auto kind = field<std::string>(e, "kind", "sinusoid", "events[]");
        if (kind == "sinusoid") ev.kind = PerturbKind::Sinusoid;
        else if (kind == "linear_drift") ev.kind = PerturbKind::LinearDrift;
        else if (kind == "random_walk") ev.kind = PerturbKind::RandomWalk;
        else if (kind == "step") ev.kind = PerturbKind::Step;
        else if (kind == "chirp") ev.kind = PerturbKind::Chirp;
        else throw ConfigError("events[].kind: unknown kind '" + kind + "'");
        const auto target = field<std::string>(
            e, "target", ev.kind == PerturbKind::LinearDrift ? "delay" : "phase", "events[]");
        if (target == "phase") ev.target = PerturbTarget::Phase;
        else if (target == "delay") ev.target = PerturbTarget::Delay;
        else if (target == "polarization") ev.target = PerturbTarget::Polarization;
        else throw ConfigError("events[].target: unknown target '" + target + "'");
        const auto span_1based = field<size_t>(e, "span", 1, "events[]");
        if (span_1based == 0) throw ConfigError("events[].span is 1-based, got 0");
        ev.span_index = span_1based - 1;
        ev.amplitude = field(e, "amplitude", 0.0, "events[]");
        ev.frequency_hz = field(e, "frequency_hz", 0.0, "events[]");
        ev.chirp_rate_hz_per_s = field(e, "chirp_rate_hz_per_s", 0.0, "events[]");
        ev.start_s = field(e, "start_s", 0.0, "events[]");
        ev.stop_s = field(e, "stop_s", 1e18, "events[]");
        cable.events.push_back(ev);
    }
    return cable;
}

LaserModel Scenario::laser() const {
    const json& l = doc_.at("laser");
    check_keys(l, {"kind", "linewidth_hz", "flicker_hz2", "stabilization_gain"}, "laser");
    LaserModel m;
    const auto kind = field<std::string>(l, "kind", "free_running", "laser");
    if (kind == "free_running") m.kind = LaserKind::FreeRunningFiber;
    else if (kind == "cavity_stabilized") m.kind = LaserKind::CavityStabilized;
    else throw ConfigError("laser.kind must be 'free_running' or 'cavity_stabilized'");
    m.linewidth_hz = field(l, "linewidth_hz", 100.0, "laser");
    m.flicker_hz2 = field(l, "flicker_hz2", 0.0, "laser");
    if (l.contains("stabilization_gain")) {
        m.stabilization_gain.clear();
        for (const auto& b : l.at("stabilization_gain")) {
            check_keys(b, {"f_lo_hz", "f_hi_hz", "gain_db"}, "laser.stabilization_gain[]");
            GainBand gb;
            gb.f_lo_hz = field(b, "f_lo_hz", 0.0, "laser.stabilization_gain[]");
            gb.f_hi_hz = field(b, "f_hi_hz", 0.0, "laser.stabilization_gain[]");
            gb.gain_db = field(b, "gain_db", 0.0, "laser.stabilization_gain[]");
            m.stabilization_gain.push_back(gb);
        }
    }
    return m;
}

NoiseParams Scenario::noise() const {
    const json& n = doc_.at("noise");
    check_keys(n,
               {"mode", "ase_density", "target_snr_db", "averaging_s",
                "extra_broadband_density"},
               "noise");
    NoiseParams p;
    const auto mode = field<std::string>(n, "mode", "fixed", "noise");
    if (mode == "fixed") p.mode = NoiseMode::Fixed;
    else if (mode == "calibrate") p.mode = NoiseMode::Calibrate;
    else throw ConfigError("noise.mode must be 'fixed' or 'calibrate'");
    p.ase_density = field(n, "ase_density", 0.0, "noise");
    p.target_snr_db = field(n, "target_snr_db", 30.0, "noise");
    p.averaging_s = field(n, "averaging_s", 1.0, "noise");
    p.extra_broadband_density = field(n, "extra_broadband_density", 0.0, "noise");
    if (p.ase_density < 0) throw ConfigError("noise.ase_density must be >= 0");
    if (p.averaging_s <= 0) throw ConfigError("noise.averaging_s must be positive");
    return p;
}

RunParams Scenario::run() const {
    const json& r = doc_.at("run");
    check_keys(r,
               {"sweeps", "seed", "threads", "snr_average_sweeps", "snr_averaging",
                "emit_columns", "observation_format", "phase_convention", "threshold_db"},
               "run");
    RunParams p;
    p.sweeps = field<size_t>(r, "sweeps", 64, "run");
    p.seed = field<uint64_t>(r, "seed", 1, "run");
    p.threads = field(r, "threads", 0, "run");
    p.snr_average_sweeps = field<size_t>(r, "snr_average_sweeps", 0, "run");
    const auto avg_mode = field<std::string>(r, "snr_averaging", "coherent", "run");
    if (avg_mode == "coherent") p.power_average_snr = false;
    else if (avg_mode == "power") p.power_average_snr = true;
    else throw ConfigError("run.snr_averaging must be 'coherent' or 'power'");
    p.emit_columns = field(r, "emit_columns", false, "run");
    const auto fmt = field<std::string>(r, "observation_format", "jsonl", "run");
    if (fmt == "jsonl") p.obs_format = ObservationFormat::JsonLines;
    else if (fmt == "binary") p.obs_format = ObservationFormat::Binary;
    else throw ConfigError("run.observation_format must be 'jsonl' or 'binary'");
    const auto conv = field<std::string>(r, "phase_convention", "largest_element", "run");
    if (conv == "largest_element") p.phase_convention = PhaseConvention::LargestElement;
    else if (conv == "det_half") p.phase_convention = PhaseConvention::DetHalf;
    else throw ConfigError("run.phase_convention must be 'largest_element' or 'det_half'");
    p.threshold_db = field(r, "threshold_db", 10.0, "run");
    if (p.sweeps == 0) throw ConfigError("run.sweeps must be positive");
    return p;
}

AnalysisParams Scenario::analysis() const {
    const json& a = doc_.at("analysis");
    check_keys(a,
               {"products", "psd_repeaters", "spectrogram_window", "spectrogram_overlap",
                "band_lo_hz", "band_hi_hz", "movement_threshold"},
               "analysis");
    AnalysisParams p;
    for (const auto& s : a.value("products", json::array()))
        p.products.push_back(s.get<std::string>());
    for (const auto& k : a.value("psd_repeaters", json::array()))
        p.psd_repeaters.push_back(k.get<uint32_t>());
    p.spectrogram_window = field<size_t>(a, "spectrogram_window", 256, "analysis");
    p.spectrogram_overlap = field(a, "spectrogram_overlap", 0.5, "analysis");
    p.band_lo_hz = field(a, "band_lo_hz", 0.1, "analysis");
    p.band_hi_hz = field(a, "band_hi_hz", 10.0, "analysis");
    p.movement_threshold = field(a, "movement_threshold", -0.8, "analysis");
    return p;
}

OutputParams Scenario::output() const {
    const json& o = doc_.value("output", json::object());
    check_keys(o, {"captures", "observations", "dir"}, "output");
    OutputParams p;
    p.captures = o.value("captures", "");
    p.observations = o.value("observations", "");
    p.dir = o.value("dir", "");
    return p;
}

void Scenario::validate() const {
    check_keys(doc_,
               {"sweep", "cable", "laser", "noise", "events", "drift", "run", "analysis",
                "output"},
               "config");
    const auto cfg = sweep();
    cfg.validate();
    const auto c = cable();
    c.validate(cfg.sweep_period_s);
    laser().validate();
    noise();
    run();
    analysis();
    output();
}

}  // namespace ofdr
