#include "pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "analysis.hpp"
#include "calibration.hpp"
#include "fft.hpp"
#include "frame.hpp"
#include "matched_filter.hpp"
#include "parallel.hpp"
#include "propagate.hpp"
#include "sha256.hpp"
#include "stream.hpp"
#include "tracker.hpp"

namespace ofdr {

namespace fs = std::filesystem;
using nlohmann::json;

Pipeline::Pipeline(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
}

double Pipeline::resolve_noise_density() {
    if (resolved_density_ >= 0.0) return resolved_density_;
    const auto np = scenario_.noise();
    if (np.mode == NoiseMode::Fixed) {
        resolved_density_ = np.ase_density;
    } else {
        resolved_density_ =
            calibrate_noise_floor(scenario_.cable(), scenario_.laser(), scenario_.sweep(),
                                  np.target_snr_db, np.averaging_s, scenario_.run().seed);
    }
    return resolved_density_;
}

namespace {

CableModel cable_with_density(const Scenario& s, double density) {
    CableModel cable = s.cable();
    for (auto& r : cable.repeaters) r.ase_noise_density = density;
    return cable;
}

size_t snr_window_sweeps(const Scenario& s) {
    const auto run = s.run();
    if (run.snr_average_sweeps > 0) return run.snr_average_sweeps;
    const double t = s.sweep().sweep_period_s;
    const auto derived = static_cast<size_t>(std::llround(s.noise().averaging_s / t / 2.0));
    // Never ask for a longer window than the run can fill.
    return std::clamp<size_t>(derived, 1, std::max<size_t>(1, run.sweeps / 2));
}

}  // namespace

void Pipeline::simulate_to_file(const std::string& out_path) {
    const double density = resolve_noise_density();
    const auto run = scenario_.run();
    Propagator prop(cable_with_density(scenario_, density), scenario_.laser(),
                    scenario_.sweep(), run.seed, run.sweeps,
                    scenario_.noise().extra_broadband_density);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open capture output file: " + out_path);
    parallel_ordered_map<std::vector<uint8_t>>(
        run.sweeps, run.threads,
        [&](size_t m) { return encode_frame(prop.simulate_sweep(m), m); },
        [&](size_t, std::vector<uint8_t>&& bytes) {
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
        });
    if (!out) throw IoError("write failed: " + out_path);
}

std::vector<RepeaterObservation> Pipeline::process_captures(
    const std::function<std::optional<SweepCapture>()>& source) {
    const auto cfg = scenario_.sweep();
    const auto run = scenario_.run();
    const double density = resolve_noise_density();
    const CableModel cable = cable_with_density(scenario_, density);

    MatchedFilter mf(cfg);
    TrackerOptions topt;
    topt.threshold_db = run.threshold_db;
    topt.snr_average_sweeps = snr_window_sweeps(scenario_);
    topt.power_average_snr = run.power_average_snr;
    topt.emit_columns = run.emit_columns;
    Tracker tracker(cfg, cable.nominal_roundtrip_delays(cfg.sweep_period_s), topt);

    std::vector<RepeaterObservation> all;
    // Parallel matched filtering, strictly ordered tracker fold. The source is
    // sequential, so each worker pairs its pull with the pull order and the
    // fold reorders on that index before feeding the tracker.
    std::mutex src_mu;
    size_t pull_count = 0;
    std::map<size_t, ImpulseResponse> pending;
    size_t next_ingest = 0;
    using Item = std::pair<size_t, ImpulseResponse>;
    parallel_ordered_map<Item>(
        run.sweeps, run.threads,
        [&](size_t) -> Item {
            std::optional<SweepCapture> cap;
            size_t order;
            {
                std::lock_guard<std::mutex> lock(src_mu);
                order = pull_count++;
                cap = source();
            }
            if (!cap) throw IoError("capture source ended early");
            return {order, mf.apply(*cap)};
        },
        [&](size_t, Item&& item) {
            pending.emplace(item.first, std::move(item.second));
            while (!pending.empty() && pending.begin()->first == next_ingest) {
                auto obs = tracker.ingest(pending.begin()->second);
                all.insert(all.end(), obs.begin(), obs.end());
                pending.erase(pending.begin());
                ++next_ingest;
            }
        });
    while (!pending.empty() && pending.begin()->first == next_ingest) {
        auto obs = tracker.ingest(pending.begin()->second);
        all.insert(all.end(), obs.begin(), obs.end());
        pending.erase(pending.begin());
        ++next_ingest;
    }
    auto tail = tracker.finish();
    all.insert(all.end(), tail.begin(), tail.end());
    return all;
}

namespace {

// Pull captures from a frame file in order.
struct FileCaptureSource {
    std::ifstream in;
    FrameParser parser;
    int adc_bits;
    double full_scale;
    std::vector<uint8_t> buf = std::vector<uint8_t>(1 << 16);
    uint64_t frames = 0;

    std::optional<SweepCapture> operator()() {
        for (;;) {
            if (auto f = parser.next()) {
                ++frames;
                return frame_to_capture(*f, adc_bits, full_scale);
            }
            if (!in) return std::nullopt;
            in.read(reinterpret_cast<char*>(buf.data()),
                    static_cast<std::streamsize>(buf.size()));
            const auto got = static_cast<size_t>(in.gcount());
            if (got == 0) return std::nullopt;
            parser.feed({buf.data(), got});
        }
    }
};

}  // namespace

void Pipeline::process_file(const std::string& in_path, const std::string& out_path) {
    const auto cfg = scenario_.sweep();
    const auto run = scenario_.run();
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw IoError("cannot open capture input file: " + in_path);

    // Count frames first so the parallel map knows the run length; empty input
    // is legal and produces an empty output with a warning.
    FileCaptureSource counter{std::ifstream(in_path, std::ios::binary), {}, cfg.adc_bits, 1.0};
    uint64_t n_frames = 0;
    while (counter()) ++n_frames;
    if (n_frames == 0) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot open observation output file: " + out_path);
        std::cerr << "warning: no frames in input, empty observation file written\n";
        return;
    }

    const double density = resolve_noise_density();
    Propagator scale_probe(cable_with_density(scenario_, density), scenario_.laser(), cfg,
                           run.seed, 1, scenario_.noise().extra_broadband_density);

    FileCaptureSource src{std::ifstream(in_path, std::ios::binary), {}, cfg.adc_bits,
                          scale_probe.full_scale()};
    Scenario bounded = scenario_;
    bounded.set_override("run.sweeps", std::to_string(n_frames));
    Pipeline sub(bounded);
    sub.resolved_density_ = density;
    auto obs = sub.process_captures([&] { return src(); });

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open observation output file: " + out_path);
    write_observations(out, obs, run.obs_format);
}

void Pipeline::analyze_observations(const std::vector<RepeaterObservation>& obs,
                                    const std::string& out_dir) {
    const auto ap = scenario_.analysis();
    const auto run = scenario_.run();
    fs::create_directories(out_dir);

    auto want = [&](const std::string& p) {
        return ap.products.empty() ||
               std::find(ap.products.begin(), ap.products.end(), p) != ap.products.end();
    };

    const auto by_rep = split_by_repeater(obs);
    std::vector<PhaseSeries> series;
    for (const auto& group : by_rep)
        series.push_back(phase_series(group, run.phase_convention));

    const size_t k_count = series.size();
    std::vector<std::string> produced;

    if (want("phase") && k_count > 0 && !series[0].t.empty()) {
        std::vector<std::string> headers{"time_s"};
        std::vector<const std::vector<double>*> cols{&series[0].t};
        for (size_t k = 0; k < k_count; ++k) {
            headers.push_back("phi_" + std::to_string(k + 1) + "_rad");
            cols.push_back(&series[k].phi);
        }
        write_csv(out_dir + "/phase.csv", headers, cols);
        produced.push_back("phase.csv");
    }

    std::vector<PhaseSeries> diffs;
    if (k_count > 0) diffs = differential_phase(series);
    if (want("diff") && !diffs.empty() && !diffs[0].t.empty()) {
        std::vector<std::string> headers{"time_s"};
        std::vector<const std::vector<double>*> cols{&diffs[0].t};
        for (size_t k = 0; k < diffs.size(); ++k) {
            headers.push_back("dphi_" + std::to_string(k + 1) + "_rad");
            cols.push_back(&diffs[k].phi);
        }
        write_csv(out_dir + "/diff_phase.csv", headers, cols);
        produced.push_back("diff_phase.csv");
    }

    auto selected_reps = ap.psd_repeaters;
    if (selected_reps.empty())
        for (size_t k = 1; k <= k_count; ++k) selected_reps.push_back(static_cast<uint32_t>(k));

    if (want("psd")) {
        for (uint32_t k : selected_reps) {
            if (k < 1 || k > k_count) continue;
            const auto& s = series[k - 1];
            if (s.phi.size() < 64) continue;
            const PsdReport r = frequency_noise_psd(s, ap.welch);
            std::vector<std::string> headers{"freq_hz", "s_phi_rad2_per_hz", "s_nu_hz2_per_hz"};
            write_csv(out_dir + "/psd_rep" + std::to_string(k) + ".csv", headers,
                      {&r.freq_hz, &r.s_phi, &r.s_nu});
            produced.push_back("psd_rep" + std::to_string(k) + ".csv");
        }
    }

    if (want("spectrogram")) {
        for (uint32_t k : selected_reps) {
            if (k < 1 || k > k_count) continue;
            const auto& s = series[k - 1];
            if (s.phi.size() < ap.spectrogram_window) continue;
            const SpectrogramGrid g =
                spectrogram(s, ap.spectrogram_window, ap.spectrogram_overlap, ap.band_lo_hz,
                            ap.band_hi_hz);
            // CSV matrix: rows = time, cols = frequency bins in the display band.
            std::vector<size_t> keep;
            for (size_t c = 0; c < g.freq_hz.size(); ++c)
                if (g.freq_hz[c] >= g.band_lo_hz && g.freq_hz[c] <= g.band_hi_hz)
                    keep.push_back(c);
            const std::string base = out_dir + "/spectrogram_rep" + std::to_string(k);
            {
                std::ofstream f(base + ".csv", std::ios::binary);
                if (!f) throw IoError("cannot open " + base + ".csv");
                f << "time_s";
                for (size_t c : keep) f << ",f_" << g.freq_hz[c] << "_hz_db";
                f << '\n';
                char buf[40];
                for (size_t r = 0; r < g.time_s.size(); ++r) {
                    std::snprintf(buf, sizeof(buf), "%.12g", g.time_s[r]);
                    f << buf;
                    for (size_t c : keep) {
                        std::snprintf(buf, sizeof(buf), ",%.6g", g.power_db[r][c]);
                        f << buf;
                    }
                    f << '\n';
                }
            }
            json side;
            side["repeater"] = g.repeater;
            side["window_len"] = g.window_len;
            side["overlap"] = g.overlap;
            side["band_lo_hz"] = g.band_lo_hz;
            side["band_hi_hz"] = g.band_hi_hz;
            side["fs_phase_hz"] = series[k - 1].fs_hz;
            side["n_time"] = g.time_s.size();
            side["n_freq"] = keep.size();
            std::ofstream jf(base + ".json", std::ios::binary);
            jf << side.dump(2) << '\n';
            produced.push_back(base.substr(out_dir.size() + 1) + ".csv");
            produced.push_back(base.substr(out_dir.size() + 1) + ".json");
        }
    }

    if ((want("drift") || want("movement")) && k_count > 0 && !obs.empty()) {
        // Delay series per repeater, ns.
        std::vector<std::vector<double>> delay_ns(k_count);
        std::vector<double> t;
        for (const auto& group : by_rep) {
            for (const auto& o : group) {
                if (o.flags & kObsMissing) continue;
                delay_ns[o.repeater - 1].push_back(o.delay_est_s * 1e9);
                if (o.repeater == 1) t.push_back(o.timestamp_s);
            }
        }
        if (want("drift") && !t.empty()) {
            std::vector<std::string> headers{"time_s"};
            std::vector<const std::vector<double>*> cols{&t};
            for (size_t k = 0; k < k_count; ++k) {
                headers.push_back("delay_" + std::to_string(k + 1) + "_ns");
                cols.push_back(&delay_ns[k]);
            }
            write_csv(out_dir + "/delay_drift.csv", headers, cols);
            produced.push_back("delay_drift.csv");
        }
        if (want("movement")) {
            size_t min_len = SIZE_MAX;
            for (const auto& d : delay_ns) min_len = std::min(min_len, d.size());
            if (min_len >= 32) {
                const MovementReport rep = span_movement_report(delay_ns, ap.movement_threshold);
                json mj;
                mj["flag_threshold"] = rep.flag_threshold;
                mj["flagged_pairs"] = json::array();
                for (auto [a, b] : rep.flagged_pairs)
                    mj["flagged_pairs"].push_back({{"repeater_a", a}, {"repeater_b", b}});
                mj["correlation"] = rep.correlation;
                std::ofstream jf(out_dir + "/movement.json", std::ios::binary);
                jf << mj.dump(2) << '\n';
                produced.push_back("movement.json");
                std::vector<std::string> headers;
                std::vector<const std::vector<double>*> cols;
                for (size_t k = 0; k < rep.differential_ns.size(); ++k) {
                    headers.push_back("span_" + std::to_string(k + 1) + "_ns");
                    cols.push_back(&rep.differential_ns[k]);
                }
                write_csv(out_dir + "/movement.csv", headers, cols);
                produced.push_back("movement.csv");
            }
        }
    }

    if (want("snr") && k_count > 0) {
        std::vector<double> t;
        std::vector<std::vector<double>> snr(k_count), intensity(k_count);
        for (const auto& group : by_rep) {
            for (const auto& o : group) {
                snr[o.repeater - 1].push_back(o.snr_db);
                intensity[o.repeater - 1].push_back(o.intensity_db);
                if (o.repeater == 1) t.push_back(o.timestamp_s);
            }
        }
        if (!t.empty()) {
            std::vector<std::string> headers{"time_s"};
            std::vector<const std::vector<double>*> cols{&t};
            for (size_t k = 0; k < k_count; ++k) {
                headers.push_back("snr_" + std::to_string(k + 1) + "_db");
                cols.push_back(&snr[k]);
            }
            for (size_t k = 0; k < k_count; ++k) {
                headers.push_back("intensity_" + std::to_string(k + 1) + "_db");
                cols.push_back(&intensity[k]);
            }
            write_csv(out_dir + "/snr.csv", headers, cols);
            produced.push_back("snr.csv");
        }
    }

    write_manifest(out_dir, "analyze", produced);
}

void Pipeline::analyze_file(const std::string& in_path, const std::string& out_dir) {
    const auto obs = read_observations_file(in_path);
    if (obs.empty()) std::cerr << "warning: no observations in input\n";
    analyze_observations(obs, out_dir);
}

void Pipeline::e2e(const std::string& out_dir) {
    fs::create_directories(out_dir);
    const double density = resolve_noise_density();
    const auto run = scenario_.run();
    Propagator prop(cable_with_density(scenario_, density), scenario_.laser(),
                    scenario_.sweep(), run.seed, run.sweeps,
                    scenario_.noise().extra_broadband_density);

    // Captures flow through the wire codec even in memory, so the in-memory
    // pipeline and the file pipeline see bit-identical inputs.
    size_t next = 0;
    auto source = [&]() -> std::optional<SweepCapture> {
        if (next >= run.sweeps) return std::nullopt;
        const auto bytes = encode_frame(prop.simulate_sweep(next), next);
        ++next;
        return frame_to_capture(decode_frame(bytes), prop.config().adc_bits,
                                prop.full_scale());
    };
    auto obs = process_captures(source);

    const std::string obs_name =
        run.obs_format == ObservationFormat::Binary ? "observations.bin" : "observations.jsonl";
    {
        std::ofstream out(out_dir + "/" + obs_name, std::ios::binary);
        if (!out) throw IoError("cannot open " + out_dir + "/" + obs_name);
        write_observations(out, obs, run.obs_format);
    }
    analyze_observations(obs, out_dir + "/analysis");

    std::vector<std::string> produced{obs_name};
    write_manifest(out_dir, "e2e", produced);
}

uint64_t Pipeline::stream_tx(const std::string& endpoint) {
    const double density = resolve_noise_density();
    const auto run = scenario_.run();
    Propagator prop(cable_with_density(scenario_, density), scenario_.laser(),
                    scenario_.sweep(), run.seed, run.sweeps,
                    scenario_.noise().extra_broadband_density);
    StreamServer server(Endpoint::parse(endpoint));
    std::cerr << "stream-tx listening on port " << server.port() << "\n";
    size_t next = 0;
    return server.serve([&]() -> std::optional<SweepCapture> {
        if (next >= run.sweeps) return std::nullopt;
        return prop.simulate_sweep(next++);
    });
}

void Pipeline::stream_rx(const std::string& endpoint, const std::string& out_path) {
    StreamConsumer consumer(Endpoint::parse(endpoint));
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open capture output file: " + out_path);
    uint64_t frames = 0;
    while (auto f = consumer.next_frame()) {
        // Re-encode preserves the original bytes (same fields, same codec).
        SweepCapture cap = frame_to_capture(*f, 16, 1.0);
        cap.adc_bits = 16;  // passthrough, no shift
        const auto bytes = encode_frame(cap, f->sequence);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        ++frames;
    }
    const GapReport rep = consumer.gap_report();
    json gj;
    gj["frames_written"] = frames;
    gj["received"] = rep.received;
    gj["rejects"] = rep.rejects;
    gj["connection_lost"] = rep.connection_lost;
    gj["missing_sequences"] = rep.missing_sequences;
    std::ofstream jf(out_path + ".gaps.json", std::ios::binary);
    jf << gj.dump(2) << '\n';
    std::cerr << "stream-rx: " << frames << " frames, " << rep.missing_sequences.size()
              << " gaps, " << rep.rejects << " rejects\n";
}

void Pipeline::write_manifest(const std::string& out_dir, const std::string& stage,
                              const std::vector<std::string>& produced_files) {
    const auto run = scenario_.run();
    json m;
    m["version"] = ofdr_version_string();
    m["fft_backend"] = fft_backend();
    m["stage"] = stage;
    m["config"] = scenario_.doc();
    m["seed"] = run.seed;
    m["noise_density"] = resolved_density_ >= 0 ? resolved_density_ : scenario_.noise().ase_density;
    m["sim_time_start_s"] = 0.0;
    m["sim_time_stop_s"] = static_cast<double>(run.sweeps) * scenario_.sweep().sweep_period_s;
    json outputs = json::array();
    for (const auto& name : produced_files) {
        const std::string path = out_dir + "/" + name;
        json o;
        o["path"] = name;
        o["bytes"] = fs::exists(path) ? static_cast<uint64_t>(fs::file_size(path)) : 0;
        o["sha256"] = fs::exists(path) ? sha256_file_hex(path) : "";
        outputs.push_back(o);
    }
    m["outputs"] = outputs;
    std::ofstream f(out_dir + "/manifest.json", std::ios::binary);
    if (!f) throw IoError("cannot open manifest: " + out_dir + "/manifest.json");
    f << m.dump(2) << '\n';
}

}  // namespace ofdr
