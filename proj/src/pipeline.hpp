#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "capture.hpp"
#include "observation.hpp"
#include "scenario.hpp"

namespace ofdr {

// Orchestrates simulate -> process -> analyze, file or in-memory, plus the
// live streaming pair. The run manifest records the config snapshot, seeds,
// simulated time range and an output index with checksums; all fields are
// deterministic so identical runs produce identical manifests.
class Pipeline {
public:
    explicit Pipeline(Scenario scenario);

    // Per-repeater ASE density for the run (runs the noise-floor calibration
    // when the scenario asks for it). Cached.
    double resolve_noise_density();

    void simulate_to_file(const std::string& out_path);
    void process_file(const std::string& in_path, const std::string& out_path);
    void analyze_file(const std::string& in_path, const std::string& out_dir);
    void e2e(const std::string& out_dir);

    uint64_t stream_tx(const std::string& endpoint);
    void stream_rx(const std::string& endpoint, const std::string& out_path);

    const Scenario& scenario() const { return scenario_; }

    // In-memory stages, exposed for tests and the e2e path.
    std::vector<RepeaterObservation> process_captures(
        const std::function<std::optional<SweepCapture>()>& source);
    void analyze_observations(const std::vector<RepeaterObservation>& obs,
                              const std::string& out_dir);

private:
    void write_manifest(const std::string& out_dir, const std::string& stage,
                        const std::vector<std::string>& produced_files);

    Scenario scenario_;
    double resolved_density_ = -1.0;
};

}  // namespace ofdr
