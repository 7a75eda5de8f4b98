#pragma once

#include <optional>
#include <vector>

#include "observation.hpp"
#include "peaks.hpp"

namespace ofdr {

struct TrackerOptions {
    double threshold_db = 10.0;      // below floor + this => missing
    double nominal_smoothing = 0.1;  // exponential smoothing of the nominal delay
    size_t snr_average_sweeps = 1;   // per-pol averaging block for SNR
    bool power_average_snr = false;  // incoherent (power) averaging instead of coherent
    bool emit_columns = false;       // per-sweep column records instead of pairs
};

// Serial reduction over sweep order: peak tracking, Jones column pairing,
// SNR block averaging. Matched filtering may run in parallel upstream; ingest
// must be called in sweep-index order.
class Tracker {
public:
    Tracker(const SweepConfig& cfg, std::vector<double> nominal_delays,
            TrackerOptions opt = {});

    // Process one impulse response; returns completed observation records.
    std::vector<RepeaterObservation> ingest(const ImpulseResponse& ir);

    // Flush pending unpaired columns as column-only records.
    std::vector<RepeaterObservation> finish();

    uint64_t sweeps_ingested() const { return sweeps_ingested_; }
    uint64_t columns_extracted() const { return columns_extracted_; }
    const std::vector<double>& nominal_delays() const { return nominal_; }

private:
    struct Column {
        uint64_t sweep_index = 0;
        double t0 = 0.0;
        LaunchPol launch = LaunchPol::X;
        cplx vx{}, vy{};
        double delay_est = 0.0;
        double intensity_db = 0.0;
        bool missing = false;
    };

    RepeaterObservation make_pair(size_t rep, const Column& cx, const Column& cy) const;
    RepeaterObservation make_column_only(size_t rep, const Column& c) const;
    void update_block_snr(const ImpulseResponse& ir);

    SweepConfig cfg_;
    TrackerOptions opt_;
    std::vector<double> nominal_;
    std::vector<size_t> extraction_bin_;  // pinned readout bin with hysteresis
    std::vector<std::optional<Column>> pending_x_;  // per repeater
    std::vector<double> block_snr_db_;
    std::vector<uint32_t> block_snr_flags_;
    std::vector<uint8_t> block_missing_;
    double block_bandwidth_hz_;

    // Averaging buffer for SNR, per launch pol (complex sums for coherent
    // mode, power sums for incoherent mode).
    struct AvgBlock {
        std::vector<cplx> sum_x, sum_y;
        std::vector<double> pow_x, pow_y;
        size_t count = 0;
    };
    AvgBlock blocks_[2];
    double code_scale_ = 1.0;

    bool have_block_snr_ = false;
    uint64_t sweeps_ingested_ = 0;
    uint64_t columns_extracted_ = 0;
    std::optional<uint64_t> last_sweep_index_;
    bool gap_pending_ = false;
};

}  // namespace ofdr
