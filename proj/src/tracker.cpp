#include "tracker.hpp"

#include <cmath>

namespace ofdr {

Tracker::Tracker(const SweepConfig& cfg, std::vector<double> nominal_delays, TrackerOptions opt)
    : cfg_(cfg), opt_(opt), nominal_(std::move(nominal_delays)) {
    extraction_bin_.resize(nominal_.size());
    for (size_t r = 0; r < nominal_.size(); ++r)
        extraction_bin_[r] =
            static_cast<size_t>(std::llround(nominal_[r] * cfg_.sample_rate_hz));
    pending_x_.resize(nominal_.size());
    block_snr_db_.assign(nominal_.size(), 0.0);
    block_snr_flags_.assign(nominal_.size(), 0);
    block_missing_.assign(nominal_.size(), 0);
    block_bandwidth_hz_ = meas_bandwidth_hz(cfg_, opt_.snr_average_sweeps);
}

void Tracker::update_block_snr(const ImpulseResponse& ir) {
    AvgBlock& blk = blocks_[static_cast<size_t>(ir.launch_pol)];
    const size_t n = ir.size();
    if (blk.sum_x.size() != n) {
        blk.sum_x.assign(n, cplx{});
        blk.sum_y.assign(n, cplx{});
        blk.pow_x.assign(n, 0.0);
        blk.pow_y.assign(n, 0.0);
        blk.count = 0;
    }
    if (opt_.power_average_snr) {
        for (size_t i = 0; i < n; ++i) {
            blk.pow_x[i] += std::norm(ir.ch_x[i]);
            blk.pow_y[i] += std::norm(ir.ch_y[i]);
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            blk.sum_x[i] += ir.ch_x[i];
            blk.sum_y[i] += ir.ch_y[i];
        }
    }
    ++blk.count;
    const bool complete = blk.count >= opt_.snr_average_sweeps;
    // Until the first block completes, estimate from the partial average so
    // early records carry a (low-confidence) figure instead of nothing.
    if (!complete && have_block_snr_) return;

    ImpulseResponse avg;
    avg.launch_pol = ir.launch_pol;
    avg.bin_spacing_s = ir.bin_spacing_s;
    avg.code_scale = ir.code_scale;
    const double inv = 1.0 / static_cast<double>(blk.count);
    avg.ch_x.resize(n);
    avg.ch_y.resize(n);
    if (opt_.power_average_snr) {
        for (size_t i = 0; i < n; ++i) {
            avg.ch_x[i] = cplx{std::sqrt(blk.pow_x[i] * inv), 0.0};
            avg.ch_y[i] = cplx{std::sqrt(blk.pow_y[i] * inv), 0.0};
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            avg.ch_x[i] = blk.sum_x[i] * inv;
            avg.ch_y[i] = blk.sum_y[i] * inv;
        }
    }
    const auto peaks = detect_peaks(avg, std::span<const double>(nominal_), opt_.threshold_db,
                                    cfg_);
    const auto snrs = estimate_snr(avg, peaks, cfg_);
    for (size_t r = 0; r < snrs.size() && r < block_snr_db_.size(); ++r) {
        block_snr_db_[r] = snrs[r].snr_db;
        // Presence is judged on the averaged response: at a realistic
        // operating point single sweeps sit near the floor by design, and a
        // fault shows up as the averaged peak going dark.
        block_missing_[r] = peaks[r].missing ? 1 : 0;
        uint32_t f = 0;
        if (snrs[r].low_confidence || !complete) f |= kObsLowConfidence;
        if (snrs[r].clamped) f |= kObsSnrClamped;
        block_snr_flags_[r] = f;
    }
    if (complete) {
        have_block_snr_ = true;
        blk.sum_x.assign(n, cplx{});
        blk.sum_y.assign(n, cplx{});
        blk.pow_x.assign(n, 0.0);
        blk.pow_y.assign(n, 0.0);
        blk.count = 0;
    }
}

std::vector<RepeaterObservation> Tracker::ingest(const ImpulseResponse& ir) {
    std::vector<RepeaterObservation> out;
    if (last_sweep_index_ && ir.sweep_index != *last_sweep_index_ + 1) gap_pending_ = true;
    last_sweep_index_ = ir.sweep_index;
    ++sweeps_ingested_;
    code_scale_ = ir.code_scale;

    update_block_snr(ir);

    const auto peaks =
        detect_peaks(ir, std::span<const double>(nominal_), opt_.threshold_db, cfg_);
    const double n_samples = static_cast<double>(ir.size());

    for (size_t r = 0; r < peaks.size(); ++r) {
        const auto& pk = peaks[r];
        // Jones columns are read at a pinned bin: the per-sweep argmax
        // jitters with noise and with laser-induced apparent-delay wander,
        // and a one-bin hop would kick the extracted phase by the carrier
        // term. The pin follows the smoothed nominal with hysteresis, so it
        // moves only under sustained drift.
        const double nominal_bins = nominal_[r] * cfg_.sample_rate_hz;
        if (std::abs(nominal_bins - static_cast<double>(extraction_bin_[r])) > 1.5)
            extraction_bin_[r] = static_cast<size_t>(std::llround(nominal_bins));
        const size_t stable_bin = extraction_bin_[r] % ir.size();
        Column col;
        col.sweep_index = ir.sweep_index;
        col.t0 = ir.t0;
        col.launch = ir.launch_pol;
        col.vx = ir.ch_x[stable_bin];
        col.vy = ir.ch_y[stable_bin];
        col.delay_est = pk.delay_s;
        col.missing = block_missing_[r] != 0;
        const double amp = std::sqrt(std::norm(col.vx) + std::norm(col.vy)) * ir.code_scale /
                           n_samples;
        col.intensity_db = amp > 0 ? 20.0 * std::log10(amp) : -999.0;
        ++columns_extracted_;

        if (!col.missing) {
            // Follow slow delay drift without locking onto noise.
            nominal_[r] += opt_.nominal_smoothing * (pk.delay_s - nominal_[r]);
        }

        if (opt_.emit_columns) {
            auto obs = make_column_only(r, col);
            if (gap_pending_) obs.flags |= kObsGapBefore;
            out.push_back(obs);
            continue;
        }

        if (ir.launch_pol == LaunchPol::X) {
            if (pending_x_[r]) {
                // Partner Y never arrived; emit the stale column.
                auto obs = make_column_only(r, *pending_x_[r]);
                obs.flags |= kObsGapBefore;
                out.push_back(obs);
            }
            pending_x_[r] = col;
        } else {
            if (pending_x_[r] && pending_x_[r]->sweep_index + 1 == ir.sweep_index) {
                auto obs = make_pair(r, *pending_x_[r], col);
                if (gap_pending_) obs.flags |= kObsGapBefore;
                out.push_back(obs);
                pending_x_[r].reset();
            } else {
                if (pending_x_[r]) {
                    auto stale = make_column_only(r, *pending_x_[r]);
                    stale.flags |= kObsGapBefore;
                    out.push_back(stale);
                    pending_x_[r].reset();
                }
                auto obs = make_column_only(r, col);
                if (gap_pending_) obs.flags |= kObsGapBefore;
                out.push_back(obs);
            }
        }
    }
    if (!peaks.empty()) gap_pending_ = false;
    return out;
}

std::vector<RepeaterObservation> Tracker::finish() {
    std::vector<RepeaterObservation> out;
    for (size_t r = 0; r < pending_x_.size(); ++r) {
        if (pending_x_[r]) {
            out.push_back(make_column_only(r, *pending_x_[r]));
            pending_x_[r].reset();
        }
    }
    return out;
}

RepeaterObservation Tracker::make_pair(size_t rep, const Column& cx, const Column& cy) const {
    RepeaterObservation o;
    o.repeater = static_cast<uint32_t>(rep + 1);
    o.sweep_index = cx.sweep_index;
    o.timestamp_s = 0.5 * (cx.t0 + cy.t0);
    // X-launch column is the first Jones column, Y-launch the second.
    o.jones.xx = cx.vx;
    o.jones.yx = cx.vy;
    o.jones.xy = cy.vx;
    o.jones.yy = cy.vy;
    o.delay_est_s = 0.5 * (cx.delay_est + cy.delay_est);
    o.delay_nominal_s = nominal_[rep];
    o.intensity_db = 0.5 * (cx.intensity_db + cy.intensity_db);
    o.snr_db = block_snr_db_[rep];
    o.meas_bandwidth_hz = block_bandwidth_hz_;
    o.flags = block_snr_flags_[rep];
    if (cx.missing || cy.missing) o.flags |= kObsMissing;
    return o;
}

RepeaterObservation Tracker::make_column_only(size_t rep, const Column& c) const {
    RepeaterObservation o;
    o.repeater = static_cast<uint32_t>(rep + 1);
    o.sweep_index = c.sweep_index;
    o.timestamp_s = c.t0;
    o.jones = Jones{cplx{}, cplx{}, cplx{}, cplx{}};
    if (c.launch == LaunchPol::X) {
        o.jones.xx = c.vx;
        o.jones.yx = c.vy;
    } else {
        o.jones.xy = c.vx;
        o.jones.yy = c.vy;
    }
    o.delay_est_s = c.delay_est;
    o.delay_nominal_s = nominal_[rep];
    o.intensity_db = c.intensity_db;
    o.snr_db = block_snr_db_[rep];
    o.meas_bandwidth_hz = block_bandwidth_hz_;
    o.flags = block_snr_flags_[rep] | kObsColumnOnly;
    if (c.missing) o.flags |= kObsMissing;
    return o;
}

}  // namespace ofdr
