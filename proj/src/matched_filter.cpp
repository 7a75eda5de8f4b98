#include "matched_filter.hpp"

#include "fft.hpp"
#include "waveform.hpp"

namespace ofdr {

MatchedFilter::MatchedFilter(const SweepConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    n_ = cfg_.samples_per_sweep();
    const ProbeWaveform ref = generate_sweep(cfg_, 0);
    std::vector<cplx> spec(ref.samples);
    fft_forward(spec);
    ref_conj_spectrum_.resize(n_);
    // Analytic-signal mask folded into the reference spectrum: positive
    // frequencies doubled, negative zeroed, DC and Nyquist kept as-is.
    for (size_t k = 0; k < n_; ++k) {
        double mask;
        if (k == 0 || (n_ % 2 == 0 && k == n_ / 2))
            mask = 1.0;
        else if (k < (n_ + 1) / 2)
            mask = 2.0;
        else
            mask = 0.0;
        ref_conj_spectrum_[k] = std::conj(spec[k]) * mask;
    }
}

ImpulseResponse MatchedFilter::apply(const SweepCapture& capture) const {
    if (capture.chan_x.size() != n_ || capture.chan_y.size() != n_)
        throw ConfigError("matched_filter: capture length does not match configuration");

    ImpulseResponse ir;
    ir.sweep_index = capture.sweep_index;
    ir.launch_pol = capture.launch_pol;
    ir.t0 = capture.t0;
    ir.bin_spacing_s = 1.0 / cfg_.sample_rate_hz;
    ir.code_scale = capture.code_scale();

    std::vector<cplx> work(n_);
    auto run_channel = [&](const std::vector<int16_t>& chan, std::vector<cplx>& out) {
        for (size_t i = 0; i < n_; ++i) work[i] = cplx{static_cast<double>(chan[i]), 0.0};
        fft_forward(work);
        for (size_t k = 0; k < n_; ++k) work[k] *= ref_conj_spectrum_[k];
        out.resize(n_);
        fft_inverse(work.data(), out.data(), n_);
    };
    run_channel(capture.chan_x, ir.ch_x);
    run_channel(capture.chan_y, ir.ch_y);
    return ir;
}

}  // namespace ofdr
