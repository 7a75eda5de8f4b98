#pragma once

#include <vector>

#include "capture.hpp"
#include "sweep_config.hpp"
#include "types.hpp"

namespace ofdr {

// Complex delay profile of one sweep: bin spacing 1/fs, usable resolution 1/B.
struct ImpulseResponse {
    uint64_t sweep_index = 0;
    LaunchPol launch_pol = LaunchPol::X;
    double t0 = 0.0;
    double bin_spacing_s = 0.0;
    double code_scale = 1.0;  // converts |bin|/N to model units
    std::vector<cplx> ch_x;
    std::vector<cplx> ch_y;

    size_t size() const { return ch_x.size(); }
    // Combined power of both receive polarizations at a bin.
    double power(size_t bin) const { return std::norm(ch_x[bin]) + std::norm(ch_y[bin]); }
};

// Pulse compression: analytic-signal conversion of each real channel followed
// by circular cross-correlation with the reference sweep, both done in the
// transform domain. Output is unnormalized (a full-scale loopback at zero
// delay peaks at N).
class MatchedFilter {
public:
    explicit MatchedFilter(const SweepConfig& cfg);

    ImpulseResponse apply(const SweepCapture& capture) const;

    const SweepConfig& config() const { return cfg_; }

private:
    SweepConfig cfg_;
    size_t n_;
    std::vector<cplx> ref_conj_spectrum_;  // conj(FFT(reference)) * analytic mask
};

}  // namespace ofdr
