#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace ofdr {

// One sweep period of digitized two-channel heterodyne data. Channels hold raw
// ADC codes; full_scale/2^(adc_bits-1) converts one code step back to model
// units (unit launch amplitude).
struct SweepCapture {
    uint64_t sweep_index = 0;
    LaunchPol launch_pol = LaunchPol::X;
    double t0 = 0.0;
    std::vector<int16_t> chan_x;
    std::vector<int16_t> chan_y;
    int adc_bits = 14;
    double full_scale = 1.0;
    uint64_t clipped = 0;

    double code_scale() const {
        return full_scale / static_cast<double>(int64_t{1} << (adc_bits - 1));
    }
};

}  // namespace ofdr
