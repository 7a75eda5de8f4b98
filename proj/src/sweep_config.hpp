#pragma once

#include <cstddef>
#include <cstdint>

#include "types.hpp"

namespace ofdr {

enum class PolScheme : uint8_t { TimeInterleaved = 0 };

// Probe and converter parameters. Defaults are the desk-scale operating point;
// the full-scale system values (2 GS/s, 500 MHz IF, 125 MHz sweep) are
// expressible through the same fields.
struct SweepConfig {
    double sample_rate_hz = 50e6;
    double if_center_hz = 15e6;
    double sweep_bandwidth_hz = 10e6;
    double sweep_period_s = 1e-3;
    int dac_bits = 14;
    int adc_bits = 14;
    PolScheme pol_scheme = PolScheme::TimeInterleaved;
    double guard_band_hz = 1e6;

    // Sweep rate, Hz per second.
    double sweep_rate() const { return sweep_bandwidth_hz / sweep_period_s; }

    size_t samples_per_sweep() const;

    // Throws ConfigError naming the violated invariant.
    void validate() const;
};

}  // namespace ofdr
