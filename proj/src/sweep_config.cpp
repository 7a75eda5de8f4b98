#include "sweep_config.hpp"

#include <cmath>
#include <sstream>

namespace ofdr {

size_t SweepConfig::samples_per_sweep() const {
    return static_cast<size_t>(std::llround(sweep_period_s * sample_rate_hz));
}

void SweepConfig::validate() const {
    std::ostringstream err;
    if (!(sweep_bandwidth_hz > 0)) {
        err << "sweep_bandwidth_hz must be positive (got " << sweep_bandwidth_hz << ")";
        throw ConfigError(err.str());
    }
    if (!(sweep_period_s > 0)) {
        err << "sweep_period_s must be positive (got " << sweep_period_s << ")";
        throw ConfigError(err.str());
    }
    if (!(sample_rate_hz > 0)) {
        err << "sample_rate_hz must be positive (got " << sample_rate_hz << ")";
        throw ConfigError(err.str());
    }
    if (if_center_hz + sweep_bandwidth_hz / 2 >= sample_rate_hz / 2) {
        err << "if_center_hz + sweep_bandwidth_hz/2 must stay below Nyquist: "
            << if_center_hz + sweep_bandwidth_hz / 2 << " >= " << sample_rate_hz / 2;
        throw ConfigError(err.str());
    }
    if (if_center_hz - sweep_bandwidth_hz / 2 <= 0) {
        err << "if_center_hz - sweep_bandwidth_hz/2 must be positive (got "
            << if_center_hz - sweep_bandwidth_hz / 2 << ")";
        throw ConfigError(err.str());
    }
    const double n = sweep_period_s * sample_rate_hz;
    if (std::abs(n - std::round(n)) > 1e-3) {
        err << "sweep_period_s * sample_rate_hz must be an integer number of samples (got " << n
            << "); adjust sweep_period_s";
        throw ConfigError(err.str());
    }
    if (dac_bits < 2 || dac_bits > 16) {
        err << "dac_bits must be in [2, 16] (got " << dac_bits << ")";
        throw ConfigError(err.str());
    }
    if (adc_bits < 2 || adc_bits > 16) {
        err << "adc_bits must be in [2, 16] (got " << adc_bits << ")";
        throw ConfigError(err.str());
    }
    if (guard_band_hz < 0) {
        err << "guard_band_hz must be non-negative (got " << guard_band_hz << ")";
        throw ConfigError(err.str());
    }
}

}  // namespace ofdr
