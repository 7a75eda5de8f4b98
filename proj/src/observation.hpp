#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "types.hpp"

namespace ofdr {

// Observation flags.
enum ObsFlag : uint32_t {
    kObsMissing = 1u << 0,        // expected peak absent above the floor
    kObsColumnOnly = 1u << 1,     // partner sweep missing, single Jones column
    kObsLowConfidence = 1u << 2,  // SNR estimated from < 100 clean noise bins
    kObsSnrClamped = 1u << 3,     // noiseless floor, SNR clamped
    kObsGapBefore = 1u << 4,      // sweep gap preceded this record
};

// Per repeater, per sweep pair: full Jones matrix, refined delay, intensity and
// SNR. Column-only records (partner sweep missing) carry the available column
// and the kObsColumnOnly flag; x/y denote the launch of the column they came from.
struct RepeaterObservation {
    uint32_t repeater = 0;       // 1-based
    uint64_t sweep_index = 0;    // X-launch sweep of the pair
    double timestamp_s = 0.0;    // midpoint of the two sweeps
    Jones jones;
    double delay_est_s = 0.0;
    double delay_nominal_s = 0.0;
    double intensity_db = 0.0;
    double snr_db = 0.0;
    double meas_bandwidth_hz = 0.0;
    uint32_t flags = 0;
};

// JSON-lines codec: one record per line.
std::string observation_to_json(const RepeaterObservation& o);
RepeaterObservation observation_from_json(const std::string& line);

// Fixed 96-byte little-endian record. Layout:
//   0   u64  sweep_index
//   8   f64  timestamp_s
//   16  u32  repeater
//   20  u32  flags
//   24  f32  jones xx.re xx.im xy.re xy.im yx.re yx.im yy.re yy.im
//   56  f64  delay_est_s
//   64  f64  delay_nominal_s
//   72  f32  intensity_db
//   76  f32  snr_db
//   80  f32  meas_bandwidth_hz
//   84  f32  reserved (0)
//   88  u64  reserved (0)
inline constexpr size_t kObservationRecordBytes = 96;

void observation_to_binary(const RepeaterObservation& o, uint8_t out[kObservationRecordBytes]);
RepeaterObservation observation_from_binary(const uint8_t in[kObservationRecordBytes]);

enum class ObservationFormat : uint8_t { JsonLines, Binary };

void write_observations(std::ostream& os, const std::vector<RepeaterObservation>& obs,
                        ObservationFormat fmt);
std::vector<RepeaterObservation> read_observations(std::istream& is, ObservationFormat fmt);
std::vector<RepeaterObservation> read_observations_file(const std::string& path);

}  // namespace ofdr
