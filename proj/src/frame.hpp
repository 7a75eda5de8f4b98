#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capture.hpp"

namespace ofdr {

// Wire frame, little-endian throughout:
//   0   magic "OFDR" (4 bytes)
//   4   version u8 (= 1)
//   5   flags u8 (bit0 = launch polarization Y)
//   6   sequence u64
//   14  timestamp_ns u64
//   22  sweep_index u64
//   30  sample_count u32
//   34  payload: sample_count * 4 bytes, per instant [Xrx s16][Yrx s16],
//       ADC codes left-justified to 16 bits
//   end crc32 u32 over header + payload, polynomial 0xEDB88320
inline constexpr uint8_t kFrameVersion = 1;
inline constexpr size_t kFrameHeaderBytes = 34;
inline constexpr uint8_t kFrameFlagPolY = 0x01;

struct Frame {
    uint8_t version = kFrameVersion;
    uint8_t flags = 0;
    uint64_t sequence = 0;
    uint64_t timestamp_ns = 0;
    uint64_t sweep_index = 0;
    std::vector<int16_t> payload;  // interleaved x, y as transported (left-justified)

    uint32_t sample_count() const { return static_cast<uint32_t>(payload.size() / 2); }
    LaunchPol launch_pol() const {
        return (flags & kFrameFlagPolY) ? LaunchPol::Y : LaunchPol::X;
    }
};

uint32_t crc32(std::span<const uint8_t> data);

std::vector<uint8_t> encode_frame(const SweepCapture& capture, uint64_t sequence);

// Reconstruct a capture from a decoded frame. adc_bits and full_scale come
// from the run configuration (they are not transported).
SweepCapture frame_to_capture(const Frame& f, int adc_bits, double full_scale);

// Incremental decoder for a byte stream of frames. Rejected frames (bad CRC)
// and resyncs (bad magic) are counted; the stream stays aligned on whole
// frames whenever the length field is readable.
class FrameParser {
public:
    void feed(std::span<const uint8_t> bytes);

    // Next complete frame, if any.
    std::optional<Frame> next();

    uint64_t rejected() const { return rejected_; }
    uint64_t resynced_bytes() const { return resynced_bytes_; }
    size_t buffered_bytes() const { return buf_.size() - consumed_; }

private:
    std::vector<uint8_t> buf_;
    size_t consumed_ = 0;
    uint64_t rejected_ = 0;
    uint64_t resynced_bytes_ = 0;
};

// One-shot decode; throws StreamError on truncated or invalid input.
Frame decode_frame(std::span<const uint8_t> bytes);

}  // namespace ofdr
