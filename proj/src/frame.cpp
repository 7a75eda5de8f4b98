#include "frame.hpp"

#include <array>
#include <cmath>
#include <cstring>

namespace ofdr {

namespace {

// Slice-by-4 CRC-32 (reflected 0xEDB88320, init/final 0xFFFFFFFF).
struct Crc32Tables {
    std::array<std::array<uint32_t, 256>, 4> t;
    Crc32Tables() {
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[0][i] = c;
        }
        for (uint32_t i = 0; i < 256; ++i) {
            t[1][i] = (t[0][i] >> 8) ^ t[0][t[0][i] & 0xff];
            t[2][i] = (t[1][i] >> 8) ^ t[0][t[1][i] & 0xff];
            t[3][i] = (t[2][i] >> 8) ^ t[0][t[2][i] & 0xff];
        }
    }
};

const Crc32Tables& crc_tables() {
    static const Crc32Tables tables;
    return tables;
}

void put_u32(uint8_t* p, uint32_t v) {
    p[0] = static_cast<uint8_t>(v);
    p[1] = static_cast<uint8_t>(v >> 8);
    p[2] = static_cast<uint8_t>(v >> 16);
    p[3] = static_cast<uint8_t>(v >> 24);
}

void put_u64(uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint32_t get_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

constexpr size_t kMaxSampleCount = 1u << 26;  // sanity bound against garbage lengths

}  // namespace

uint32_t crc32(std::span<const uint8_t> data) {
    const auto& t = crc_tables().t;
    uint32_t c = 0xFFFFFFFFu;
    size_t i = 0;
    const size_t n = data.size();
    for (; i + 4 <= n; i += 4) {
        c ^= static_cast<uint32_t>(data[i]) | (static_cast<uint32_t>(data[i + 1]) << 8) |
             (static_cast<uint32_t>(data[i + 2]) << 16) |
             (static_cast<uint32_t>(data[i + 3]) << 24);
        c = t[3][c & 0xff] ^ t[2][(c >> 8) & 0xff] ^ t[1][(c >> 16) & 0xff] ^ t[0][c >> 24];
    }
    for (; i < n; ++i) c = (c >> 8) ^ t[0][(c ^ data[i]) & 0xff];
    return c ^ 0xFFFFFFFFu;
}

std::vector<uint8_t> encode_frame(const SweepCapture& capture, uint64_t sequence) {
    const size_t n = capture.chan_x.size();
    if (capture.chan_y.size() != n) throw StreamError("encode_frame: channel length mismatch");
    if (n > kMaxSampleCount) throw StreamError("encode_frame: sample_count too large");
    const int shift = 16 - capture.adc_bits;

    std::vector<uint8_t> out(kFrameHeaderBytes + 4 * n + 4);
    std::memcpy(out.data(), "OFDR", 4);
    out[4] = kFrameVersion;
    out[5] = capture.launch_pol == LaunchPol::Y ? kFrameFlagPolY : 0;
    put_u64(out.data() + 6, sequence);
    put_u64(out.data() + 14,
            static_cast<uint64_t>(std::llround(capture.t0 * 1e9)));
    put_u64(out.data() + 22, capture.sweep_index);
    put_u32(out.data() + 30, static_cast<uint32_t>(n));
    uint8_t* p = out.data() + kFrameHeaderBytes;
    for (size_t i = 0; i < n; ++i) {
        const auto x = static_cast<uint16_t>(static_cast<int16_t>(capture.chan_x[i] << shift));
        const auto y = static_cast<uint16_t>(static_cast<int16_t>(capture.chan_y[i] << shift));
        p[0] = static_cast<uint8_t>(x);
        p[1] = static_cast<uint8_t>(x >> 8);
        p[2] = static_cast<uint8_t>(y);
        p[3] = static_cast<uint8_t>(y >> 8);
        p += 4;
    }
    const uint32_t c = crc32({out.data(), kFrameHeaderBytes + 4 * n});
    put_u32(out.data() + kFrameHeaderBytes + 4 * n, c);
    return out;
}

namespace {

// Parse one frame from a buffer known to hold the complete frame.
Frame parse_checked(const uint8_t* d, size_t sample_count) {
    Frame f;
    f.version = d[4];
    f.flags = d[5];
    f.sequence = get_u64(d + 6);
    f.timestamp_ns = get_u64(d + 14);
    f.sweep_index = get_u64(d + 22);
    f.payload.resize(2 * sample_count);
    const uint8_t* p = d + kFrameHeaderBytes;
    for (size_t i = 0; i < sample_count; ++i) {
        f.payload[2 * i] = static_cast<int16_t>(
            static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8));
        f.payload[2 * i + 1] = static_cast<int16_t>(
            static_cast<uint16_t>(p[2]) | (static_cast<uint16_t>(p[3]) << 8));
        p += 4;
    }
    return f;
}

}  // namespace

SweepCapture frame_to_capture(const Frame& f, int adc_bits, double full_scale) {
    SweepCapture cap;
    cap.sweep_index = f.sweep_index;
    cap.launch_pol = f.launch_pol();
    cap.t0 = static_cast<double>(f.timestamp_ns) * 1e-9;
    cap.adc_bits = adc_bits;
    cap.full_scale = full_scale;
    const int shift = 16 - adc_bits;
    const size_t n = f.payload.size() / 2;
    cap.chan_x.resize(n);
    cap.chan_y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        cap.chan_x[i] = static_cast<int16_t>(f.payload[2 * i] >> shift);
        cap.chan_y[i] = static_cast<int16_t>(f.payload[2 * i + 1] >> shift);
    }
    return cap;
}

void FrameParser::feed(std::span<const uint8_t> bytes) {
    if (consumed_ > 0 && consumed_ == buf_.size()) {
        buf_.clear();
        consumed_ = 0;
    } else if (consumed_ > (1u << 20)) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<ptrdiff_t>(consumed_));
        consumed_ = 0;
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameParser::next() {
    for (;;) {
        const size_t avail = buf_.size() - consumed_;
        if (avail < kFrameHeaderBytes) return std::nullopt;
        const uint8_t* d = buf_.data() + consumed_;
        if (std::memcmp(d, "OFDR", 4) != 0 || d[4] != kFrameVersion) {
            // Resync: slide forward to the next candidate magic.
            ++consumed_;
            ++resynced_bytes_;
            continue;
        }
        const uint32_t count = get_u32(d + 30);
        if (count > kMaxSampleCount) {
            ++consumed_;
            ++resynced_bytes_;
            continue;
        }
        const size_t total = kFrameHeaderBytes + 4 * static_cast<size_t>(count) + 4;
        if (avail < total) return std::nullopt;
        const uint32_t want = get_u32(d + total - 4);
        const uint32_t got = crc32({d, total - 4});
        consumed_ += total;
        if (want != got) {
            ++rejected_;
            continue;
        }
        return parse_checked(d, count);
    }
}

Frame decode_frame(std::span<const uint8_t> bytes) {
    if (bytes.size() < kFrameHeaderBytes) throw StreamError("decode_frame: need more bytes");
    if (std::memcmp(bytes.data(), "OFDR", 4) != 0)
        throw StreamError("decode_frame: bad magic");
    if (bytes[4] != kFrameVersion) throw StreamError("decode_frame: unsupported version");
    const uint32_t count = get_u32(bytes.data() + 30);
    const size_t total = kFrameHeaderBytes + 4 * static_cast<size_t>(count) + 4;
    if (bytes.size() < total) throw StreamError("decode_frame: need more bytes");
    const uint32_t want = get_u32(bytes.data() + total - 4);
    if (crc32({bytes.data(), total - 4}) != want)
        throw StreamError("decode_frame: CRC mismatch");
    return parse_checked(bytes.data(), count);
}

}  // namespace ofdr
