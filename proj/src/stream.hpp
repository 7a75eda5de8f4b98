#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "frame.hpp"

namespace ofdr {

// "host:port"; OFDR_STREAM_PORT overrides the port when set.
struct Endpoint {
    std::string host = "127.0.0.1";
    uint16_t port = 0;

    static Endpoint parse(const std::string& s);
};

struct GapReport {
    std::vector<uint64_t> missing_sequences;
    uint64_t received = 0;
    uint64_t rejects = 0;
    bool connection_lost = false;
};

// Frame producer over one TCP connection. Blocking sends give natural
// backpressure: when the consumer stalls, the source callback stalls too.
class StreamServer {
public:
    explicit StreamServer(const Endpoint& ep);
    ~StreamServer();

    uint16_t port() const { return port_; }

    // Accepts one connection, then pulls captures from the source until it
    // returns nullopt. Returns frames sent.
    uint64_t serve(const std::function<std::optional<SweepCapture>()>& source);

    void stop();

private:
    int listen_fd_ = -1;
    std::atomic<bool> stop_{false};
    uint16_t port_ = 0;
};

// Ordered consumer with gap detection and a bounded frame queue. The reader
// thread blocks when the queue fills, which backpressures the producer through
// TCP flow control.
class StreamConsumer {
public:
    explicit StreamConsumer(const Endpoint& ep, size_t max_queued_frames = 16);
    ~StreamConsumer();

    // Next capture in arrival order; nullopt at end of stream. Missing
    // sequences are recorded, never silently skipped.
    std::optional<Frame> next_frame();

    GapReport gap_report() const;

private:
    void reader_loop();

    int fd_ = -1;
    size_t max_queue_;
    mutable std::mutex mu_;
    std::condition_variable cv_pop_, cv_push_;
    std::deque<Frame> queue_;
    bool done_ = false;
    std::optional<uint64_t> last_sequence_;
    GapReport report_;
    std::thread reader_;
};

}  // namespace ofdr
