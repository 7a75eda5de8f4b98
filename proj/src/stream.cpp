#include "stream.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>

namespace ofdr {

Endpoint Endpoint::parse(const std::string& s) {
    Endpoint ep;
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw StreamError("endpoint must be host:port, got " + s);
    ep.host = s.substr(0, colon);
    if (ep.host.empty()) ep.host = "127.0.0.1";
    ep.port = static_cast<uint16_t>(std::stoul(s.substr(colon + 1)));
    if (const char* env = std::getenv("OFDR_STREAM_PORT"); env && *env)
        ep.port = static_cast<uint16_t>(std::stoul(env));
    return ep;
}

namespace {

sockaddr_in make_addr(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
        throw StreamError("invalid host address: " + ep.host);
    return addr;
}

bool send_all(int fd, const uint8_t* data, size_t len) {
    while (len > 0) {
        const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
        if (n <= 0) return false;
        data += n;
        len -= static_cast<size_t>(n);
    }
    return true;
}

}  // namespace

StreamServer::StreamServer(const Endpoint& ep) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw StreamError("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_addr(ep);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw StreamError("bind() failed on " + ep.host + ":" + std::to_string(ep.port));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    if (::listen(listen_fd_, 1) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw StreamError("listen() failed");
    }
}

StreamServer::~StreamServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void StreamServer::stop() { stop_.store(true); }

uint64_t StreamServer::serve(const std::function<std::optional<SweepCapture>()>& source) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) throw StreamError("accept() failed");
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

    uint64_t sent = 0;
    uint64_t sequence = 0;
    while (!stop_.load(std::memory_order_relaxed)) {
        auto cap = source();
        if (!cap) break;
        const auto bytes = encode_frame(*cap, sequence++);
        if (!send_all(fd, bytes.data(), bytes.size())) break;
        ++sent;
    }
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
    return sent;
}

StreamConsumer::StreamConsumer(const Endpoint& ep, size_t max_queued_frames)
    : max_queue_(std::max<size_t>(1, max_queued_frames)) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw StreamError("socket() failed");
    sockaddr_in addr = make_addr(ep);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw StreamError("connect() failed to " + ep.host + ":" + std::to_string(ep.port));
    }
    reader_ = std::thread([this] { reader_loop(); });
}

StreamConsumer::~StreamConsumer() {
    {
        std::lock_guard<std::mutex> lock(mu_);
        done_ = true;
        queue_.clear();
        cv_push_.notify_all();
    }
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    if (fd_ >= 0) ::close(fd_);
}

void StreamConsumer::reader_loop() {
    FrameParser parser;
    std::vector<uint8_t> buf(1 << 16);
    bool clean_end = false;
    for (;;) {
        const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
        if (n == 0) {
            clean_end = true;
            break;
        }
        if (n < 0) break;
        parser.feed({buf.data(), static_cast<size_t>(n)});
        while (auto f = parser.next()) {
            std::unique_lock<std::mutex> lock(mu_);
            cv_push_.wait(lock, [this] { return queue_.size() < max_queue_ || done_; });
            if (done_) return;
            // Sequence accounting: missing numbers become gap entries.
            if (last_sequence_) {
                for (uint64_t s = *last_sequence_ + 1; s < f->sequence; ++s)
                    report_.missing_sequences.push_back(s);
            } else if (f->sequence != 0) {
                for (uint64_t s = 0; s < f->sequence; ++s)
                    report_.missing_sequences.push_back(s);
            }
            last_sequence_ = f->sequence;
            ++report_.received;
            queue_.push_back(std::move(*f));
            cv_pop_.notify_one();
        }
        {
            std::lock_guard<std::mutex> lock(mu_);
            report_.rejects = parser.rejected();
        }
    }
    std::lock_guard<std::mutex> lock(mu_);
    report_.rejects = parser.rejected();
    // Unparsed leftovers mean the connection died mid-frame.
    if (!clean_end || parser.buffered_bytes() > 0) report_.connection_lost = !clean_end;
    done_ = true;
    cv_pop_.notify_all();
}

std::optional<Frame> StreamConsumer::next_frame() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_pop_.wait(lock, [this] { return !queue_.empty() || done_; });
    if (queue_.empty()) return std::nullopt;
    Frame f = std::move(queue_.front());
    queue_.pop_front();
    cv_push_.notify_one();
    return f;
}

GapReport StreamConsumer::gap_report() const {
    std::lock_guard<std::mutex> lock(mu_);
    return report_;
}

}  // namespace ofdr
