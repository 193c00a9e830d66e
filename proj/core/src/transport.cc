#include "haptisync/transport.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <spdlog/spdlog.h>

#include "haptisync/error.h"
#include "haptisync/packet.h"

namespace haptisync {

const char* ToString(TransportKind kind) {
  switch (kind) {
    case TransportKind::kNone:
      return "none";
    case TransportKind::kInProcess:
      return "in_process";
    case TransportKind::kUdpLoopback:
      return "udp_loopback";
  }
  return "unknown";
}

TransportKind ParseTransportKind(const std::string& name) {
  if (name == "none") return TransportKind::kNone;
  if (name == "in_process") return TransportKind::kInProcess;
  if (name == "udp_loopback" || name == "udp") return TransportKind::kUdpLoopback;
  throw ConfigError("unknown transport '" + name + "'");
}

void InProcessChannel::Send(std::span<const uint8_t> datagram) {
  queue_.emplace_back(datagram.begin(), datagram.end());
}

std::optional<std::vector<uint8_t>> InProcessChannel::Receive() {
  if (queue_.empty()) return std::nullopt;
  std::vector<uint8_t> d = std::move(queue_.front());
  queue_.pop_front();
  return d;
}

UdpLoopbackChannel::UdpLoopbackChannel(int timeout_ms) : timeout_ms_(timeout_ms) {
  auto fail = [this](const std::string& what) {
    const std::string msg = what + ": " + std::strerror(errno);
    if (send_fd_ >= 0) ::close(send_fd_);
    if (recv_fd_ >= 0) ::close(recv_fd_);
    send_fd_ = recv_fd_ = -1;
    throw Error(msg);
  };
  recv_fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (recv_fd_ < 0) fail("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(recv_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) fail("bind");
  socklen_t len = sizeof(addr);
  if (::getsockname(recv_fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
    fail("getsockname");
  }
  send_fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (send_fd_ < 0) fail("socket");
  if (::connect(send_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    fail("connect");
  }
}

UdpLoopbackChannel::~UdpLoopbackChannel() {
  if (send_fd_ >= 0) ::close(send_fd_);
  if (recv_fd_ >= 0) ::close(recv_fd_);
}

void UdpLoopbackChannel::Send(std::span<const uint8_t> datagram) {
  const ssize_t n = ::send(send_fd_, datagram.data(), datagram.size(), 0);
  if (n != static_cast<ssize_t>(datagram.size())) {
    throw Error(std::string("send: ") + std::strerror(errno));
  }
}

std::optional<std::vector<uint8_t>> UdpLoopbackChannel::Receive() {
  pollfd pfd{recv_fd_, POLLIN, 0};
  const int r = ::poll(&pfd, 1, timeout_ms_);
  if (r <= 0) return std::nullopt;
  std::vector<uint8_t> buf(kPacketHeaderSize + kMaxPayloadSize + 1);
  const ssize_t n = ::recv(recv_fd_, buf.data(), buf.size(), 0);
  if (n < 0) throw Error(std::string("recv: ") + std::strerror(errno));
  buf.resize(static_cast<size_t>(n));
  return buf;
}

std::unique_ptr<Channel> MakeChannel(TransportKind kind, bool* fell_back) {
  if (fell_back) *fell_back = false;
  if (kind == TransportKind::kUdpLoopback) {
    try {
      return std::make_unique<UdpLoopbackChannel>();
    } catch (const Error& e) {
      spdlog::warn("loopback socket unavailable ({}); using in-process channel",
                   e.what());
      if (fell_back) *fell_back = true;
    }
  }
  return std::make_unique<InProcessChannel>();
}

namespace {

Packet RoundTrip(Channel& channel, const Packet& p) {
  channel.Send(EncodePacket(p));
  std::optional<std::vector<uint8_t>> d = channel.Receive();
  if (!d) throw Error("datagram " + std::to_string(p.seq) + " was not delivered");
  return DecodePacket(*d);
}

}  // namespace

DeliveredStreams TransmitStreams(const HapticTrace& haptic,
                                 std::span<const ReceivedFrame> frames,
                                 double frame_rate_hz, Channel& channel) {
  if (!(frame_rate_hz > 0.0)) throw ConfigError("frame rate must be positive");
  DeliveredStreams out;
  out.haptic.rate_hz = haptic.rate_hz;
  out.haptic.samples.reserve(haptic.size());
  int64_t last_seq = -1;
  for (size_t i = 0; i < haptic.size(); ++i) {
    const Packet p = RoundTrip(
        channel, Packet{StreamId::kHaptic, static_cast<uint32_t>(i),
                        EncodeHapticPayload(haptic.samples[i])});
    if (p.stream != StreamId::kHaptic || int64_t{p.seq} <= last_seq) {
      throw InputError("haptic datagrams out of sequence");
    }
    last_seq = p.seq;
    const HapticForce f = DecodeHapticPayload(p.payload);
    out.haptic.samples.push_back(
        HapticSample{double(p.seq) / haptic.rate_hz, f.fx, f.fy, f.fz});
  }

  last_seq = -1;
  uint32_t seq = 0;
  out.frames.reserve(frames.size());
  for (const ReceivedFrame& rf : frames) {
    // The simulated clock reads the scheduled arrival when the datagram lands.
    const double clock_ms = rf.arrival_ms;
    const Packet p = RoundTrip(
        channel, Packet{StreamId::kVisual, seq++, EncodeVisualPayload(rf.frame)});
    if (p.stream != StreamId::kVisual || int64_t{p.seq} <= last_seq) {
      throw InputError("visual datagrams out of sequence");
    }
    last_seq = p.seq;
    VisualPayload v = DecodeVisualPayload(p.payload);
    ReceivedFrame got;
    got.frame.index = v.frame_index;
    got.frame.t = double(v.frame_index) / frame_rate_hz;
    got.frame.width = rf.frame.width;
    got.frame.height = rf.frame.height;
    got.frame.objects = std::move(v.boxes);
    got.arrival_ms = clock_ms;
    out.frames.push_back(std::move(got));
  }
  return out;
}

}  // namespace haptisync
