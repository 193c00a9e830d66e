#ifndef HAPTISYNC_TRANSPORT_H_
#define HAPTISYNC_TRANSPORT_H_

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "haptisync/haptic.h"
#include "haptisync/vision.h"

namespace haptisync {

enum class TransportKind { kNone, kInProcess, kUdpLoopback };

const char* ToString(TransportKind kind);
TransportKind ParseTransportKind(const std::string& name);

// Ordered datagram channel.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void Send(std::span<const uint8_t> datagram) = 0;
  // Next datagram, or nullopt if none is pending.
  virtual std::optional<std::vector<uint8_t>> Receive() = 0;
};

class InProcessChannel : public Channel {
 public:
  void Send(std::span<const uint8_t> datagram) override;
  std::optional<std::vector<uint8_t>> Receive() override;

 private:
  std::deque<std::vector<uint8_t>> queue_;
};

// A pair of UDP sockets bound to 127.0.0.1. Receive() waits up to
// timeout_ms for a datagram.
class UdpLoopbackChannel : public Channel {
 public:
  // Throws Error when the sockets cannot be set up.
  explicit UdpLoopbackChannel(int timeout_ms = 1000);
  ~UdpLoopbackChannel() override;
  UdpLoopbackChannel(const UdpLoopbackChannel&) = delete;
  UdpLoopbackChannel& operator=(const UdpLoopbackChannel&) = delete;

  void Send(std::span<const uint8_t> datagram) override;
  std::optional<std::vector<uint8_t>> Receive() override;

 private:
  int send_fd_ = -1;
  int recv_fd_ = -1;
  int timeout_ms_;
};

// Creates a channel of the requested kind. A UDP setup failure logs a warning
// and falls back to the in-process channel; `fell_back` reports it.
std::unique_ptr<Channel> MakeChannel(TransportKind kind, bool* fell_back);

struct DeliveredStreams {
  HapticTrace haptic;
  std::vector<ReceivedFrame> frames;
};

// Packetizes both streams, pushes them through `channel` and rebuilds them
// on the receiving side. Packets carry no timestamps: haptic times come from
// sequence numbers and the haptic rate, visual playback times from the frame
// index and frame rate, and arrival times from the simulated clock.
DeliveredStreams TransmitStreams(const HapticTrace& haptic,
                                 std::span<const ReceivedFrame> frames,
                                 double frame_rate_hz, Channel& channel);

}  // namespace haptisync

#endif  // HAPTISYNC_TRANSPORT_H_
