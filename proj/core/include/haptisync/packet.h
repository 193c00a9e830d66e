#ifndef HAPTISYNC_PACKET_H_
#define HAPTISYNC_PACKET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "haptisync/haptic.h"
#include "haptisync/vision.h"

namespace haptisync {

// Wire layout, big-endian:
//   magic 'H' 'V' | version u8 | stream_id u8 | seq u32 | payload_len u16 |
//   payload
// Haptic payload: fx, fy, fz as float32.
// Visual payload: frame_index u32 | box_count u8 | per box: label u8,
// x, y, w, h as float32.
inline constexpr uint8_t kPacketMagic0 = 0x48;
inline constexpr uint8_t kPacketMagic1 = 0x56;
inline constexpr uint8_t kPacketVersion = 1;
inline constexpr size_t kPacketHeaderSize = 10;
inline constexpr size_t kMaxPayloadSize = 65500;
inline constexpr size_t kHapticPayloadSize = 12;
inline constexpr size_t kBoxRecordSize = 17;

enum class StreamId : uint8_t { kHaptic = 0, kVisual = 1 };

struct Packet {
  StreamId stream = StreamId::kHaptic;
  uint32_t seq = 0;
  std::vector<uint8_t> payload;

  bool operator==(const Packet&) const = default;
};

// Throws InputError when the payload is too large.
std::vector<uint8_t> EncodePacket(const Packet& p);
// Throws DecodeError.
Packet DecodePacket(std::span<const uint8_t> bytes);

// Label codes: "ball" = 0, "box" = 1, "obj<N>" = N for N in [2, 255].
uint8_t LabelCode(const std::string& label);
std::string LabelName(uint8_t code);

struct HapticForce {
  float fx = 0.0f;
  float fy = 0.0f;
  float fz = 0.0f;

  bool operator==(const HapticForce&) const = default;
};

std::vector<uint8_t> EncodeHapticPayload(const HapticSample& s);
HapticForce DecodeHapticPayload(std::span<const uint8_t> payload);

struct VisualPayload {
  uint32_t frame_index = 0;
  std::vector<BoundingBox> boxes;  // float32 precision
};

std::vector<uint8_t> EncodeVisualPayload(const VideoFrame& frame);
VisualPayload DecodeVisualPayload(std::span<const uint8_t> payload);

}  // namespace haptisync

#endif  // HAPTISYNC_PACKET_H_
