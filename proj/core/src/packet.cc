#include "haptisync/packet.h"

#include <bit>
#include <charconv>
#include <cmath>

#include "haptisync/error.h"

namespace haptisync {

namespace {

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

void PutF32(std::vector<uint8_t>& out, double v) {
  PutU32(out, std::bit_cast<uint32_t>(static_cast<float>(v)));
}

uint16_t GetU16(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint16_t>((b[at] << 8) | b[at + 1]);
}

uint32_t GetU32(std::span<const uint8_t> b, size_t at) {
  return (uint32_t{b[at]} << 24) | (uint32_t{b[at + 1]} << 16) |
         (uint32_t{b[at + 2]} << 8) | uint32_t{b[at + 3]};
}

float GetF32(std::span<const uint8_t> b, size_t at) {
  return std::bit_cast<float>(GetU32(b, at));
}

}  // namespace

std::vector<uint8_t> EncodePacket(const Packet& p) {
  if (p.payload.size() > kMaxPayloadSize) {
    throw InputError("payload of " + std::to_string(p.payload.size()) +
                     " bytes exceeds the limit");
  }
  std::vector<uint8_t> out;
  out.reserve(kPacketHeaderSize + p.payload.size());
  out.push_back(kPacketMagic0);
  out.push_back(kPacketMagic1);
  out.push_back(kPacketVersion);
  out.push_back(static_cast<uint8_t>(p.stream));
  PutU32(out, p.seq);
  PutU16(out, static_cast<uint16_t>(p.payload.size()));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

Packet DecodePacket(std::span<const uint8_t> bytes) {
  using Kind = DecodeError::Kind;
  if ((bytes.size() >= 1 && bytes[0] != kPacketMagic0) ||
      (bytes.size() >= 2 && bytes[1] != kPacketMagic1)) {
    throw DecodeError(Kind::kBadMagic, "bad magic");
  }
  if (bytes.size() < kPacketHeaderSize) {
    throw DecodeError(Kind::kTruncated, "truncated header");
  }
  if (bytes[2] != kPacketVersion) {
    throw DecodeError(Kind::kBadVersion,
                      "unsupported version " + std::to_string(bytes[2]));
  }
  if (bytes[3] > static_cast<uint8_t>(StreamId::kVisual)) {
    throw DecodeError(Kind::kUnknownStream,
                      "unknown stream id " + std::to_string(bytes[3]));
  }
  const size_t len = GetU16(bytes, 8);
  const size_t have = bytes.size() - kPacketHeaderSize;
  if (have < len) throw DecodeError(Kind::kTruncated, "truncated payload");
  if (have > len) {
    throw DecodeError(Kind::kBadPayload, "trailing bytes after payload");
  }
  Packet p;
  p.stream = static_cast<StreamId>(bytes[3]);
  p.seq = GetU32(bytes, 4);
  p.payload.assign(bytes.begin() + kPacketHeaderSize, bytes.end());
  return p;
}

uint8_t LabelCode(const std::string& label) {
  if (label == "ball") return 0;
  if (label == "box") return 1;
  if (label.size() > 3 && label.compare(0, 3, "obj") == 0) {
    unsigned v = 0;
    const char* first = label.data() + 3;
    const char* last = label.data() + label.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last && v >= 2 && v <= 255 &&
        LabelName(static_cast<uint8_t>(v)) == label) {
      return static_cast<uint8_t>(v);
    }
  }
  throw InputError("label '" + label + "' has no wire code");
}

std::string LabelName(uint8_t code) {
  if (code == 0) return "ball";
  if (code == 1) return "box";
  return "obj" + std::to_string(code);
}

std::vector<uint8_t> EncodeHapticPayload(const HapticSample& s) {
  std::vector<uint8_t> out;
  out.reserve(kHapticPayloadSize);
  PutF32(out, s.fx);
  PutF32(out, s.fy);
  PutF32(out, s.fz);
  return out;
}

HapticForce DecodeHapticPayload(std::span<const uint8_t> payload) {
  if (payload.size() != kHapticPayloadSize) {
    throw DecodeError(DecodeError::Kind::kBadPayload, "haptic payload must be 12 bytes");
  }
  return {GetF32(payload, 0), GetF32(payload, 4), GetF32(payload, 8)};
}

std::vector<uint8_t> EncodeVisualPayload(const VideoFrame& frame) {
  if (frame.index < 0 || frame.index > int64_t{UINT32_MAX}) {
    throw InputError("frame index does not fit the wire format");
  }
  if (frame.objects.size() > 255) throw InputError("too many boxes in one frame");
  std::vector<uint8_t> out;
  out.reserve(5 + kBoxRecordSize * frame.objects.size());
  PutU32(out, static_cast<uint32_t>(frame.index));
  out.push_back(static_cast<uint8_t>(frame.objects.size()));
  for (const BoundingBox& b : frame.objects) {
    out.push_back(LabelCode(b.label));
    PutF32(out, b.x);
    PutF32(out, b.y);
    PutF32(out, b.w);
    PutF32(out, b.h);
  }
  return out;
}

VisualPayload DecodeVisualPayload(std::span<const uint8_t> payload) {
  using Kind = DecodeError::Kind;
  if (payload.size() < 5) throw DecodeError(Kind::kBadPayload, "visual payload too short");
  VisualPayload v;
  v.frame_index = GetU32(payload, 0);
  const size_t count = payload[4];
  if (payload.size() != 5 + kBoxRecordSize * count) {
    throw DecodeError(Kind::kBadPayload, "visual payload length does not match box count");
  }
  for (size_t i = 0; i < count; ++i) {
    const size_t at = 5 + kBoxRecordSize * i;
    v.boxes.push_back(BoundingBox{GetF32(payload, at + 1), GetF32(payload, at + 5),
                                  GetF32(payload, at + 9), GetF32(payload, at + 13),
                                  LabelName(payload[at])});
  }
  return v;
}

}  // namespace haptisync
