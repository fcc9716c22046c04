// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/*
    Framing: [u32 length L][L bytes: u8 type, payload...]
    All multi-byte integers are big-endian. Strings are u8 length + UTF-8 bytes.

      HELLO       0x01  name:str  role:u8  version:u8
      HELLO_ACK   0x02  accepted:u8  frame_period_us:u32
      ROUND_START 0x03  round_id frames hp_total                          (u32 each)
      FRAME       0x04  round_id frame_id hp_self hp_opp send_ts_us       (u32 each)
      ACTION      0x05  frame_id:u32  action_code:u8  reported_processing_us:u32
      ROUND_END   0x06  round_id hp_self hp_opp elapsed_frames
                        frames_processed frames_skipped                   (u32 each)
      MATCH_END   0x07  rounds:u32
*/

namespace frameguard::protocol {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4;
inline constexpr std::uint32_t kMaxFrameLength = 65536;
inline constexpr std::size_t kMaxNameBytes = 64;

enum class MessageType : std::uint8_t {
    Hello = 0x01,
    HelloAck = 0x02,
    RoundStart = 0x03,
    Frame = 0x04,
    Action = 0x05,
    RoundEnd = 0x06,
    MatchEnd = 0x07,
};

enum class Role : std::uint8_t { Sandbox = 0, Player = 1 };

struct Hello {
    std::string name;
    Role role = Role::Player;
    std::uint8_t version = kVersion;
    bool operator==(const Hello&) const = default;
};

struct HelloAck {
    bool accepted = false;
    std::uint32_t frame_period_us = 0;
    bool operator==(const HelloAck&) const = default;
};

struct RoundStart {
    std::uint32_t round_id = 0;
    std::uint32_t frames = 0;
    std::uint32_t hp_total = 0;
    bool operator==(const RoundStart&) const = default;
};

struct Frame {
    std::uint32_t round_id = 0;
    std::uint32_t frame_id = 0;
    std::uint32_t hp_self = 0;
    std::uint32_t hp_opp = 0;
    std::uint32_t send_ts_us = 0;  // diagnostic only, server clock, wraps
    bool operator==(const Frame&) const = default;
};

struct Action {
    std::uint32_t frame_id = 0;
    std::uint8_t action_code = 0;
    std::uint32_t reported_processing_us = 0;
    bool operator==(const Action&) const = default;
};

struct RoundEnd {
    std::uint32_t round_id = 0;
    std::uint32_t hp_self = 0;
    std::uint32_t hp_opp = 0;
    std::uint32_t elapsed_frames = 0;
    std::uint32_t frames_processed = 0;
    std::uint32_t frames_skipped = 0;
    bool operator==(const RoundEnd&) const = default;
};

struct MatchEnd {
    std::uint32_t rounds = 0;
    bool operator==(const MatchEnd&) const = default;
};

using Message = std::variant<Hello, HelloAck, RoundStart, Frame, Action, RoundEnd, MatchEnd>;

MessageType type_of(const Message& msg) noexcept;
std::string_view type_name(MessageType type) noexcept;

/// Appends one framed message to `out`. Throws EncodeError if a field does not fit.
void encode_into(const Message& msg, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> encode(const Message& msg);

struct Decoded {
    Message message;
    std::size_t consumed = 0;
};

/// Decodes the first frame in `bytes`. Returns nullopt when more bytes are needed
/// (nothing is consumed). Throws ProtocolError on an unknown type, a declared length
/// above kMaxFrameLength, or a payload that does not match its type's layout.
std::optional<Decoded> decode(std::span<const std::uint8_t> bytes);

/// Accumulates stream bytes and yields complete messages in order. Single owner.
class StreamDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Message> next();
    std::size_t buffered() const noexcept { return buf_.size() - head_; }

private:
    std::vector<std::uint8_t> buf_;
    std::size_t head_ = 0;
};

bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace frameguard::protocol
