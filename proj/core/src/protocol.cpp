// SPDX-License-Identifier: Apache-2.0
#include "frameguard/protocol.hpp"

#include "frameguard/errors.hpp"

#include <string>

namespace frameguard::protocol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at)
{
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
           std::uint32_t{b[at + 3]};
}

// Reads fields sequentially from one payload; the caller has checked the total size.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> payload) : p_(payload) {}

    std::uint8_t u8() { return p_[pos_++]; }
    std::uint32_t u32()
    {
        auto v = get_u32(p_, pos_);
        pos_ += 4;
        return v;
    }
    std::string str(std::size_t n)
    {
        std::string s(reinterpret_cast<const char*>(p_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> p_;
    std::size_t pos_ = 0;
};

// Payload size after the type byte, for fixed-layout types.
constexpr std::size_t fixed_payload(MessageType t)
{
    switch (t) {
    case MessageType::HelloAck: return 1 + 4;
    case MessageType::RoundStart: return 3 * 4;
    case MessageType::Frame: return 5 * 4;
    case MessageType::Action: return 4 + 1 + 4;
    case MessageType::RoundEnd: return 6 * 4;
    case MessageType::MatchEnd: return 4;
    case MessageType::Hello: return 0;
    }
    return 0;
}

bool known_type(std::uint8_t b) { return b >= 0x01 && b <= 0x07; }

std::string hex_byte(std::uint8_t b)
{
    constexpr char digits[] = "0123456789ABCDEF";
    return std::string{digits[b >> 4], digits[b & 0xF]};
}

void check_length(std::size_t got, std::size_t want, MessageType t)
{
    if (got != want)
        throw ProtocolError(std::string(type_name(t)) + " payload is " + std::to_string(got) + " bytes, expected " +
                            std::to_string(want));
}

Message decode_payload(MessageType t, std::span<const std::uint8_t> payload)
{
    if (t == MessageType::Hello) {
        if (payload.empty())
            throw ProtocolError("HELLO payload is empty");
        const std::size_t name_len = payload[0];
        check_length(payload.size(), 1 + name_len + 2, t);
        if (name_len > kMaxNameBytes)
            throw ProtocolError("HELLO name is " + std::to_string(name_len) + " bytes, limit 64");
        Reader r(payload.subspan(1));
        Hello h;
        h.name = r.str(name_len);
        if (!is_valid_utf8(h.name))
            throw ProtocolError("HELLO name is not valid UTF-8");
        const auto role = r.u8();
        if (role > 1)
            throw ProtocolError("HELLO role byte " + std::to_string(role) + " is not 0 or 1");
        h.role = static_cast<Role>(role);
        h.version = r.u8();
        return h;
    }

    check_length(payload.size(), fixed_payload(t), t);
    Reader r(payload);
    switch (t) {
    case MessageType::HelloAck: {
        const auto accepted = r.u8();
        if (accepted > 1)
            throw ProtocolError("HELLO_ACK accepted byte " + std::to_string(accepted) + " is not 0 or 1");
        HelloAck a;
        a.accepted = accepted == 1;
        a.frame_period_us = r.u32();
        return a;
    }
    case MessageType::RoundStart: {
        RoundStart m;
        m.round_id = r.u32();
        m.frames = r.u32();
        m.hp_total = r.u32();
        return m;
    }
    case MessageType::Frame: {
        Frame m;
        m.round_id = r.u32();
        m.frame_id = r.u32();
        m.hp_self = r.u32();
        m.hp_opp = r.u32();
        m.send_ts_us = r.u32();
        return m;
    }
    case MessageType::Action: {
        Action m;
        m.frame_id = r.u32();
        m.action_code = r.u8();
        m.reported_processing_us = r.u32();
        return m;
    }
    case MessageType::RoundEnd: {
        RoundEnd m;
        m.round_id = r.u32();
        m.hp_self = r.u32();
        m.hp_opp = r.u32();
        m.elapsed_frames = r.u32();
        m.frames_processed = r.u32();
        m.frames_skipped = r.u32();
        return m;
    }
    case MessageType::MatchEnd: {
        MatchEnd m;
        m.rounds = r.u32();
        return m;
    }
    case MessageType::Hello: break;
    }
    throw ProtocolError("unreachable message type");
}

}  // namespace

MessageType type_of(const Message& msg) noexcept
{
    return static_cast<MessageType>(msg.index() + 1);
}

std::string_view type_name(MessageType type) noexcept
{
    switch (type) {
    case MessageType::Hello: return "HELLO";
    case MessageType::HelloAck: return "HELLO_ACK";
    case MessageType::RoundStart: return "ROUND_START";
    case MessageType::Frame: return "FRAME";
    case MessageType::Action: return "ACTION";
    case MessageType::RoundEnd: return "ROUND_END";
    case MessageType::MatchEnd: return "MATCH_END";
    }
    return "UNKNOWN";
}

void encode_into(const Message& msg, std::vector<std::uint8_t>& out)
{
    const std::size_t start = out.size();
    put_u32(out, 0);  // length, patched below
    put_u8(out, static_cast<std::uint8_t>(type_of(msg)));

    std::visit(overloaded{
                   [&](const Hello& m) {
                       if (m.name.size() > kMaxNameBytes) {
                           out.resize(start);
                           throw EncodeError("HELLO name is " + std::to_string(m.name.size()) +
                                             " bytes, limit 64");
                       }
                       if (!is_valid_utf8(m.name)) {
                           out.resize(start);
                           throw EncodeError("HELLO name is not valid UTF-8");
                       }
                       put_u8(out, static_cast<std::uint8_t>(m.name.size()));
                       out.insert(out.end(), m.name.begin(), m.name.end());
                       put_u8(out, static_cast<std::uint8_t>(m.role));
                       put_u8(out, m.version);
                   },
                   [&](const HelloAck& m) {
                       put_u8(out, m.accepted ? 1 : 0);
                       put_u32(out, m.frame_period_us);
                   },
                   [&](const RoundStart& m) {
                       put_u32(out, m.round_id);
                       put_u32(out, m.frames);
                       put_u32(out, m.hp_total);
                   },
                   [&](const Frame& m) {
                       put_u32(out, m.round_id);
                       put_u32(out, m.frame_id);
                       put_u32(out, m.hp_self);
                       put_u32(out, m.hp_opp);
                       put_u32(out, m.send_ts_us);
                   },
                   [&](const Action& m) {
                       put_u32(out, m.frame_id);
                       put_u8(out, m.action_code);
                       put_u32(out, m.reported_processing_us);
                   },
                   [&](const RoundEnd& m) {
                       put_u32(out, m.round_id);
                       put_u32(out, m.hp_self);
                       put_u32(out, m.hp_opp);
                       put_u32(out, m.elapsed_frames);
                       put_u32(out, m.frames_processed);
                       put_u32(out, m.frames_skipped);
                   },
                   [&](const MatchEnd& m) { put_u32(out, m.rounds); },
               },
               msg);

    const auto len = static_cast<std::uint32_t>(out.size() - start - kHeaderBytes);
    out[start] = static_cast<std::uint8_t>(len >> 24);
    out[start + 1] = static_cast<std::uint8_t>(len >> 16);
    out[start + 2] = static_cast<std::uint8_t>(len >> 8);
    out[start + 3] = static_cast<std::uint8_t>(len);
}

std::vector<std::uint8_t> encode(const Message& msg)
{
    std::vector<std::uint8_t> out;
    out.reserve(32);
    encode_into(msg, out);
    return out;
}

std::optional<Decoded> decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHeaderBytes)
        return std::nullopt;
    const std::uint32_t len = get_u32(bytes, 0);
    if (len > kMaxFrameLength)
        throw ProtocolError("declared length " + std::to_string(len) + " exceeds 65536");
    if (len == 0)
        throw ProtocolError("declared length 0 leaves no type byte");
    if (bytes.size() < kHeaderBytes + 1)
        return std::nullopt;
    const std::uint8_t type = bytes[kHeaderBytes];
    if (!known_type(type))
        throw ProtocolError("unknown message type 0x" + hex_byte(type));
    if (bytes.size() < kHeaderBytes + len)
        return std::nullopt;

    auto payload = bytes.subspan(kHeaderBytes + 1, len - 1);
    return Decoded{decode_payload(static_cast<MessageType>(type), payload), kHeaderBytes + len};
}

void StreamDecoder::feed(std::span<const std::uint8_t> bytes)
{
    if (head_ > 0 && head_ == buf_.size()) {
        buf_.clear();
        head_ = 0;
    } else if (head_ > 4096 && head_ * 2 > buf_.size()) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> StreamDecoder::next()
{
    auto view = std::span<const std::uint8_t>(buf_).subspan(head_);
    auto decoded = decode(view);
    if (!decoded)
        return std::nullopt;
    head_ += decoded->consumed;
    return std::move(decoded->message);
}

bool is_valid_utf8(std::string_view s) noexcept
{
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size())
            return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80)
                return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms, surrogates and out-of-range code points.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
            return false;
        i += extra + 1;
    }
    return true;
}

}  // namespace frameguard::protocol
