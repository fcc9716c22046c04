// SPDX-License-Identifier: Apache-2.0
#include "frameguard/errors.hpp"
#include "frameguard/protocol.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace frameguard;
using namespace frameguard::protocol;

namespace {

using Bytes = std::vector<std::uint8_t>;

const Bytes kActionGolden{0x00, 0x00, 0x00, 0x0A, 0x05, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00};
const Bytes kMatchEndGolden{0x00, 0x00, 0x00, 0x05, 0x07, 0x00, 0x00, 0x00, 0x03};

std::uint32_t u32(oracle::Gen& g)
{
    switch (g.in(0, 3)) {
    case 0:
        return 0;
    case 1:
        return 0xFFFFFFFFu;
    default:
        return static_cast<std::uint32_t>(g.in(0, 0xFFFFFFFFLL));
    }
}

/// Random valid UTF-8 of at most 64 bytes, mixing 1- to 4-byte sequences.
std::string utf8_name(oracle::Gen& g)
{
    static const char* pieces[] = {"a", "Z", "0", "-", " ", "\xC3\xA9", "\xD0\xB6", "\xE3\x81\x82", "\xE2\x82\xAC",
                                   "\xF0\x9F\x8E\xAE"};
    std::string s;
    const auto target = g.in(0, 64);
    for (;;) {
        const std::string p = pieces[g.in(0, 9)];
        if (static_cast<std::int64_t>(s.size() + p.size()) > target)
            break;
        s += p;
    }
    return s;
}

Message random_message(oracle::Gen& g)
{
    switch (g.in(0, 6)) {
    case 0:
        return Hello{utf8_name(g), g.coin() ? Role::Player : Role::Sandbox, static_cast<std::uint8_t>(g.in(0, 255))};
    case 1:
        return HelloAck{g.coin(), u32(g)};
    case 2:
        return RoundStart{u32(g), u32(g), u32(g)};
    case 3:
        return Frame{u32(g), u32(g), u32(g), u32(g), u32(g)};
    case 4:
        return Action{u32(g), static_cast<std::uint8_t>(g.in(0, 255)), u32(g)};
    case 5:
        return RoundEnd{u32(g), u32(g), u32(g), u32(g), u32(g), u32(g)};
    default:
        return MatchEnd{u32(g)};
    }
}

void expect_protocol_error(const Bytes& b, const std::string& fragment)
{
    try {
        decode(b);
        FAIL() << "decoded bytes that should fail with '" << fragment << "'";
    } catch (const ProtocolError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Golden, ActionEncodes)
{
    EXPECT_EQ(encode(Action{1, 0, 0}), kActionGolden);
}

TEST(Golden, ActionDecodes)
{
    const auto d = decode(kActionGolden);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->consumed, 14u);
    EXPECT_EQ(std::get<Action>(d->message), (Action{1, 0, 0}));
}

TEST(Golden, MatchEndBothWays)
{
    EXPECT_EQ(encode(MatchEnd{3}), kMatchEndGolden);
    const auto d = decode(kMatchEndGolden);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(std::get<MatchEnd>(d->message), MatchEnd{3});
    EXPECT_EQ(d->consumed, kMatchEndGolden.size());
}

TEST(Golden, HelloLayout)
{
    const Bytes expected{0x00, 0x00, 0x00, 0x07, 0x01, 0x03, 'a', 'b', 'c', 0x00, 0x01};
    EXPECT_EQ(encode(Hello{"abc", Role::Sandbox, 1}), expected);
}

TEST(Golden, FrameLayoutIsBigEndian)
{
    const Bytes expected{0x00, 0x00, 0x00, 0x15, 0x04, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x01, 0x00,
                         0x00, 0x00, 0x01, 0x90, 0x00, 0x00, 0x00, 0x00, 0x12, 0x34, 0x56, 0x78};
    EXPECT_EQ(encode(Frame{2, 256, 400, 0, 0x12345678}), expected);
}

TEST(Decode, UnknownTypeByte)
{
    expect_protocol_error({0x00, 0x00, 0x00, 0x02, 0xFF, 0x00}, "unknown message type");
}

TEST(Decode, FloodGuard)
{
    expect_protocol_error({0x00, 0x01, 0x00, 0x01}, "65536");
    Bytes at_cap{0x00, 0x01, 0x00, 0x00};
    EXPECT_FALSE(decode(at_cap).has_value());  // allowed, just incomplete
}

TEST(Decode, ZeroLength) { expect_protocol_error({0x00, 0x00, 0x00, 0x00}, "length"); }

TEST(Decode, PayloadInconsistentWithType)
{
    auto b = kActionGolden;
    b[3] = 0x0B;
    b.push_back(0x00);
    expect_protocol_error(b, "ACTION");
    expect_protocol_error({0x00, 0x00, 0x00, 0x04, 0x07, 0x00, 0x00, 0x00}, "MATCH_END");
}

TEST(Decode, HelloFieldChecks)
{
    // role 2
    expect_protocol_error({0x00, 0x00, 0x00, 0x04, 0x01, 0x00, 0x02, 0x01}, "role");
    // name length byte disagrees with the frame
    expect_protocol_error({0x00, 0x00, 0x00, 0x05, 0x01, 0x05, 'a', 0x00, 0x01}, "HELLO");
    // overlong encoding of '/'
    expect_protocol_error({0x00, 0x00, 0x00, 0x06, 0x01, 0x02, 0xC0, 0xAF, 0x00, 0x01}, "UTF-8");
    // accepted must be 0 or 1
    expect_protocol_error({0x00, 0x00, 0x00, 0x06, 0x02, 0x02, 0x00, 0x00, 0x00, 0x00}, "accepted");
}

TEST(Decode, ShortPrefixesNeedMore)
{
    const auto bytes = encode(Frame{1, 2, 3, 4, 5});
    for (std::size_t n = 0; n < bytes.size(); ++n)
        EXPECT_FALSE(decode(std::span(bytes).first(n)).has_value()) << n;
}

TEST(Decode, ConsumesOnlyOneFrame)
{
    Bytes two = kActionGolden;
    two.insert(two.end(), kMatchEndGolden.begin(), kMatchEndGolden.end());
    const auto d = decode(two);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->consumed, kActionGolden.size());
}

TEST(Encode, NameTooLong)
{
    EXPECT_NO_THROW(encode(Hello{std::string(64, 'x'), Role::Player, 1}));
    EXPECT_THROW(encode(Hello{std::string(65, 'x'), Role::Player, 1}), EncodeError);
}

TEST(Encode, NameMustBeUtf8)
{
    EXPECT_THROW(encode(Hello{"\xFF", Role::Player, 1}), EncodeError);
    EXPECT_THROW(encode(Hello{"\xED\xA0\x80", Role::Player, 1}), EncodeError);  // surrogate
    EXPECT_THROW(encode(Hello{"\xE2\x82", Role::Player, 1}), EncodeError);       // truncated
}

TEST(Utf8, Validator)
{
    EXPECT_TRUE(is_valid_utf8(""));
    EXPECT_TRUE(is_valid_utf8("plain"));
    EXPECT_TRUE(is_valid_utf8("\xF0\x9F\x8E\xAE"));
    EXPECT_TRUE(is_valid_utf8("\xF4\x8F\xBF\xBF"));
    EXPECT_FALSE(is_valid_utf8("\xF4\x90\x80\x80"));  // above U+10FFFF
    EXPECT_FALSE(is_valid_utf8("\xE0\x80\xAF"));      // overlong
    EXPECT_FALSE(is_valid_utf8("\x80"));
}

TEST(TypeNames, Distinct)
{
    EXPECT_EQ(type_name(MessageType::Frame), "FRAME");
    EXPECT_EQ(type_of(Message{RoundEnd{}}), MessageType::RoundEnd);
}

TEST(Properties, RoundTripIdentity)
{
    oracle::Gen g(101);
    for (int i = 0; i < 1000; ++i) {
        const auto m = random_message(g);
        const auto bytes = encode(m);
        const auto d = decode(bytes);
        ASSERT_TRUE(d.has_value());
        EXPECT_EQ(d->message, m) << "case " << i;
        EXPECT_EQ(d->consumed, bytes.size());
    }
}

TEST(Properties, LengthHonesty)
{
    oracle::Gen g(102);
    for (int i = 0; i < 1000; ++i) {
        const auto bytes = encode(random_message(g));
        const std::uint32_t declared =
            (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) | (std::uint32_t{bytes[2]} << 8) | bytes[3];
        EXPECT_EQ(decode(bytes)->consumed, 4u + declared);
    }
}

TEST(Properties, ByteByByteStreamMatchesWholeStream)
{
    oracle::Gen g(103);
    std::vector<Message> sent;
    Bytes stream;
    for (int i = 0; i < 300; ++i) {
        sent.push_back(random_message(g));
        encode_into(sent.back(), stream);
    }

    StreamDecoder whole;
    whole.feed(stream);
    std::vector<Message> a;
    while (auto m = whole.next())
        a.push_back(*m);

    StreamDecoder drip;
    std::vector<Message> b;
    for (auto byte : stream) {
        drip.feed(std::span(&byte, 1));
        while (auto m = drip.next())
            b.push_back(*m);
    }

    EXPECT_EQ(a, sent);
    EXPECT_EQ(b, sent);
    EXPECT_EQ(whole.buffered(), 0u);
    EXPECT_EQ(drip.buffered(), 0u);
}

TEST(Properties, RandomChunking)
{
    oracle::Gen g(104);
    std::vector<Message> sent;
    Bytes stream;
    for (int i = 0; i < 300; ++i) {
        sent.push_back(random_message(g));
        encode_into(sent.back(), stream);
    }
    StreamDecoder dec;
    std::vector<Message> got;
    std::size_t at = 0;
    while (at < stream.size()) {
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(g.in(1, 40)), stream.size() - at);
        dec.feed(std::span(stream).subspan(at, n));
        at += n;
        while (auto m = dec.next())
            got.push_back(*m);
    }
    EXPECT_EQ(got, sent);
}

TEST(StreamDecoder, ErrorsPropagate)
{
    StreamDecoder dec;
    const Bytes bad{0x00, 0x00, 0x00, 0x02, 0xFF, 0x00};
    dec.feed(bad);
    EXPECT_THROW(dec.next(), ProtocolError);
}
