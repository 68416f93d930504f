// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ibnsec {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;
using Key32 = std::array<uint8_t, 32>;

enum class ErrorCode {
    // crypto / handshake
    ZeroSharedSecret,
    NonceExhausted,
    AuthFailure,
    StaleTimestamp,
    Unauthorized,
    HandshakeFailed,
    // tunnel
    MalformedMessage,
    ReplayRejected,
    WrongSession,
    SessionExpired,
    RekeyRequired,
    // pki
    InvalidValidity,
    BadSignature,
    Expired,
    NotYetValid,
    Revoked,
    UnknownRole,
    UnknownSerial,
    // intent model
    ScopeOwnerMismatch,
    NoMatchingRule,
    TerminalScope,
    IllegalTransition,
    MalformedEnvelope,
    // controller
    UnknownIntent,
    UnauthorizedReporter,
    OwnerSpoof,
    HandlerUnreachable,
    // agent
    NotConsumerRole,
    Timeout,
    EnrollmentRejected,
    CaMismatch,
    // runtime
    BindFailure,
    MissingKeyMaterial,
    PeerUnreachable,
    NoSuchProcess,
    IoError,
    // config
    UnknownKey,
    ParseError,
    MissingFile,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);  // throws ParseError on odd length / bad digit

template <size_t N>
std::array<uint8_t, N> array_from_hex(std::string_view hex) {
    Bytes b = from_hex(hex);
    if (b.size() != N) fail(ErrorCode::ParseError, "expected " + std::to_string(N) + " bytes");
    std::array<uint8_t, N> out{};
    std::memcpy(out.data(), b.data(), N);
    return out;
}

template <size_t N>
ByteSpan as_span(const std::array<uint8_t, N>& a) {
    return ByteSpan(a.data(), a.size());
}

inline ByteSpan str_span(std::string_view s) {
    return ByteSpan(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

inline void put_u32le(uint8_t* p, uint32_t v) {
    p[0] = uint8_t(v); p[1] = uint8_t(v >> 8); p[2] = uint8_t(v >> 16); p[3] = uint8_t(v >> 24);
}
inline uint32_t get_u32le(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
inline void put_u64le(uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = uint8_t(v >> (8 * i));
}
inline uint64_t get_u64le(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    return v;
}
inline void put_u64be(uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = uint8_t(v >> (8 * (7 - i)));
}
inline uint64_t get_u64be(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
    return v;
}
inline void put_u32be(uint8_t* p, uint32_t v) {
    p[0] = uint8_t(v >> 24); p[1] = uint8_t(v >> 16); p[2] = uint8_t(v >> 8); p[3] = uint8_t(v);
}
inline uint32_t get_u32be(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | uint32_t(p[3]);
}
inline void put_u16le(uint8_t* p, uint16_t v) {
    p[0] = uint8_t(v); p[1] = uint8_t(v >> 8);
}
inline uint16_t get_u16le(const uint8_t* p) {
    return uint16_t(p[0]) | uint16_t(p[1]) << 8;
}

inline void append(Bytes& out, ByteSpan data) {
    out.insert(out.end(), data.begin(), data.end());
}

}  // namespace ibnsec
