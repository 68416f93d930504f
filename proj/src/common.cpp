// SPDX-License-Identifier: Apache-2.0
#include "ibnsec/common.hpp"

namespace ibnsec {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ZeroSharedSecret: return "ZeroSharedSecret";
        case ErrorCode::NonceExhausted: return "NonceExhausted";
        case ErrorCode::AuthFailure: return "AuthFailure";
        case ErrorCode::StaleTimestamp: return "StaleTimestamp";
        case ErrorCode::Unauthorized: return "Unauthorized";
        case ErrorCode::HandshakeFailed: return "HandshakeFailed";
        case ErrorCode::MalformedMessage: return "MalformedMessage";
        case ErrorCode::ReplayRejected: return "ReplayRejected";
        case ErrorCode::WrongSession: return "WrongSession";
        case ErrorCode::SessionExpired: return "SessionExpired";
        case ErrorCode::RekeyRequired: return "RekeyRequired";
        case ErrorCode::InvalidValidity: return "InvalidValidity";
        case ErrorCode::BadSignature: return "BadSignature";
        case ErrorCode::Expired: return "Expired";
        case ErrorCode::NotYetValid: return "NotYetValid";
        case ErrorCode::Revoked: return "Revoked";
        case ErrorCode::UnknownRole: return "UnknownRole";
        case ErrorCode::UnknownSerial: return "UnknownSerial";
        case ErrorCode::ScopeOwnerMismatch: return "ScopeOwnerMismatch";
        case ErrorCode::NoMatchingRule: return "NoMatchingRule";
        case ErrorCode::TerminalScope: return "TerminalScope";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::MalformedEnvelope: return "MalformedEnvelope";
        case ErrorCode::UnknownIntent: return "UnknownIntent";
        case ErrorCode::UnauthorizedReporter: return "UnauthorizedReporter";
        case ErrorCode::OwnerSpoof: return "OwnerSpoof";
        case ErrorCode::HandlerUnreachable: return "HandlerUnreachable";
        case ErrorCode::NotConsumerRole: return "NotConsumerRole";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::EnrollmentRejected: return "EnrollmentRejected";
        case ErrorCode::CaMismatch: return "CaMismatch";
        case ErrorCode::BindFailure: return "BindFailure";
        case ErrorCode::MissingKeyMaterial: return "MissingKeyMaterial";
        case ErrorCode::PeerUnreachable: return "PeerUnreachable";
        case ErrorCode::NoSuchProcess: return "NoSuchProcess";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingFile: return "MissingFile";
    }
    return "UnknownError";
}

std::string to_hex(ByteSpan data) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) fail(ErrorCode::ParseError, "odd hex length");
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = hex_digit(hex[2 * i]);
        int lo = hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) fail(ErrorCode::ParseError, "bad hex digit");
        out[i] = uint8_t(hi << 4 | lo);
    }
    return out;
}

}  // namespace ibnsec
