// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>

#include "ibnsec/crypto.hpp"

namespace ibnsec::noise {

using crypto::Keypair;

inline constexpr char kProtocolName[] = "Noise_IK_25519_ChaChaPoly_BLAKE2s";

enum class HsRole { Initiator, Responder };

struct SessionKeys {
    Key32 send_key;
    Key32 recv_key;
};

/// 12-byte handshake timestamp: 8-byte big-endian seconds, 4-byte big-endian
/// nanoseconds. Strictly increasing per initiator static key; the responder
/// rejects non-increasing values to kill initiation replays.
using Timestamp12 = std::array<uint8_t, 12>;

Timestamp12 make_timestamp(uint64_t unix_seconds, uint32_t nanoseconds);
Timestamp12 timestamp_now();
bool timestamp_after(const Timestamp12& a, const Timestamp12& b);  // a > b

struct InitiationMessage {
    uint32_t sender_index = 0;  // assigned by the tunnel layer, not part of the transcript
    Key32 ephemeral_pub{};
    std::array<uint8_t, 48> encrypted_static{};     // 32 + 16 tag
    std::array<uint8_t, 28> encrypted_timestamp{};  // 12 + 16 tag
};

struct ResponseMessage {
    uint32_t sender_index = 0;
    uint32_t receiver_index = 0;
    Key32 ephemeral_pub{};
    std::array<uint8_t, 16> encrypted_empty{};  // tag over empty plaintext
};

struct HandshakeState {
    Key32 chaining_key{};
    Key32 transcript_hash{};
    Keypair local_ephemeral{};
    std::optional<Key32> remote_ephemeral_pub;
    Keypair local_static{};
    Key32 remote_static_pub{};
    HsRole role = HsRole::Initiator;
};

using AuthorizePredicate = std::function<bool(const Key32& initiator_static_pub)>;
using TimestampPredicate =
    std::function<bool(const Key32& initiator_static_pub, const Timestamp12& ts)>;

/// IK message 1 (e, es, s, ss). The responder static must come from the
/// registry out of band (the IK pre-message).
std::pair<HandshakeState, InitiationMessage> hs_initiate(const Keypair& local_static,
                                                         const Key32& responder_static_pub,
                                                         const Keypair& local_ephemeral,
                                                         const Timestamp12& timestamp);

struct RespondResult {
    HandshakeState state;
    ResponseMessage message;
    Key32 initiator_static_pub;
    Timestamp12 timestamp;
};

/// Consumes message 1, emits message 2 (e, ee, se). `authorize` is the
/// registry gate; `timestamp_ok` the initiation-replay gate (defaults open).
RespondResult hs_respond(const Keypair& local_static, const AuthorizePredicate& authorize,
                         const InitiationMessage& msg, const Keypair& local_ephemeral,
                         const TimestampPredicate& timestamp_ok = {});

/// Initiator: consume message 2 and split transport keys.
SessionKeys hs_finalize_initiator(HandshakeState& state, const ResponseMessage& msg);

/// Responder: split transport keys (callable right after hs_respond).
SessionKeys hs_finalize_responder(HandshakeState& state);

}  // namespace ibnsec::noise
