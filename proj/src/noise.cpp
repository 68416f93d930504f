// SPDX-License-Identifier: Apache-2.0
#include "ibnsec/noise.hpp"

#include <chrono>
#include <cstring>

namespace ibnsec::noise {

using crypto::Blake2s;

Timestamp12 make_timestamp(uint64_t unix_seconds, uint32_t nanoseconds) {
    Timestamp12 ts{};
    put_u64be(ts.data(), unix_seconds);
    put_u32be(ts.data() + 8, nanoseconds);
    return ts;
}

Timestamp12 timestamp_now() {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(now);
    auto nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(now - secs);
    return make_timestamp(uint64_t(secs.count()), uint32_t(nanos.count()));
}

bool timestamp_after(const Timestamp12& a, const Timestamp12& b) {
    return std::memcmp(a.data(), b.data(), a.size()) > 0;
}

namespace {

// Noise symmetric state: evolving chaining key ck, transcript hash h, and the
// in-flight message key k. MixKey resets the AEAD nonce to zero.
struct SymmetricState {
    Key32 ck{};
    Key32 h{};
    Key32 k{};
    bool has_key = false;

    void initialize() {
        // protocol name is longer than 32 bytes, so h = HASH(name)
        h = Blake2s::digest(str_span(kProtocolName));
        ck = h;
        mix_hash({});  // empty prologue
    }

    void mix_hash(ByteSpan data) {
        h = Blake2s::digest({ByteSpan(h), data});
    }

    void mix_key(ByteSpan input_key_material) {
        auto out = crypto::kdf(ck, input_key_material, 2);
        ck = out[0];
        k = out[1];
        has_key = true;
    }

    Bytes encrypt_and_hash(ByteSpan plaintext) {
        Bytes ct = crypto::aead_seal(k, 0, plaintext, h);
        mix_hash(ct);
        return ct;
    }

    Bytes decrypt_and_hash(ByteSpan ciphertext) {
        Bytes pt = crypto::aead_open(k, 0, ciphertext, h);
        mix_hash(ciphertext);
        return pt;
    }

    std::pair<Key32, Key32> split() const {
        auto out = crypto::kdf(ck, {}, 2);
        return {out[0], out[1]};
    }
};

template <size_t N>
std::array<uint8_t, N> to_array(const Bytes& b) {
    std::array<uint8_t, N> out{};
    if (b.size() != N) fail(ErrorCode::MalformedMessage, "unexpected field size");
    std::memcpy(out.data(), b.data(), N);
    return out;
}

}  // namespace

std::pair<HandshakeState, InitiationMessage> hs_initiate(const Keypair& local_static,
                                                         const Key32& responder_static_pub,
                                                         const Keypair& local_ephemeral,
                                                         const Timestamp12& timestamp) {
    SymmetricState ss;
    ss.initialize();
    ss.mix_hash(responder_static_pub);  // IK pre-message

    InitiationMessage msg;

    // e
    msg.ephemeral_pub = local_ephemeral.public_key;
    ss.mix_hash(msg.ephemeral_pub);
    // es  (aborts on a low-order responder point before anything is emitted)
    ss.mix_key(crypto::dh(local_ephemeral.private_key, responder_static_pub));
    // s
    msg.encrypted_static = to_array<48>(ss.encrypt_and_hash(local_static.public_key));
    // ss
    ss.mix_key(crypto::dh(local_static.private_key, responder_static_pub));
    // payload: timestamp
    msg.encrypted_timestamp = to_array<28>(ss.encrypt_and_hash(timestamp));

    HandshakeState state;
    state.chaining_key = ss.ck;
    state.transcript_hash = ss.h;
    state.local_ephemeral = local_ephemeral;
    state.local_static = local_static;
    state.remote_static_pub = responder_static_pub;
    state.role = HsRole::Initiator;
    return {state, msg};
}

RespondResult hs_respond(const Keypair& local_static, const AuthorizePredicate& authorize,
                         const InitiationMessage& msg, const Keypair& local_ephemeral,
                         const TimestampPredicate& timestamp_ok) {
    SymmetricState ss;
    ss.initialize();
    ss.mix_hash(local_static.public_key);  // IK pre-message (our static)

    // e
    ss.mix_hash(msg.ephemeral_pub);
    // es
    ss.mix_key(crypto::dh(local_static.private_key, msg.ephemeral_pub));
    // s — failure here means the initiation targeted a different responder
    // static, or was tampered with
    Key32 initiator_static = to_array<32>(ss.decrypt_and_hash(msg.encrypted_static));

    if (authorize && !authorize(initiator_static))
        fail(ErrorCode::Unauthorized, "initiator static key not authorized");

    // ss
    ss.mix_key(crypto::dh(local_static.private_key, initiator_static));
    // payload: timestamp
    Timestamp12 ts = to_array<12>(ss.decrypt_and_hash(msg.encrypted_timestamp));

    if (timestamp_ok && !timestamp_ok(initiator_static, ts))
        fail(ErrorCode::StaleTimestamp, "initiation timestamp not after last seen");

    RespondResult result;
    result.message.receiver_index = msg.sender_index;

    // e
    result.message.ephemeral_pub = local_ephemeral.public_key;
    ss.mix_hash(result.message.ephemeral_pub);
    // ee
    ss.mix_key(crypto::dh(local_ephemeral.private_key, msg.ephemeral_pub));
    // se
    ss.mix_key(crypto::dh(local_ephemeral.private_key, initiator_static));
    // payload: empty
    result.message.encrypted_empty = to_array<16>(ss.encrypt_and_hash({}));

    result.state.chaining_key = ss.ck;
    result.state.transcript_hash = ss.h;
    result.state.local_ephemeral = local_ephemeral;
    result.state.remote_ephemeral_pub = msg.ephemeral_pub;
    result.state.local_static = local_static;
    result.state.remote_static_pub = initiator_static;
    result.state.role = HsRole::Responder;
    result.initiator_static_pub = initiator_static;
    result.timestamp = ts;
    return result;
}

SessionKeys hs_finalize_initiator(HandshakeState& state, const ResponseMessage& msg) {
    SymmetricState ss;
    ss.ck = state.chaining_key;
    ss.h = state.transcript_hash;

    // e
    ss.mix_hash(msg.ephemeral_pub);
    // ee
    ss.mix_key(crypto::dh(state.local_ephemeral.private_key, msg.ephemeral_pub));
    // se
    ss.mix_key(crypto::dh(state.local_static.private_key, msg.ephemeral_pub));
    // payload: empty
    ss.decrypt_and_hash(msg.encrypted_empty);

    state.chaining_key = ss.ck;
    state.transcript_hash = ss.h;
    state.remote_ephemeral_pub = msg.ephemeral_pub;

    auto [initiator_to_responder, responder_to_initiator] = ss.split();
    return SessionKeys{initiator_to_responder, responder_to_initiator};
}

SessionKeys hs_finalize_responder(HandshakeState& state) {
    SymmetricState ss;
    ss.ck = state.chaining_key;
    ss.h = state.transcript_hash;
    auto [initiator_to_responder, responder_to_initiator] = ss.split();
    return SessionKeys{responder_to_initiator, initiator_to_responder};
}

}  // namespace ibnsec::noise
