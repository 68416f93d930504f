// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ibnsec/tunnel.hpp"
#include "test_support.hpp"

using namespace ibnsec;
using namespace ibnsec::tunnel;
using ibnsec::test::Rng;

namespace {

std::pair<TransportSession, TransportSession> make_session_pair(
    Rng& rng, RekeyPolicy policy = {}, size_t window = ReplayWindow::kDefaultWidth) {
    auto i_static = crypto::keypair_from_entropy(rng.key32());
    auto r_static = crypto::keypair_from_entropy(rng.key32());
    auto i_eph = crypto::keypair_from_entropy(rng.key32());
    auto r_eph = crypto::keypair_from_entropy(rng.key32());

    auto [i_state, init] = noise::hs_initiate(i_static, r_static.public_key, i_eph,
                                              noise::make_timestamp(1700000000, 0));
    init.sender_index = 0x1001;
    auto rr = noise::hs_respond(r_static, {}, init, r_eph);
    rr.message.sender_index = 0x2002;
    auto i_keys = noise::hs_finalize_initiator(i_state, rr.message);
    auto r_keys = noise::hs_finalize_responder(rr.state);

    auto now = Clock::now();
    return {TransportSession(0x1001, 0x2002, i_keys, HsRole::Initiator, now, policy, window),
            TransportSession(0x2002, 0x1001, r_keys, HsRole::Responder, now, policy, window)};
}

}  // namespace

TEST_CASE("wire sizes are exact") {
    noise::InitiationMessage init;
    CHECK(encode_message(init).size() == kInitiationSize);

    noise::ResponseMessage resp;
    CHECK(encode_message(resp).size() == kResponseSize);

    DataMessage data;
    data.ciphertext.assign(1400 + crypto::kAeadTagSize, 0);
    CHECK(encode_message(data).size() == 1432);
    CHECK(encode_message(data).size() - 1400 == kDataOverhead);
}

TEST_CASE("codec roundtrip for all three types") {
    Rng rng(201);
    noise::InitiationMessage init;
    init.sender_index = uint32_t(rng.u64());
    init.ephemeral_pub = rng.key32();
    for (auto& b : init.encrypted_static) b = uint8_t(rng.u64());
    for (auto& b : init.encrypted_timestamp) b = uint8_t(rng.u64());
    auto decoded_init =
        std::get<noise::InitiationMessage>(decode_message(encode_message(init)));
    CHECK(decoded_init.sender_index == init.sender_index);
    CHECK(decoded_init.ephemeral_pub == init.ephemeral_pub);
    CHECK(decoded_init.encrypted_static == init.encrypted_static);
    CHECK(decoded_init.encrypted_timestamp == init.encrypted_timestamp);

    noise::ResponseMessage resp;
    resp.sender_index = uint32_t(rng.u64());
    resp.receiver_index = uint32_t(rng.u64());
    resp.ephemeral_pub = rng.key32();
    for (auto& b : resp.encrypted_empty) b = uint8_t(rng.u64());
    auto decoded_resp = std::get<noise::ResponseMessage>(decode_message(encode_message(resp)));
    CHECK(decoded_resp.sender_index == resp.sender_index);
    CHECK(decoded_resp.receiver_index == resp.receiver_index);
    CHECK(decoded_resp.ephemeral_pub == resp.ephemeral_pub);
    CHECK(decoded_resp.encrypted_empty == resp.encrypted_empty);

    DataMessage data;
    data.receiver_index = uint32_t(rng.u64());
    data.counter = rng.u64();
    data.ciphertext = rng.bytes(16 + rng.below(200));
    auto decoded_data = std::get<DataMessage>(decode_message(encode_message(data)));
    CHECK(decoded_data.receiver_index == data.receiver_index);
    CHECK(decoded_data.counter == data.counter);
    CHECK(decoded_data.ciphertext == data.ciphertext);
}

TEST_CASE("malformed datagrams are rejected, never crash") {
    CHECK_THROWS_AS(decode_message(Bytes{}), Error);
    CHECK_THROWS_AS(decode_message(Bytes{9, 0, 0, 0}), Error);  // unknown type
    CHECK_THROWS_AS(decode_message(Bytes{1, 0, 0, 0}), Error);  // short initiation
    CHECK_THROWS_AS(decode_message(Bytes{1, 1, 0, 0}), Error);  // nonzero reserved

    Bytes init(kInitiationSize, 0);
    init[0] = 1;
    CHECK_NOTHROW(decode_message(init));
    init.push_back(0);  // one byte too long
    CHECK_THROWS_AS(decode_message(init), Error);

    // totality over random buffers
    Rng rng(202);
    int decoded = 0;
    for (int i = 0; i < 20000; ++i) {
        Bytes buf = rng.bytes(rng.below(160));
        if (!buf.empty() && rng.below(2)) buf[0] = uint8_t(1 + rng.below(4));
        try {
            decode_message(buf);
            ++decoded;
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedMessage);
        }
    }
    CHECK(decoded >= 0);  // reaching here without a crash is the property
}

TEST_CASE("replay window: spec sequences") {
    ReplayWindow w;
    CHECK(w.check_and_update(1));
    CHECK(w.check_and_update(2));
    CHECK(w.check_and_update(3));
    CHECK_FALSE(w.check_and_update(2));  // duplicate

    ReplayWindow w2;
    CHECK(w2.check_and_update(5));
    CHECK(w2.check_and_update(3));  // in-window reorder

    ReplayWindow w3;
    CHECK(w3.check_and_update(1000));
    CHECK_FALSE(w3.check_and_update(900));  // 100 behind, width 64
    CHECK(w3.check_and_update(950));        // inside the window
}

TEST_CASE("replay window matches brute-force oracle over random streams") {
    Rng rng(203);
    for (size_t width : {size_t(64), size_t(128), size_t(2048)}) {
        ReplayWindow window(width);
        std::set<uint64_t> accepted;  // oracle state
        uint64_t greatest = 0;
        for (int i = 0; i < 20000; ++i) {
            uint64_t counter;
            switch (rng.below(4)) {
                case 0: counter = rng.below(64); break;                       // early dups
                case 1: counter = greatest + 1 + rng.below(8); break;         // advance
                case 2: counter = greatest > 40 ? greatest - rng.below(40) : rng.below(40); break;
                default: counter = greatest > width * 2 ? greatest - width - rng.below(100)
                                                        : rng.below(width * 3); break;
            }
            bool oracle_accept = !accepted.count(counter) &&
                                 (counter >= greatest || greatest - counter < width);
            bool got = window.check_and_update(counter);
            CAPTURE(width);
            CAPTURE(counter);
            CAPTURE(greatest);
            CHECK(got == oracle_accept);
            if (oracle_accept) {
                accepted.insert(counter);
                greatest = std::max(greatest, counter);
            }
        }
    }
}

TEST_CASE("session send/recv end to end") {
    Rng rng(204);
    auto [initiator, responder] = make_session_pair(rng);
    auto now = Clock::now();

    Bytes payload = rng.bytes(100);
    DataMessage m0 = initiator.send(payload, now);
    CHECK(m0.counter == 0);
    DataMessage m1 = initiator.send(payload, now);
    CHECK(m1.counter == 1);  // monotone counters

    CHECK(responder.recv(m0, now) == payload);

    // duplicate → ReplayRejected
    try {
        responder.recv(m0, now);
        FAIL("expected ReplayRejected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ReplayRejected);
    }

    // tamper → AuthFailure, window untouched so the original still lands
    DataMessage bad = m1;
    bad.ciphertext[0] ^= 1;
    try {
        responder.recv(bad, now);
        FAIL("expected AuthFailure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AuthFailure);
    }
    CHECK(responder.recv(m1, now) == payload);

    // wrong session index
    DataMessage foreign = initiator.send(payload, now);
    foreign.receiver_index ^= 0xdeadbeef;
    try {
        responder.recv(foreign, now);
        FAIL("expected WrongSession");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WrongSession);
    }

    // replies flow the other way too
    DataMessage reply = responder.send(payload, now);
    CHECK(initiator.recv(reply, now) == payload);
}

TEST_CASE("rekey thresholds") {
    Rng rng(205);
    RekeyPolicy policy;
    policy.rekey_after = std::chrono::seconds(120);
    policy.reject_after = std::chrono::seconds(180);
    policy.rekey_after_messages = 4;
    auto [initiator, responder] = make_session_pair(rng, policy);

    auto t0 = initiator.established_at();
    CHECK(initiator.maybe_rekey(t0 + std::chrono::seconds(119)) == RekeyAction::NoAction);
    CHECK(initiator.maybe_rekey(t0 + std::chrono::seconds(121)) ==
          RekeyAction::InitiateNewHandshake);

    // counter threshold
    Bytes payload{1, 2, 3};
    std::vector<DataMessage> msgs;
    for (int i = 0; i < 4; ++i) msgs.push_back(initiator.send(payload, t0));
    CHECK(initiator.maybe_rekey(t0) == RekeyAction::InitiateNewHandshake);
    try {
        initiator.send(payload, t0);
        FAIL("expected RekeyRequired");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RekeyRequired);
    }

    // receive path stays open until reject_after, then closes
    CHECK(responder.recv(msgs[0], t0 + std::chrono::seconds(179)) == payload);
    try {
        responder.recv(msgs[1], t0 + std::chrono::seconds(181));
        FAIL("expected SessionExpired");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SessionExpired);
    }
}

TEST_CASE("per-packet overhead is exactly 32 bytes for every payload size") {
    Rng rng(206);
    auto [initiator, responder] = make_session_pair(rng);
    auto now = Clock::now();
    for (size_t size : {size_t(0), size_t(1), size_t(64), size_t(512), size_t(1400)}) {
        Bytes payload = rng.bytes(size);
        Bytes wire = encode_message(initiator.send(payload, now));
        CHECK(wire.size() - size == kDataOverhead);
    }
}

TEST_CASE("adversarial reorder/duplicate stream accepts each counter once") {
    Rng rng(207);
    auto [initiator, responder] = make_session_pair(rng);
    auto now = Clock::now();

    std::vector<DataMessage> recorded;
    for (int i = 0; i < 200; ++i) {
        Bytes payload = rng.bytes(8);
        put_u64le(payload.data(), uint64_t(i));
        recorded.push_back(initiator.send(payload, now));
    }

    // shuffle within a window-bounded horizon and add duplicates
    std::vector<DataMessage> stream;
    for (const auto& m : recorded) {
        stream.push_back(m);
        if (rng.below(3) == 0) stream.push_back(m);
    }
    for (size_t i = 0; i + 1 < stream.size(); ++i) {
        size_t j = i + rng.below(std::min<size_t>(20, stream.size() - i));
        std::swap(stream[i], stream[j]);
    }

    std::set<uint64_t> accepted;
    for (const auto& m : stream) {
        try {
            Bytes payload = responder.recv(m, now);
            CHECK(get_u64le(payload.data()) == m.counter);  // decrypts correctly
            CHECK(accepted.insert(m.counter).second);       // never twice
        } catch (const Error& e) {
            bool expected = e.code() == ErrorCode::ReplayRejected;
            CHECK(expected);
        }
    }
}
