// SPDX-License-Identifier: Apache-2.0
#include "ibnsec/tunnel.hpp"

#include <cstring>

namespace ibnsec::tunnel {

namespace {

void put_header(Bytes& out, uint8_t type) {
    out.push_back(type);
    out.push_back(0);
    out.push_back(0);
    out.push_back(0);
}

}  // namespace

Bytes encode_message(const Message& msg) {
    Bytes out;
    if (const auto* init = std::get_if<InitiationMessage>(&msg)) {
        out.reserve(kInitiationSize);
        put_header(out, kMsgTypeInitiation);
        out.resize(8);
        put_u32le(out.data() + 4, init->sender_index);
        append(out, init->ephemeral_pub);
        append(out, init->encrypted_static);
        append(out, init->encrypted_timestamp);
    } else if (const auto* resp = std::get_if<ResponseMessage>(&msg)) {
        out.reserve(kResponseSize);
        put_header(out, kMsgTypeResponse);
        out.resize(12);
        put_u32le(out.data() + 4, resp->sender_index);
        put_u32le(out.data() + 8, resp->receiver_index);
        append(out, resp->ephemeral_pub);
        append(out, resp->encrypted_empty);
    } else {
        const auto& data = std::get<DataMessage>(msg);
        out.reserve(kDataHeaderSize + data.ciphertext.size());
        put_header(out, kMsgTypeData);
        out.resize(kDataHeaderSize);
        put_u32le(out.data() + 4, data.receiver_index);
        put_u64le(out.data() + 8, data.counter);
        append(out, data.ciphertext);
    }
    return out;
}

Message decode_message(ByteSpan d) {
    if (d.size() < 4) fail(ErrorCode::MalformedMessage, "datagram too short");
    if (d[1] != 0 || d[2] != 0 || d[3] != 0)
        fail(ErrorCode::MalformedMessage, "nonzero reserved bytes");

    switch (d[0]) {
        case kMsgTypeInitiation: {
            if (d.size() != kInitiationSize)
                fail(ErrorCode::MalformedMessage, "bad initiation length");
            InitiationMessage m;
            m.sender_index = get_u32le(d.data() + 4);
            std::memcpy(m.ephemeral_pub.data(), d.data() + 8, 32);
            std::memcpy(m.encrypted_static.data(), d.data() + 40, 48);
            std::memcpy(m.encrypted_timestamp.data(), d.data() + 88, 28);
            return m;
        }
        case kMsgTypeResponse: {
            if (d.size() != kResponseSize) fail(ErrorCode::MalformedMessage, "bad response length");
            ResponseMessage m;
            m.sender_index = get_u32le(d.data() + 4);
            m.receiver_index = get_u32le(d.data() + 8);
            std::memcpy(m.ephemeral_pub.data(), d.data() + 12, 32);
            std::memcpy(m.encrypted_empty.data(), d.data() + 44, 16);
            return m;
        }
        case kMsgTypeData: {
            if (d.size() < kDataHeaderSize + crypto::kAeadTagSize)
                fail(ErrorCode::MalformedMessage, "data message too short");
            DataMessage m;
            m.receiver_index = get_u32le(d.data() + 4);
            m.counter = get_u64le(d.data() + 8);
            m.ciphertext.assign(d.begin() + kDataHeaderSize, d.end());
            return m;
        }
        default:
            fail(ErrorCode::MalformedMessage, "unknown message type");
    }
}

// --- ReplayWindow ---

ReplayWindow::ReplayWindow(size_t width) {
    if (width < kDefaultWidth) width = kDefaultWidth;
    if (width > kMaxWidth) width = kMaxWidth;
    width_ = (width + 63) / 64 * 64;
    bitmap_.assign(width_ / 64, 0);
}

bool ReplayWindow::bit(size_t offset) const {
    return (bitmap_[offset / 64] >> (offset % 64)) & 1;
}

void ReplayWindow::set_bit(size_t offset) {
    bitmap_[offset / 64] |= uint64_t(1) << (offset % 64);
}

void ReplayWindow::shift(uint64_t by) {
    if (by >= width_) {
        std::fill(bitmap_.begin(), bitmap_.end(), 0);
        return;
    }
    size_t words = by / 64, bits = by % 64;
    for (size_t i = bitmap_.size(); i-- > 0;) {
        uint64_t v = i >= words ? bitmap_[i - words] << bits : 0;
        if (bits && i >= words + 1) v |= bitmap_[i - words - 1] >> (64 - bits);
        bitmap_[i] = v;
    }
}

bool ReplayWindow::would_accept(uint64_t counter) const {
    if (counter > greatest_) return true;
    uint64_t offset = greatest_ - counter;
    if (offset >= width_) return false;
    return !bit(offset);
}

bool ReplayWindow::check_and_update(uint64_t counter) {
    if (counter > greatest_) {
        shift(counter - greatest_);
        greatest_ = counter;
        set_bit(0);
        return true;
    }
    uint64_t offset = greatest_ - counter;
    if (offset >= width_ || bit(offset)) return false;
    set_bit(offset);
    return true;
}

// --- TransportSession ---

TransportSession::TransportSession(uint32_t local_index, uint32_t remote_index, SessionKeys keys,
                                   HsRole role, Clock::time_point established_at,
                                   RekeyPolicy policy, size_t replay_width)
    : local_index_(local_index),
      remote_index_(remote_index),
      keys_(keys),
      window_(replay_width),
      established_at_(established_at),
      role_(role),
      policy_(policy) {}

DataMessage TransportSession::send(ByteSpan payload, Clock::time_point now) {
    if (send_counter_ >= policy_.rekey_after_messages)
        fail(ErrorCode::RekeyRequired, "send counter reached rekey threshold");
    if (expired(now)) fail(ErrorCode::RekeyRequired, "session older than reject_after");
    DataMessage msg;
    msg.receiver_index = remote_index_;
    msg.counter = send_counter_;
    msg.ciphertext = crypto::aead_seal(keys_.send_key, send_counter_, payload, {});
    ++send_counter_;
    return msg;
}

Bytes TransportSession::recv(const DataMessage& msg, Clock::time_point now) {
    if (msg.receiver_index != local_index_)
        fail(ErrorCode::WrongSession, "receiver index mismatch");
    if (expired(now)) fail(ErrorCode::SessionExpired, "session older than reject_after");
    if (!window_.would_accept(msg.counter)) fail(ErrorCode::ReplayRejected, "duplicate counter");
    Bytes payload = crypto::aead_open(keys_.recv_key, msg.counter, msg.ciphertext, {});
    if (!window_.check_and_update(msg.counter)) fail(ErrorCode::ReplayRejected, "duplicate counter");
    return payload;
}

RekeyAction TransportSession::maybe_rekey(Clock::time_point now) const {
    if (send_counter_ >= policy_.rekey_after_messages) return RekeyAction::InitiateNewHandshake;
    if (now - established_at_ >= policy_.rekey_after) return RekeyAction::InitiateNewHandshake;
    return RekeyAction::NoAction;
}

bool TransportSession::expired(Clock::time_point now) const {
    return now - established_at_ >= policy_.reject_after;
}

}  // namespace ibnsec::tunnel
