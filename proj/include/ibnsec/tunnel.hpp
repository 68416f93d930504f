// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <variant>

#include "ibnsec/noise.hpp"

namespace ibnsec::tunnel {

using noise::HsRole;
using noise::InitiationMessage;
using noise::ResponseMessage;
using noise::SessionKeys;

// Wire layout (all multi-byte integers little-endian):
//   Initiation (116 B): type=0x01 | reserved 0x000000 | sender_index(4)
//                       | ephemeral_pub(32) | encrypted_static(48)
//                       | encrypted_timestamp(28)
//   Response   (60 B):  type=0x02 | reserved | sender_index(4) | receiver_index(4)
//                       | ephemeral_pub(32) | encrypted_empty(16)
//   Data (16+len+16 B): type=0x04 | reserved | receiver_index(4) | counter(8)
//                       | ciphertext(len+16)
// Type 0x03 is reserved and never emitted.
inline constexpr uint8_t kMsgTypeInitiation = 0x01;
inline constexpr uint8_t kMsgTypeResponse = 0x02;
inline constexpr uint8_t kMsgTypeData = 0x04;

inline constexpr size_t kInitiationSize = 116;
inline constexpr size_t kResponseSize = 60;
inline constexpr size_t kDataHeaderSize = 16;
inline constexpr size_t kDataOverhead = kDataHeaderSize + crypto::kAeadTagSize;  // 32

struct DataMessage {
    uint32_t receiver_index = 0;
    uint64_t counter = 0;
    Bytes ciphertext;  // payload + 16-byte tag
};

using Message = std::variant<InitiationMessage, ResponseMessage, DataMessage>;

Bytes encode_message(const Message& msg);
Message decode_message(ByteSpan datagram);  // throws MalformedMessage

/// Sliding-window duplicate suppression for receive counters. Width is
/// rounded up to a multiple of 64, minimum 64, maximum 2048.
class ReplayWindow {
public:
    explicit ReplayWindow(size_t width = kDefaultWidth);

    /// True and window updated iff the counter was never accepted before and
    /// is not older than the window width behind the greatest seen.
    bool check_and_update(uint64_t counter);

    /// Same acceptance test without mutating the window.
    bool would_accept(uint64_t counter) const;

    uint64_t greatest_seen() const { return greatest_; }
    size_t width() const { return width_; }

    static constexpr size_t kDefaultWidth = 64;
    static constexpr size_t kMaxWidth = 2048;

private:
    bool bit(size_t offset) const;
    void set_bit(size_t offset);
    void shift(uint64_t by);

    uint64_t greatest_ = 0;
    size_t width_;
    std::vector<uint64_t> bitmap_;  // bit i = counter (greatest_ - i)
};

struct RekeyPolicy {
    std::chrono::milliseconds rekey_after{std::chrono::seconds(120)};
    std::chrono::milliseconds reject_after{std::chrono::seconds(180)};
    uint64_t rekey_after_messages = uint64_t(1) << 60;
};

enum class RekeyAction { NoAction, InitiateNewHandshake };

using Clock = std::chrono::steady_clock;

/// A unidirectionally-counted transport pipe derived from one completed
/// handshake. Single owner for sending; receive-side replay update is
/// internally consistent for one caller at a time.
class TransportSession {
public:
    TransportSession(uint32_t local_index, uint32_t remote_index, SessionKeys keys, HsRole role,
                     Clock::time_point established_at, RekeyPolicy policy = {},
                     size_t replay_width = ReplayWindow::kDefaultWidth);

    /// Seal a payload with the send key and the next counter.
    DataMessage send(ByteSpan payload, Clock::time_point now);

    /// Open a data message. Replay state is only updated after the tag
    /// verifies, so corrupted traffic cannot poison the window.
    Bytes recv(const DataMessage& msg, Clock::time_point now);

    RekeyAction maybe_rekey(Clock::time_point now) const;
    bool expired(Clock::time_point now) const;  // past reject_after

    uint32_t local_index() const { return local_index_; }
    uint32_t remote_index() const { return remote_index_; }
    uint64_t send_counter() const { return send_counter_; }
    HsRole role() const { return role_; }
    Clock::time_point established_at() const { return established_at_; }
    const RekeyPolicy& policy() const { return policy_; }

private:
    uint32_t local_index_;
    uint32_t remote_index_;
    SessionKeys keys_;
    uint64_t send_counter_ = 0;
    ReplayWindow window_;
    Clock::time_point established_at_;
    HsRole role_;
    RekeyPolicy policy_;
};

}  // namespace ibnsec::tunnel
