// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>

#include "ibnsec/crypto.hpp"

namespace ibnsec::pki {

enum class Role : uint8_t { IBNSC = 0, CSC = 1, CSP = 2, NOP = 3, VISP = 4 };

const char* role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);

/// Fixed-layout certificate binding a stakeholder role to a static public
/// key. Canonical encoding (121 bytes):
///   role(1) | static_pub(32) | serial(8 LE) | not_before(8 LE)
///   | not_after(8 LE) | signature(64)
/// The Ed25519 signature covers the first 57 bytes.
struct Certificate {
    Role subject_role = Role::CSC;
    Key32 subject_static_pub{};
    uint64_t serial = 0;
    uint64_t not_before = 0;  // UTC seconds
    uint64_t not_after = 0;
    std::array<uint8_t, 64> issuer_signature{};

    static constexpr size_t kSignedSize = 1 + 32 + 8 + 8 + 8;
    static constexpr size_t kEncodedSize = kSignedSize + 64;

    Bytes encode() const;
    Bytes signed_portion() const;
    static Certificate decode(ByteSpan bytes);  // throws MalformedEnvelope

    bool operator==(const Certificate&) const = default;
};

using CaKeypair = crypto::SigningKeypair;

/// Deterministic CA signing keypair from 32 bytes of entropy.
CaKeypair ca_init(const Key32& entropy);

/// Signature + validity-window + revocation check.
/// Throws BadSignature, NotYetValid, Expired, Revoked.
void verify_certificate(const Certificate& cert, const Key32& ca_pub, uint64_t now,
                        const std::set<uint64_t>* revoked = nullptr);

enum class StaticKeyStatus { Active, Revoked, Expired, NotYetValid, Unknown };

/// CA plus the role→certificate registry the IBNSC serves. Issue/register/
/// revoke are serialized; reads are concurrent. The tunnel's authorize
/// predicate is a synchronized view over this object (documented choice:
/// a revocation takes effect for handshakes begun after it returns).
class Pki {
public:
    explicit Pki(CaKeypair ca);

    /// Re-attach with persistence: existing log is replayed, later mutations
    /// are appended.
    void attach_log(const std::filesystem::path& log_path, uint64_t now);

    const Key32& ca_public_key() const { return ca_.public_key; }

    Certificate issue_certificate(Role role, const Key32& static_pub, uint64_t not_before,
                                  uint64_t not_after);  // InvalidValidity
    void register_peer(const Certificate& cert, uint64_t now);  // verification errors propagate
    Certificate lookup_static_key(Role role) const;             // UnknownRole
    void revoke(uint64_t serial);                               // UnknownSerial; idempotent
    bool is_revoked(uint64_t serial) const;

    /// True iff the static key equals the active, unexpired, unrevoked
    /// certificate of some role.
    bool authorize_static(const Key32& static_pub, uint64_t now) const;
    std::optional<Role> role_of_static(const Key32& static_pub, uint64_t now) const;
    /// Why a static key does not (or does) authorize; used for audit detail.
    StaticKeyStatus static_key_status(const Key32& static_pub, uint64_t now) const;

    std::vector<Certificate> active_certificates() const;

private:
    void append_log(const std::string& line);

    CaKeypair ca_;
    uint64_t next_serial_ = 1;
    std::map<Role, Certificate> active_;
    std::set<uint64_t> issued_;
    std::set<uint64_t> revoked_;
    std::optional<std::filesystem::path> log_path_;
    mutable std::shared_mutex mutex_;
};

}  // namespace ibnsec::pki
