// SPDX-License-Identifier: Apache-2.0
#include "ibnsec/pki.hpp"

#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace ibnsec::pki {

const char* role_name(Role role) {
    switch (role) {
        case Role::IBNSC: return "ibnsc";
        case Role::CSC: return "csc";
        case Role::CSP: return "csp";
        case Role::NOP: return "nop";
        case Role::VISP: return "visp";
    }
    return "?";
}

std::optional<Role> role_from_name(std::string_view name) {
    for (Role r : {Role::IBNSC, Role::CSC, Role::CSP, Role::NOP, Role::VISP})
        if (name == role_name(r)) return r;
    return std::nullopt;
}

Bytes Certificate::signed_portion() const {
    Bytes out;
    out.reserve(kSignedSize);
    out.push_back(uint8_t(subject_role));
    append(out, subject_static_pub);
    out.resize(kSignedSize);
    put_u64le(out.data() + 33, serial);
    put_u64le(out.data() + 41, not_before);
    put_u64le(out.data() + 49, not_after);
    return out;
}

Bytes Certificate::encode() const {
    Bytes out = signed_portion();
    append(out, issuer_signature);
    return out;
}

Certificate Certificate::decode(ByteSpan bytes) {
    if (bytes.size() != kEncodedSize) fail(ErrorCode::MalformedEnvelope, "bad certificate size");
    if (bytes[0] > uint8_t(Role::VISP)) fail(ErrorCode::MalformedEnvelope, "bad role byte");
    Certificate cert;
    cert.subject_role = Role(bytes[0]);
    std::memcpy(cert.subject_static_pub.data(), bytes.data() + 1, 32);
    cert.serial = get_u64le(bytes.data() + 33);
    cert.not_before = get_u64le(bytes.data() + 41);
    cert.not_after = get_u64le(bytes.data() + 49);
    std::memcpy(cert.issuer_signature.data(), bytes.data() + kSignedSize, 64);
    return cert;
}

CaKeypair ca_init(const Key32& entropy) {
    return crypto::signing_keypair_from_seed(entropy);
}

void verify_certificate(const Certificate& cert, const Key32& ca_pub, uint64_t now,
                        const std::set<uint64_t>* revoked) {
    if (!crypto::verify_signature(ca_pub, cert.signed_portion(), cert.issuer_signature))
        fail(ErrorCode::BadSignature, "certificate signature invalid");
    if (now < cert.not_before) fail(ErrorCode::NotYetValid, "certificate not yet valid");
    if (now > cert.not_after) fail(ErrorCode::Expired, "certificate expired");
    if (revoked && revoked->count(cert.serial)) fail(ErrorCode::Revoked, "serial revoked");
}

Pki::Pki(CaKeypair ca) : ca_(std::move(ca)) {}

void Pki::attach_log(const std::filesystem::path& log_path, uint64_t now) {
    std::unique_lock lock(mutex_);
    log_path_ = log_path;
    std::ifstream in(log_path);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string op, arg;
        ss >> op >> arg;
        if (op == "cert") {
            Certificate cert = Certificate::decode(from_hex(arg));
            issued_.insert(cert.serial);
            next_serial_ = std::max(next_serial_, cert.serial + 1);
            // replay keeps the registration even if it has since expired;
            // authorize checks the window at use time
            try {
                verify_certificate(cert, ca_.public_key, cert.not_before);
                active_[cert.subject_role] = cert;
            } catch (const Error&) {
            }
        } else if (op == "revoke") {
            revoked_.insert(std::stoull(arg));
        }
        (void)now;
    }
}

void Pki::append_log(const std::string& line) {
    if (!log_path_) return;
    std::ofstream out(*log_path_, std::ios::app);
    out << line << '\n';
}

Certificate Pki::issue_certificate(Role role, const Key32& static_pub, uint64_t not_before,
                                   uint64_t not_after) {
    if (not_before >= not_after) fail(ErrorCode::InvalidValidity, "empty validity window");
    std::unique_lock lock(mutex_);
    Certificate cert;
    cert.subject_role = role;
    cert.subject_static_pub = static_pub;
    cert.serial = next_serial_++;
    cert.not_before = not_before;
    cert.not_after = not_after;
    cert.issuer_signature = crypto::sign(ca_, cert.signed_portion());
    issued_.insert(cert.serial);
    return cert;
}

void Pki::register_peer(const Certificate& cert, uint64_t now) {
    std::unique_lock lock(mutex_);
    verify_certificate(cert, ca_.public_key, now, &revoked_);
    active_[cert.subject_role] = cert;
    issued_.insert(cert.serial);
    next_serial_ = std::max(next_serial_, cert.serial + 1);
    append_log("cert " + to_hex(cert.encode()));
}

Certificate Pki::lookup_static_key(Role role) const {
    std::shared_lock lock(mutex_);
    auto it = active_.find(role);
    if (it == active_.end()) fail(ErrorCode::UnknownRole, std::string(role_name(role)));
    return it->second;
}

void Pki::revoke(uint64_t serial) {
    std::unique_lock lock(mutex_);
    if (!issued_.count(serial)) fail(ErrorCode::UnknownSerial, std::to_string(serial));
    if (revoked_.insert(serial).second) append_log("revoke " + std::to_string(serial));
}

bool Pki::is_revoked(uint64_t serial) const {
    std::shared_lock lock(mutex_);
    return revoked_.count(serial) > 0;
}

bool Pki::authorize_static(const Key32& static_pub, uint64_t now) const {
    return static_key_status(static_pub, now) == StaticKeyStatus::Active;
}

std::optional<Role> Pki::role_of_static(const Key32& static_pub, uint64_t now) const {
    std::shared_lock lock(mutex_);
    for (const auto& [role, cert] : active_) {
        if (cert.subject_static_pub == static_pub && now >= cert.not_before &&
            now <= cert.not_after && !revoked_.count(cert.serial))
            return role;
    }
    return std::nullopt;
}

StaticKeyStatus Pki::static_key_status(const Key32& static_pub, uint64_t now) const {
    std::shared_lock lock(mutex_);
    for (const auto& [role, cert] : active_) {
        if (cert.subject_static_pub != static_pub) continue;
        if (revoked_.count(cert.serial)) return StaticKeyStatus::Revoked;
        if (now < cert.not_before) return StaticKeyStatus::NotYetValid;
        if (now > cert.not_after) return StaticKeyStatus::Expired;
        return StaticKeyStatus::Active;
    }
    return StaticKeyStatus::Unknown;
}

std::vector<Certificate> Pki::active_certificates() const {
    std::shared_lock lock(mutex_);
    std::vector<Certificate> out;
    for (const auto& [role, cert] : active_) out.push_back(cert);
    return out;
}

}  // namespace ibnsec::pki
