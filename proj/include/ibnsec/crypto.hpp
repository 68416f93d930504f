// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <initializer_list>

#include "ibnsec/common.hpp"

namespace ibnsec::crypto {

inline constexpr size_t kAeadTagSize = 16;
inline constexpr size_t kNonceSize = 12;
inline constexpr size_t kSignatureSize = 64;

void init();  // idempotent; called lazily by everything below

/// Incremental BLAKE2s-256 (unkeyed).
class Blake2s {
public:
    Blake2s();
    void update(ByteSpan data);
    Key32 finalize();

    static Key32 digest(ByteSpan data);
    static Key32 digest(std::initializer_list<ByteSpan> parts);

private:
    void compress(const uint8_t* block, bool last);

    std::array<uint32_t, 8> h_;
    std::array<uint8_t, 64> buf_;
    size_t buf_len_ = 0;
    uint64_t counter_ = 0;
};

Key32 hmac_blake2s(ByteSpan key, std::initializer_list<ByteSpan> parts);

/// HKDF (extract-then-expand) over HMAC-BLAKE2s. n in [1,3].
std::vector<Key32> kdf(const Key32& chaining_key, ByteSpan input, int n);

// --- X25519 ---

struct Keypair {
    Key32 private_key;  // clamped
    Key32 public_key;
};

Keypair keypair_from_entropy(const Key32& entropy);
Keypair random_keypair();

/// X25519 scalar multiplication. Throws ZeroSharedSecret on an all-zero output
/// (low-order peer point); callers must abort the handshake.
Key32 dh(const Key32& private_key, const Key32& public_key);

// --- ChaCha20-Poly1305 (IETF, RFC 8439) ---

/// Nonce layout: 4 zero bytes || 64-bit little-endian counter.
std::array<uint8_t, kNonceSize> counter_nonce(uint64_t counter);

Bytes aead_seal(const Key32& key, uint64_t counter, ByteSpan plaintext, ByteSpan aad);
Bytes aead_open(const Key32& key, uint64_t counter, ByteSpan ciphertext, ByteSpan aad);

// Raw-nonce variants (RFC test vectors use arbitrary nonces).
Bytes aead_seal_nonce(const Key32& key, const std::array<uint8_t, kNonceSize>& nonce,
                      ByteSpan plaintext, ByteSpan aad);
Bytes aead_open_nonce(const Key32& key, const std::array<uint8_t, kNonceSize>& nonce,
                      ByteSpan ciphertext, ByteSpan aad);

// --- Ed25519 (certificate signatures) ---

struct SigningKeypair {
    Key32 public_key;
    std::array<uint8_t, 64> secret_key;  // seed || public
};

SigningKeypair signing_keypair_from_seed(const Key32& seed);
std::array<uint8_t, kSignatureSize> sign(const SigningKeypair& kp, ByteSpan message);
bool verify_signature(const Key32& public_key, ByteSpan message,
                      const std::array<uint8_t, kSignatureSize>& signature);

// --- randomness ---

void random_fill(std::span<uint8_t> out);
Key32 random_key32();
uint32_t random_u32();

bool constant_time_equal(ByteSpan a, ByteSpan b);

}  // namespace ibnsec::crypto
