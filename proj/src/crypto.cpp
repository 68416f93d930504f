// SPDX-License-Identifier: Apache-2.0
#include "ibnsec/crypto.hpp"

#include <sodium.h>

#include <bit>
#include <mutex>

namespace ibnsec::crypto {

void init() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
    });
}

// --- BLAKE2s-256 (RFC 7693) ---

namespace {

constexpr std::array<uint32_t, 8> kBlake2sIv = {
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
};

constexpr uint8_t kSigma[10][16] = {
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
    {14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3},
    {11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4},
    {7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8},
    {9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13},
    {2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9},
    {12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11},
    {13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10},
    {6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5},
    {10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0},
};

inline void g(uint32_t* v, int a, int b, int c, int d, uint32_t x, uint32_t y) {
    v[a] = v[a] + v[b] + x;
    v[d] = std::rotr(v[d] ^ v[a], 16);
    v[c] = v[c] + v[d];
    v[b] = std::rotr(v[b] ^ v[c], 12);
    v[a] = v[a] + v[b] + y;
    v[d] = std::rotr(v[d] ^ v[a], 8);
    v[c] = v[c] + v[d];
    v[b] = std::rotr(v[b] ^ v[c], 7);
}

}  // namespace

Blake2s::Blake2s() : h_(kBlake2sIv), buf_{} {
    // parameter block: digest length 32, no key, fanout/depth 1
    h_[0] ^= 0x01010020;
}

void Blake2s::compress(const uint8_t* block, bool last) {
    uint32_t m[16];
    for (int i = 0; i < 16; ++i) m[i] = get_u32le(block + 4 * i);

    uint32_t v[16];
    for (int i = 0; i < 8; ++i) v[i] = h_[i];
    for (int i = 0; i < 8; ++i) v[i + 8] = kBlake2sIv[i];
    v[12] ^= uint32_t(counter_);
    v[13] ^= uint32_t(counter_ >> 32);
    if (last) v[14] = ~v[14];

    for (int round = 0; round < 10; ++round) {
        const uint8_t* s = kSigma[round];
        g(v, 0, 4, 8, 12, m[s[0]], m[s[1]]);
        g(v, 1, 5, 9, 13, m[s[2]], m[s[3]]);
        g(v, 2, 6, 10, 14, m[s[4]], m[s[5]]);
        g(v, 3, 7, 11, 15, m[s[6]], m[s[7]]);
        g(v, 0, 5, 10, 15, m[s[8]], m[s[9]]);
        g(v, 1, 6, 11, 12, m[s[10]], m[s[11]]);
        g(v, 2, 7, 8, 13, m[s[12]], m[s[13]]);
        g(v, 3, 4, 9, 14, m[s[14]], m[s[15]]);
    }

    for (int i = 0; i < 8; ++i) h_[i] ^= v[i] ^ v[i + 8];
}

void Blake2s::update(ByteSpan data) {
    size_t off = 0;
    while (off < data.size()) {
        if (buf_len_ == 64) {
            // only compress a full buffer once more data is known to follow,
            // so the final block (full or partial) carries the last flag
            counter_ += 64;
            compress(buf_.data(), false);
            buf_len_ = 0;
        }
        size_t take = std::min<size_t>(64 - buf_len_, data.size() - off);
        std::memcpy(buf_.data() + buf_len_, data.data() + off, take);
        buf_len_ += take;
        off += take;
    }
}

Key32 Blake2s::finalize() {
    counter_ += buf_len_;
    std::memset(buf_.data() + buf_len_, 0, 64 - buf_len_);
    compress(buf_.data(), true);
    Key32 out;
    for (int i = 0; i < 8; ++i) put_u32le(out.data() + 4 * i, h_[i]);
    return out;
}

Key32 Blake2s::digest(ByteSpan data) {
    Blake2s b;
    b.update(data);
    return b.finalize();
}

Key32 Blake2s::digest(std::initializer_list<ByteSpan> parts) {
    Blake2s b;
    for (ByteSpan p : parts) b.update(p);
    return b.finalize();
}

// HMAC per RFC 2104 with BLAKE2s (block size 64).
Key32 hmac_blake2s(ByteSpan key, std::initializer_list<ByteSpan> parts) {
    std::array<uint8_t, 64> block{};
    if (key.size() > 64) {
        Key32 kh = Blake2s::digest(key);
        std::memcpy(block.data(), kh.data(), kh.size());
    } else {
        std::memcpy(block.data(), key.data(), key.size());
    }

    std::array<uint8_t, 64> ipad, opad;
    for (int i = 0; i < 64; ++i) {
        ipad[i] = block[i] ^ 0x36;
        opad[i] = block[i] ^ 0x5c;
    }

    Blake2s inner;
    inner.update(ipad);
    for (ByteSpan p : parts) inner.update(p);
    Key32 inner_digest = inner.finalize();

    return Blake2s::digest({ByteSpan(opad), ByteSpan(inner_digest)});
}

std::vector<Key32> kdf(const Key32& chaining_key, ByteSpan input, int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("kdf: n must be 1..3");
    Key32 prk = hmac_blake2s(chaining_key, {input});
    std::vector<Key32> out;
    out.reserve(n);
    uint8_t counter = 1;
    Key32 t = hmac_blake2s(prk, {ByteSpan(&counter, 1)});
    out.push_back(t);
    while (int(out.size()) < n) {
        ++counter;
        t = hmac_blake2s(prk, {ByteSpan(t), ByteSpan(&counter, 1)});
        out.push_back(t);
    }
    return out;
}

// --- X25519 ---

static Key32 clamp_scalar(Key32 s) {
    s[0] &= 248;
    s[31] &= 127;
    s[31] |= 64;
    return s;
}

Keypair keypair_from_entropy(const Key32& entropy) {
    init();
    Keypair kp;
    kp.private_key = clamp_scalar(entropy);
    crypto_scalarmult_base(kp.public_key.data(), kp.private_key.data());
    return kp;
}

Keypair random_keypair() {
    return keypair_from_entropy(random_key32());
}

Key32 dh(const Key32& private_key, const Key32& public_key) {
    init();
    Key32 out{};
    int rc = crypto_scalarmult(out.data(), private_key.data(), public_key.data());
    bool zero = true;
    for (uint8_t b : out) zero &= (b == 0);
    if (rc != 0 || zero) fail(ErrorCode::ZeroSharedSecret, "low-order peer point");
    return out;
}

// --- AEAD ---

std::array<uint8_t, kNonceSize> counter_nonce(uint64_t counter) {
    std::array<uint8_t, kNonceSize> nonce{};
    put_u64le(nonce.data() + 4, counter);
    return nonce;
}

Bytes aead_seal_nonce(const Key32& key, const std::array<uint8_t, kNonceSize>& nonce,
                      ByteSpan plaintext, ByteSpan aad) {
    init();
    Bytes out(plaintext.size() + kAeadTagSize);
    unsigned long long out_len = 0;
    crypto_aead_chacha20poly1305_ietf_encrypt(
        out.data(), &out_len, plaintext.data(), plaintext.size(), aad.data(), aad.size(),
        nullptr, nonce.data(), key.data());
    out.resize(out_len);
    return out;
}

Bytes aead_open_nonce(const Key32& key, const std::array<uint8_t, kNonceSize>& nonce,
                      ByteSpan ciphertext, ByteSpan aad) {
    init();
    if (ciphertext.size() < kAeadTagSize) fail(ErrorCode::AuthFailure, "ciphertext too short");
    Bytes out(ciphertext.size() - kAeadTagSize);
    unsigned long long out_len = 0;
    int rc = crypto_aead_chacha20poly1305_ietf_decrypt(
        out.data(), &out_len, nullptr, ciphertext.data(), ciphertext.size(), aad.data(),
        aad.size(), nonce.data(), key.data());
    if (rc != 0) fail(ErrorCode::AuthFailure, "tag verification failed");
    out.resize(out_len);
    return out;
}

Bytes aead_seal(const Key32& key, uint64_t counter, ByteSpan plaintext, ByteSpan aad) {
    if (counter == UINT64_MAX) fail(ErrorCode::NonceExhausted, "counter would wrap");
    return aead_seal_nonce(key, counter_nonce(counter), plaintext, aad);
}

Bytes aead_open(const Key32& key, uint64_t counter, ByteSpan ciphertext, ByteSpan aad) {
    return aead_open_nonce(key, counter_nonce(counter), ciphertext, aad);
}

// --- Ed25519 ---

SigningKeypair signing_keypair_from_seed(const Key32& seed) {
    init();
    SigningKeypair kp;
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
    return kp;
}

std::array<uint8_t, kSignatureSize> sign(const SigningKeypair& kp, ByteSpan message) {
    init();
    std::array<uint8_t, kSignatureSize> sig{};
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                         kp.secret_key.data());
    return sig;
}

bool verify_signature(const Key32& public_key, ByteSpan message,
                      const std::array<uint8_t, kSignatureSize>& signature) {
    init();
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       public_key.data()) == 0;
}

// --- randomness ---

void random_fill(std::span<uint8_t> out) {
    init();
    randombytes_buf(out.data(), out.size());
}

Key32 random_key32() {
    Key32 k;
    random_fill(k);
    return k;
}

uint32_t random_u32() {
    init();
    return randombytes_random();
}

bool constant_time_equal(ByteSpan a, ByteSpan b) {
    if (a.size() != b.size()) return false;
    init();
    return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace ibnsec::crypto
