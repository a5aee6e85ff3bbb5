#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pimenc::crypto {

inline constexpr std::size_t kKeyBytes = 16;    // AES-128
inline constexpr std::size_t kIvBytes = 12;
inline constexpr std::size_t kTagBytes = 16;
inline constexpr std::size_t kDigestBytes = 32;
inline constexpr std::size_t kPubKeyBytes = 32;  // Ed25519 / X25519 raw keys
inline constexpr std::size_t kSigBytes = 64;

using Key = std::array<std::uint8_t, kKeyBytes>;
using Iv = std::array<std::uint8_t, kIvBytes>;
using Tag = std::array<std::uint8_t, kTagBytes>;
using Digest = std::array<std::uint8_t, kDigestBytes>;
using PubKey = std::array<std::uint8_t, kPubKeyBytes>;
using PrivKey = std::array<std::uint8_t, kPubKeyBytes>;
using Signature = std::array<std::uint8_t, kSigBytes>;

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

struct CryptoError : std::runtime_error {
    explicit CryptoError(const std::string& m) : std::runtime_error(m) {}
};

struct Sealed {
    Bytes ciphertext;
    Tag tag{};
};

/// AES-128-GCM. |ciphertext| == |plaintext|; 16-byte tag over (aad, ct).
Sealed aead_encrypt(const Key& key, const Iv& iv, BytesView plaintext, BytesView aad);

/// Returns plaintext iff the tag authenticates; nullopt on any mutation
/// of key, iv, ciphertext, tag or aad.
std::optional<Bytes> aead_decrypt(const Key& key, const Iv& iv, BytesView ciphertext,
                                  const Tag& tag, BytesView aad);

/// SHA-256 measurement of a blob.
Digest measure(BytesView blob);

// --- Device endorsement (Ed25519) ---

struct SignKeyPair {
    PrivKey priv{};
    PubKey pub{};
};

SignKeyPair ed25519_keypair(const std::array<std::uint8_t, 32>& seed);
Signature ek_sign(const PrivKey& priv, BytesView message);
bool ek_verify(const PubKey& pub, BytesView message, const Signature& sig);

// --- Session-key wrapping (X25519 + HKDF-SHA256 + AES-128-GCM) ---

struct KexKeyPair {
    PrivKey priv{};
    PubKey pub{};
};

KexKeyPair x25519_keypair(const std::array<std::uint8_t, 32>& seed);

inline constexpr std::size_t kWrappedKeyBytes = kPubKeyBytes + kIvBytes + kKeyBytes + kTagBytes; // 76

/// Encapsulate `key` to the device key-exchange public key. The caller
/// supplies the ephemeral seed (drawn from the engine RNG) so runs are
/// reproducible; fresh seeds give distinct blobs. Output size is fixed.
std::array<std::uint8_t, kWrappedKeyBytes> wrap_session_key(
    const PubKey& device_pub, const Key& key, const std::array<std::uint8_t, 32>& ephemeral_seed);

std::optional<Key> unwrap_session_key(const PrivKey& device_priv,
                                      std::span<const std::uint8_t, kWrappedKeyBytes> wrapped);

} // namespace pimenc::crypto
