#include "pimenc/crypto.hpp"

#include <cstring>
#include <memory>

#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/sha.h>

namespace pimenc::crypto {

namespace {

struct CipherCtxFree {
    void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
struct PkeyFree {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxFree {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct PkeyCtxFree {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyFree>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree>;

[[noreturn]] void fail(const char* what) { throw CryptoError(std::string("crypto: ") + what); }

Pkey raw_private(int type, BytesView raw) {
    Pkey k(EVP_PKEY_new_raw_private_key(type, nullptr, raw.data(), raw.size()));
    if (!k) fail("raw private key import failed");
    return k;
}

Pkey raw_public(int type, BytesView raw) {
    Pkey k(EVP_PKEY_new_raw_public_key(type, nullptr, raw.data(), raw.size()));
    if (!k) fail("raw public key import failed");
    return k;
}

PubKey public_of(EVP_PKEY* key) {
    PubKey pub{};
    std::size_t len = pub.size();
    if (EVP_PKEY_get_raw_public_key(key, pub.data(), &len) != 1 || len != pub.size()) {
        fail("raw public key export failed");
    }
    return pub;
}

std::array<std::uint8_t, 32> x25519_shared(const PrivKey& priv, const PubKey& peer) {
    Pkey me = raw_private(EVP_PKEY_X25519, priv);
    Pkey them = raw_public(EVP_PKEY_X25519, peer);
    PkeyCtx ctx(EVP_PKEY_CTX_new(me.get(), nullptr));
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
        EVP_PKEY_derive_set_peer(ctx.get(), them.get()) != 1) {
        fail("x25519 derive init failed");
    }
    std::array<std::uint8_t, 32> out{};
    std::size_t len = out.size();
    if (EVP_PKEY_derive(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
        fail("x25519 derive failed");
    }
    return out;
}

Key hkdf_wrap_key(const std::array<std::uint8_t, 32>& shared, const PubKey& eph_pub,
                  const PubKey& device_pub) {
    PkeyCtx ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr));
    Bytes salt;
    salt.insert(salt.end(), eph_pub.begin(), eph_pub.end());
    salt.insert(salt.end(), device_pub.begin(), device_pub.end());
    static const char info[] = "pimenc-session-wrap";
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
        EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()) != 1 ||
        EVP_PKEY_CTX_set1_hkdf_salt(ctx.get(), salt.data(), static_cast<int>(salt.size())) != 1 ||
        EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), shared.data(), static_cast<int>(shared.size())) != 1 ||
        EVP_PKEY_CTX_add1_hkdf_info(ctx.get(), reinterpret_cast<const unsigned char*>(info),
                                    sizeof(info) - 1) != 1) {
        fail("hkdf init failed");
    }
    Key out{};
    std::size_t len = out.size();
    if (EVP_PKEY_derive(ctx.get(), out.data(), &len) != 1 || len != out.size()) fail("hkdf failed");
    return out;
}

} // namespace

Sealed aead_encrypt(const Key& key, const Iv& iv, BytesView plaintext, BytesView aad) {
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), iv.data()) != 1) {
        fail("gcm encrypt init failed");
    }
    int outl = 0;
    if (!aad.empty() &&
        EVP_EncryptUpdate(ctx.get(), nullptr, &outl, aad.data(), static_cast<int>(aad.size())) != 1) {
        fail("gcm aad failed");
    }
    Sealed out;
    out.ciphertext.resize(plaintext.size());
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &outl, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
        fail("gcm encrypt failed");
    }
    if (EVP_EncryptFinal_ex(ctx.get(), out.ciphertext.data() + out.ciphertext.size(), &outl) != 1) {
        fail("gcm finalize failed");
    }
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes, out.tag.data()) != 1) {
        fail("gcm get tag failed");
    }
    return out;
}

std::optional<Bytes> aead_decrypt(const Key& key, const Iv& iv, BytesView ciphertext,
                                  const Tag& tag, BytesView aad) {
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), iv.data()) != 1) {
        fail("gcm decrypt init failed");
    }
    int outl = 0;
    if (!aad.empty() &&
        EVP_DecryptUpdate(ctx.get(), nullptr, &outl, aad.data(), static_cast<int>(aad.size())) != 1) {
        fail("gcm aad failed");
    }
    Bytes plain(ciphertext.size());
    if (!ciphertext.empty() &&
        EVP_DecryptUpdate(ctx.get(), plain.data(), &outl, ciphertext.data(),
                          static_cast<int>(ciphertext.size())) != 1) {
        return std::nullopt;
    }
    Tag tag_copy = tag;
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag_copy.data()) != 1) {
        fail("gcm set tag failed");
    }
    if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + plain.size(), &outl) != 1) {
        return std::nullopt;
    }
    return plain;
}

Digest measure(BytesView blob) {
    Digest d{};
    SHA256(blob.data(), blob.size(), d.data());
    return d;
}

SignKeyPair ed25519_keypair(const std::array<std::uint8_t, 32>& seed) {
    Pkey key = raw_private(EVP_PKEY_ED25519, seed);
    SignKeyPair out;
    out.priv = seed;
    out.pub = public_of(key.get());
    return out;
}

Signature ek_sign(const PrivKey& priv, BytesView message) {
    Pkey key = raw_private(EVP_PKEY_ED25519, priv);
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        fail("ed25519 sign init failed");
    }
    Signature sig{};
    std::size_t len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1 ||
        len != sig.size()) {
        fail("ed25519 sign failed");
    }
    return sig;
}

bool ek_verify(const PubKey& pub, BytesView message, const Signature& sig) {
    Pkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pub.data(), pub.size()));
    if (!key) return false;
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(), message.data(), message.size()) == 1;
}

KexKeyPair x25519_keypair(const std::array<std::uint8_t, 32>& seed) {
    Pkey key = raw_private(EVP_PKEY_X25519, seed);
    KexKeyPair out;
    out.priv = seed;
    out.pub = public_of(key.get());
    return out;
}

std::array<std::uint8_t, kWrappedKeyBytes> wrap_session_key(
    const PubKey& device_pub, const Key& key, const std::array<std::uint8_t, 32>& ephemeral_seed) {
    KexKeyPair eph = x25519_keypair(ephemeral_seed);
    auto shared = x25519_shared(eph.priv, device_pub);
    Key wrap_key = hkdf_wrap_key(shared, eph.pub, device_pub);

    Iv iv{};
    std::memcpy(iv.data(), eph.pub.data(), kIvBytes); // bound to the ephemeral key
    Sealed sealed = aead_encrypt(wrap_key, iv, BytesView(key.data(), key.size()),
                                 BytesView(device_pub.data(), device_pub.size()));

    std::array<std::uint8_t, kWrappedKeyBytes> out{};
    std::memcpy(out.data(), eph.pub.data(), kPubKeyBytes);
    std::memcpy(out.data() + kPubKeyBytes, iv.data(), kIvBytes);
    std::memcpy(out.data() + kPubKeyBytes + kIvBytes, sealed.ciphertext.data(), kKeyBytes);
    std::memcpy(out.data() + kPubKeyBytes + kIvBytes + kKeyBytes, sealed.tag.data(), kTagBytes);
    return out;
}

std::optional<Key> unwrap_session_key(const PrivKey& device_priv,
                                      std::span<const std::uint8_t, kWrappedKeyBytes> wrapped) {
    PubKey eph_pub{};
    std::memcpy(eph_pub.data(), wrapped.data(), kPubKeyBytes);
    Iv iv{};
    std::memcpy(iv.data(), wrapped.data() + kPubKeyBytes, kIvBytes);
    if (std::memcmp(iv.data(), eph_pub.data(), kIvBytes) != 0) return std::nullopt;

    Pkey me = raw_private(EVP_PKEY_X25519, device_priv);
    PubKey device_pub = public_of(me.get());

    std::array<std::uint8_t, 32> shared;
    try {
        shared = x25519_shared(device_priv, eph_pub);
    } catch (const CryptoError&) {
        return std::nullopt;
    }
    Key wrap_key = hkdf_wrap_key(shared, eph_pub, device_pub);

    Tag tag{};
    std::memcpy(tag.data(), wrapped.data() + kPubKeyBytes + kIvBytes + kKeyBytes, kTagBytes);
    auto plain = aead_decrypt(wrap_key, iv,
                              BytesView(wrapped.data() + kPubKeyBytes + kIvBytes, kKeyBytes), tag,
                              BytesView(device_pub.data(), device_pub.size()));
    if (!plain || plain->size() != kKeyBytes) return std::nullopt;
    Key out{};
    std::memcpy(out.data(), plain->data(), kKeyBytes);
    return out;
}

} // namespace pimenc::crypto
