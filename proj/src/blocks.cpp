#include "pimenc/blocks.hpp"

#include <cstring>

namespace pimenc {

BlockLayout BlockLayout::from_split(std::uint64_t size_available, std::uint64_t n_split,
                                    std::uint64_t size_data) {
    if (n_split == 0) throw LayoutError("block layout: n_split must be positive");
    std::uint64_t overhead = n_split * kOverhead;
    if (size_available <= overhead) {
        throw LayoutError("block layout: no payload space after per-block overhead");
    }
    std::uint64_t size_block = (size_available - overhead) / n_split;
    if (size_block == 0) throw LayoutError("block layout: size_block is zero");
    return BlockLayout{size_block, size_data};
}

BlockLayout BlockLayout::from_block_size(std::uint64_t size_block, std::uint64_t size_data) {
    if (size_block == 0) throw LayoutError("block layout: size_block must be positive");
    return BlockLayout{size_block, size_data};
}

crypto::Iv IvSequence::next() {
    crypto::Iv iv{};
    iv[0] = origin;
    iv[1] = channel;
    std::uint64_t c = counter++;
    for (int i = 0; i < 8; ++i) {
        iv[4 + i] = static_cast<std::uint8_t>(c >> (56 - 8 * i));
    }
    return iv;
}

std::vector<Bytes> encode_blocks(BytesView data, const BlockLayout& layout,
                                 const crypto::Key& key, IvSequence& ivs) {
    if (layout.size_block == 0) throw LayoutError("block layout: size_block is zero");
    std::vector<Bytes> out;
    std::uint64_t n = layout.n_blocks();
    if (layout.size_data != data.size()) {
        throw LayoutError("block layout: size_data does not match data length");
    }
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint64_t begin = i * layout.size_block;
        std::uint64_t len = std::min<std::uint64_t>(layout.size_block, data.size() - begin);
        Bytes payload(layout.size_block, 0);
        std::memcpy(payload.data(), data.data() + begin, len);

        crypto::Iv iv = ivs.next();
        crypto::Sealed sealed = crypto::aead_encrypt(key, iv, payload, {});

        Bytes wire(layout.wire_block());
        std::memcpy(wire.data(), iv.data(), crypto::kIvBytes);
        std::memcpy(wire.data() + crypto::kIvBytes, sealed.ciphertext.data(), layout.size_block);
        std::memcpy(wire.data() + crypto::kIvBytes + layout.size_block, sealed.tag.data(),
                    crypto::kTagBytes);
        out.push_back(std::move(wire));
    }
    return out;
}

std::optional<Bytes> decode_block(BytesView wire, const crypto::Key& key) {
    if (wire.size() < BlockLayout::kOverhead + 1) return std::nullopt;
    crypto::Iv iv{};
    std::memcpy(iv.data(), wire.data(), crypto::kIvBytes);
    crypto::Tag tag{};
    std::memcpy(tag.data(), wire.data() + wire.size() - crypto::kTagBytes, crypto::kTagBytes);
    BytesView ct(wire.data() + crypto::kIvBytes, wire.size() - BlockLayout::kOverhead);
    return crypto::aead_decrypt(key, iv, ct, tag, {});
}

std::optional<Bytes> decode_blocks(BytesView wire, const BlockLayout& layout,
                                   const crypto::Key& key) {
    std::uint64_t n = layout.n_blocks();
    if (wire.size() != layout.wire_total()) return std::nullopt;
    Bytes out;
    out.reserve(n * layout.size_block);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto block = decode_block(wire.subspan(i * layout.wire_block(), layout.wire_block()), key);
        if (!block) return std::nullopt;
        out.insert(out.end(), block->begin(), block->end());
    }
    out.resize(layout.size_data); // strip tail padding
    return out;
}

} // namespace pimenc
