#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pimenc/crypto.hpp"

namespace pimenc {

using crypto::Bytes;
using crypto::BytesView;

struct LayoutError : std::invalid_argument {
    explicit LayoutError(const std::string& m) : std::invalid_argument(m) {}
};

/// Partitioning math for encrypted data blocks. Wire format of one block
/// is iv (12) || ciphertext (size_block) || tag (16), stored contiguously.
struct BlockLayout {
    static constexpr std::uint64_t kIvBytes = crypto::kIvBytes;
    static constexpr std::uint64_t kTagBytes = crypto::kTagBytes;
    static constexpr std::uint64_t kOverhead = kIvBytes + kTagBytes; // 28

    std::uint64_t size_block = 0; // plaintext payload bytes per block
    std::uint64_t size_data = 0;  // total dataset bytes

    std::uint64_t n_blocks() const {
        return size_data == 0 ? 0 : (size_data + size_block - 1) / size_block;
    }
    std::uint64_t wire_block() const { return size_block + kOverhead; }
    std::uint64_t wire_total() const { return n_blocks() * wire_block(); }
    /// Zero bytes appended to the tail of the last block.
    std::uint64_t padding() const { return n_blocks() * size_block - size_data; }

    /// size_block = (size_available - n_split * (size_iv + size_tag)) / n_split,
    /// rounded down; the slack is per-block padding.
    static BlockLayout from_split(std::uint64_t size_available, std::uint64_t n_split,
                                  std::uint64_t size_data);
    static BlockLayout from_block_size(std::uint64_t size_block, std::uint64_t size_data);
};

/// Deterministic unique-per-key IV sequence. The (origin, channel) prefix
/// partitions the IV space between the host side and the per-bank DMA
/// engines so independent counters never collide under a shared key.
struct IvSequence {
    std::uint8_t origin = 0;
    std::uint8_t channel = 0;
    std::uint64_t counter = 0;

    crypto::Iv next();
};

namespace iv_origin {
inline constexpr std::uint8_t kHostData = 0x01;
inline constexpr std::uint8_t kDeviceDma = 0x02;
inline constexpr std::uint8_t kHostFrame = 0x03;
inline constexpr std::uint8_t kDeviceFrame = 0x04;
inline constexpr std::uint8_t kHostStaging = 0x05;
} // namespace iv_origin

/// Encrypt `data` into independently decryptable wire blocks. The last
/// block's payload is zero-padded to size_block.
std::vector<Bytes> encode_blocks(BytesView data, const BlockLayout& layout,
                                 const crypto::Key& key, IvSequence& ivs);

/// Decrypt one wire block (iv || ct || tag). nullopt on tag failure.
std::optional<Bytes> decode_block(BytesView wire, const crypto::Key& key);

/// Decrypt a full sequence of blocks and strip the tail padding.
/// nullopt if any block fails authentication.
std::optional<Bytes> decode_blocks(BytesView wire, const BlockLayout& layout,
                                   const crypto::Key& key);

} // namespace pimenc
