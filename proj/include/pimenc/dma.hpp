#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "pimenc/blocks.hpp"
#include "pimenc/config.hpp"
#include "pimenc/memory.hpp"
#include "pimenc/time.hpp"

namespace pimenc {

enum class DmaDirection : std::uint8_t { BankRead, BankWrite };
enum class DmaCrypto : std::uint8_t { Plain, Decrypt, Encrypt };
enum class DmaKeySlot : std::uint8_t { Session, Data };

struct DmaRequest {
    std::uint64_t bank_offset = 0;
    std::uint64_t local_offset = 0;
    std::uint64_t size = 0; // plaintext payload bytes
    DmaDirection direction = DmaDirection::BankRead;
    DmaCrypto crypto = DmaCrypto::Plain;
    DmaKeySlot slot = DmaKeySlot::Data;
};

enum class DmaStatus : std::uint8_t {
    Ok,
    AuthFailure,
    KeySlotEmpty,
    InvalidRequest,
    OutOfRange,
};

struct DmaResult {
    DmaStatus status = DmaStatus::Ok;
    SimTime latency;
};

/// AES-capable DMA engine of one PIM core: moves data between its bank
/// and the core's local memory, transforming through AES-GCM in flight.
/// Crypto never consumes PIM-core cycles; its cost is engine latency.
class DmaEngine {
public:
    DmaEngine(const SimConfig& cfg, MemoryModule& mem, std::uint32_t bank,
              std::span<std::uint8_t> local_mem);

    void program_key(DmaKeySlot slot, const crypto::Key& key);
    void clear_keys();
    bool has_key(DmaKeySlot slot) const;

    DmaResult transfer(const DmaRequest& req);

    /// Bytes crossing the bank port: payload plus 28 per-block overhead
    /// in a crypto mode.
    std::uint64_t wire_size(const DmaRequest& req) const {
        return req.crypto == DmaCrypto::Plain ? req.size : req.size + BlockLayout::kOverhead;
    }

    /// One AES cycle per 16-byte chunk at the engine clock.
    SimTime aes_stage_nominal(std::uint64_t wire_bytes) const;
    /// The serial residue of the AES stage after overlap with streaming
    /// (nominal * aes_serial_num / aes_serial_den). This is the term a
    /// crypto-mode transfer adds on top of the plain transfer time.
    SimTime aes_stage_exposed(std::uint64_t wire_bytes) const;
    /// Link streaming plus the per-request row activation.
    SimTime transfer_stage(std::uint64_t wire_bytes) const;

private:
    const SimConfig& cfg_;
    MemoryModule& mem_;
    std::uint32_t bank_;
    std::span<std::uint8_t> local_;

    std::optional<crypto::Key> session_key_;
    std::optional<crypto::Key> data_key_;
    IvSequence session_ivs_;
    IvSequence data_ivs_;
};

} // namespace pimenc
