#include "pimenc/dma.hpp"

#include <cstring>

namespace pimenc {

DmaEngine::DmaEngine(const SimConfig& cfg, MemoryModule& mem, std::uint32_t bank,
                     std::span<std::uint8_t> local_mem)
    : cfg_(cfg), mem_(mem), bank_(bank), local_(local_mem) {
    session_ivs_ = IvSequence{iv_origin::kDeviceDma, static_cast<std::uint8_t>(bank * 2), 0};
    data_ivs_ = IvSequence{iv_origin::kDeviceDma, static_cast<std::uint8_t>(bank * 2 + 1), 0};
}

void DmaEngine::program_key(DmaKeySlot slot, const crypto::Key& key) {
    if (slot == DmaKeySlot::Session) {
        session_key_ = key;
    } else {
        data_key_ = key;
    }
}

void DmaEngine::clear_keys() {
    if (session_key_) session_key_->fill(0);
    if (data_key_) data_key_->fill(0);
    session_key_.reset();
    data_key_.reset();
}

bool DmaEngine::has_key(DmaKeySlot slot) const {
    return slot == DmaKeySlot::Session ? session_key_.has_value() : data_key_.has_value();
}

SimTime DmaEngine::aes_stage_nominal(std::uint64_t wire_bytes) const {
    std::uint64_t chunks = (wire_bytes + 15) / 16;
    return cfg_.aes_cycles(chunks);
}

SimTime DmaEngine::aes_stage_exposed(std::uint64_t wire_bytes) const {
    return aes_stage_nominal(wire_bytes).mul_ratio(cfg_.aes_serial_num, cfg_.aes_serial_den);
}

SimTime DmaEngine::transfer_stage(std::uint64_t wire_bytes) const {
    return cfg_.dma_raw_bandwidth.time_for_bytes(wire_bytes) + cfg_.row_activate_cost();
}

DmaResult DmaEngine::transfer(const DmaRequest& req) {
    if (req.size == 0) return {DmaStatus::InvalidRequest, SimTime::zero()};
    if (req.crypto == DmaCrypto::Decrypt && req.direction != DmaDirection::BankRead) {
        return {DmaStatus::InvalidRequest, SimTime::zero()};
    }
    if (req.crypto == DmaCrypto::Encrypt && req.direction != DmaDirection::BankWrite) {
        return {DmaStatus::InvalidRequest, SimTime::zero()};
    }
    std::uint64_t wire = wire_size(req);
    if (req.local_offset + req.size > local_.size()) {
        return {DmaStatus::OutOfRange, SimTime::zero()};
    }
    if (req.bank_offset + wire > cfg_.bank_size_bytes) {
        return {DmaStatus::OutOfRange, SimTime::zero()};
    }

    const std::optional<crypto::Key>* key = nullptr;
    IvSequence* ivs = nullptr;
    if (req.crypto != DmaCrypto::Plain) {
        key = req.slot == DmaKeySlot::Session ? &session_key_ : &data_key_;
        ivs = req.slot == DmaKeySlot::Session ? &session_ivs_ : &data_ivs_;
        if (!key->has_value()) return {DmaStatus::KeySlotEmpty, SimTime::zero()};
    }

    SimTime latency = transfer_stage(wire);
    if (req.crypto != DmaCrypto::Plain) latency += aes_stage_exposed(wire);
    mem_.dma_bank_touch(bank_);

    auto bank = mem_.bank_data(bank_);
    std::uint8_t* local = local_.data() + req.local_offset;

    switch (req.crypto) {
    case DmaCrypto::Plain:
        if (req.direction == DmaDirection::BankRead) {
            std::memcpy(local, bank.data() + req.bank_offset, req.size);
        } else {
            std::memcpy(bank.data() + req.bank_offset, local, req.size);
        }
        break;
    case DmaCrypto::Decrypt: {
        auto plain = decode_block(BytesView(bank.data() + req.bank_offset, wire), **key);
        if (!plain || plain->size() != req.size) {
            // Failed authentication aborts the transfer with the
            // destination zeroized; latency is charged in full.
            std::memset(local, 0, req.size);
            return {DmaStatus::AuthFailure, latency};
        }
        std::memcpy(local, plain->data(), req.size);
        break;
    }
    case DmaCrypto::Encrypt: {
        crypto::Iv iv = ivs->next();
        crypto::Sealed sealed = crypto::aead_encrypt(**key, iv, BytesView(local, req.size), {});
        std::memcpy(bank.data() + req.bank_offset, iv.data(), crypto::kIvBytes);
        std::memcpy(bank.data() + req.bank_offset + crypto::kIvBytes, sealed.ciphertext.data(),
                    req.size);
        std::memcpy(bank.data() + req.bank_offset + crypto::kIvBytes + req.size,
                    sealed.tag.data(), crypto::kTagBytes);
        break;
    }
    }
    return {DmaStatus::Ok, latency};
}

} // namespace pimenc
