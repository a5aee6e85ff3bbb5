#include "pimenc/engine.hpp"

#include <cstring>

namespace pimenc {

Engine::Engine(SimConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.rng_seed), mem_(cfg_) {
    cfg_.validate();
    register_builtin_kernels();

    identity_.device_id = rng_u64();
    identity_.firmware_version = 1;
    identity_.ek = crypto::ed25519_keypair(rng_bytes32());
    identity_.kex = crypto::x25519_keypair(rng_bytes32());

    banks_.resize(cfg_.n_banks);
    for (std::uint32_t b = 0; b < cfg_.n_banks; ++b) {
        BankUnit& unit = banks_[b];
        unit.local.assign(cfg_.local_mem_bytes, 0);
        unit.dma = std::make_unique<DmaEngine>(cfg_, mem_, b,
                                               std::span<std::uint8_t>(unit.local));
        unit.session = std::make_unique<SessionDevice>(*this, b);
    }
}

std::array<std::uint8_t, 32> Engine::rng_bytes32() {
    std::array<std::uint8_t, 32> out{};
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = rng_();
        for (int j = 0; j < 8; ++j) out[i * 8 + j] = static_cast<std::uint8_t>(v >> (8 * j));
    }
    return out;
}

crypto::Key Engine::rng_key() {
    crypto::Key k{};
    for (int i = 0; i < 2; ++i) {
        std::uint64_t v = rng_();
        for (int j = 0; j < 8; ++j) k[i * 8 + j] = static_cast<std::uint8_t>(v >> (8 * j));
    }
    return k;
}

std::uint64_t Engine::cmd_reg(std::uint32_t bank) const {
    return cfg_.mmio_base() + bank * kMmioStride + kCmdRegOff;
}
std::uint64_t Engine::param_reg(std::uint32_t bank) const {
    return cfg_.mmio_base() + bank * kMmioStride + kParamRegOff;
}
std::uint64_t Engine::status_reg(std::uint32_t bank) const {
    return cfg_.mmio_base() + bank * kMmioStride + kStatusRegOff;
}
std::uint64_t Engine::resp_reg(std::uint32_t bank) const {
    return cfg_.mmio_base() + bank * kMmioStride + kRespRegOff;
}

bool Engine::is_mmio(std::uint64_t addr) const {
    return addr >= cfg_.mmio_base() &&
           addr < cfg_.mmio_base() + static_cast<std::uint64_t>(cfg_.n_banks) * kMmioStride;
}

std::span<std::uint8_t> Engine::local_mem(std::uint32_t bank) {
    auto& l = banks_.at(bank).local;
    return {l.data(), l.size()};
}

void Engine::zeroize_local(std::uint32_t bank) {
    auto& l = banks_.at(bank).local;
    std::memset(l.data(), 0, l.size());
}

void Engine::host_write(std::uint64_t addr, BytesView data) {
    if (!is_mmio(addr)) {
        auto res = mem_.host_access(MemOp::Write, addr, data.size(), data, host_time_);
        host_time_ += res.latency;
        return;
    }
    std::uint64_t rel = addr - cfg_.mmio_base();
    auto bank = static_cast<std::uint32_t>(rel / kMmioStride);
    std::uint64_t reg = rel % kMmioStride;

    mem_.record_event(TraceEvent{host_time_, MemOp::Write, addr, data.size(), false});
    host_time_ += mem_.mmio_access_cost();

    if (reg != kCmdRegOff && reg != kParamRegOff) {
        throw AddressError("MMIO register is not writable");
    }
    auto frame = Frame::from_wire(data);
    if (!frame) throw std::invalid_argument("register write is not a command frame");

    BankUnit& unit = banks_.at(bank);
    SimTime start = SimTime::max(unit.clock, host_time_);
    SessionDevice::Outcome out = (reg == kCmdRegOff) ? unit.session->handle_command(*frame)
                                                     : unit.session->handle_param(*frame);
    unit.clock = start + out.device_time;
    unit.response_ready = unit.clock;
}

Bytes Engine::host_read(std::uint64_t addr, std::uint64_t size) {
    if (!is_mmio(addr)) {
        auto res = mem_.host_access(MemOp::Read, addr, size, {}, host_time_);
        host_time_ += res.latency;
        return std::move(res.data);
    }
    std::uint64_t rel = addr - cfg_.mmio_base();
    auto bank = static_cast<std::uint32_t>(rel / kMmioStride);
    std::uint64_t reg = rel % kMmioStride;
    BankUnit& unit = banks_.at(bank);

    Bytes out;
    if (reg == kStatusRegOff) {
        if (size != kStatusBytes) throw std::invalid_argument("status register is 8 bytes");
        // Blocking poll: the host observes the status once the bank's
        // pending work is done.
        host_time_ = SimTime::max(host_time_, unit.clock);
        std::uint64_t w = unit.session->status();
        out.resize(8);
        for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(w >> (56 - 8 * i));
    } else if (reg == kRespRegOff) {
        if (size != Frame::kWireBytes) throw std::invalid_argument("response register is 281 bytes");
        host_time_ = SimTime::max(host_time_, unit.response_ready);
        const Frame& f = unit.session->last_response();
        out.assign(f.wire.begin(), f.wire.end());
    } else {
        throw AddressError("MMIO register is not readable");
    }
    mem_.record_event(TraceEvent{host_time_, MemOp::Read, addr, size, false});
    host_time_ += mem_.mmio_access_cost();
    return out;
}

void Engine::claim_bank(std::uint32_t bank) {
    if (bank >= cfg_.n_banks) throw AddressError("bank index out of range");
    if (banks_[bank].claimed) {
        throw std::runtime_error("bank " + std::to_string(bank) + " already claimed");
    }
    banks_[bank].claimed = true;
}

void Engine::release_bank(std::uint32_t bank) {
    if (bank < banks_.size()) banks_[bank].claimed = false;
}

} // namespace pimenc
