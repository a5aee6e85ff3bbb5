#include "pimenc/memory.hpp"

#include <cstring>

namespace pimenc {

bool AccessRange::covers_any(std::uint64_t offset, std::uint64_t size) const {
    if (!enabled() || size == 0) return false;
    if (mask == 0) return false; // (a & 0) == base never holds for base != 0
    // (a & mask) ignores bits below the lowest set mask bit, so matching
    // is constant on aligned blocks of that width; test one offset per
    // touched block.
    std::uint64_t period = mask & (~mask + 1);
    std::uint64_t first = offset / period;
    std::uint64_t last = (offset + size - 1) / period;
    for (std::uint64_t blk = first; blk <= last; ++blk) {
        if (covers(blk * period)) return true;
    }
    return false;
}

MemoryModule::MemoryModule(const SimConfig& cfg) : cfg_(cfg) {
    banks_.resize(cfg_.n_banks);
    for (auto& b : banks_) {
        b.data.assign(cfg_.bank_size_bytes, 0);
    }
}

BankAddress MemoryModule::translate(std::uint64_t host_addr) const {
    if (host_addr < cfg_.module_base || host_addr >= cfg_.module_base + cfg_.module_bytes()) {
        throw AddressError("address outside module range");
    }
    std::uint64_t rel = host_addr - cfg_.module_base;
    return BankAddress{static_cast<std::uint32_t>(rel / cfg_.bank_size_bytes),
                       rel % cfg_.bank_size_bytes};
}

std::uint64_t MemoryModule::host_address(std::uint32_t bank, std::uint64_t offset) const {
    return cfg_.module_base + static_cast<std::uint64_t>(bank) * cfg_.bank_size_bytes + offset;
}

SimTime MemoryModule::dram_cost(std::uint32_t bank, std::uint64_t offset, std::uint64_t size,
                                bool commit) const {
    const Bank& b = banks_.at(bank);
    std::optional<std::uint64_t> row_open = b.open_row;
    SimTime lat = SimTime::zero();
    std::uint64_t first = offset / cfg_.burst_bytes;
    std::uint64_t last = (offset + size - 1) / cfg_.burst_bytes;
    for (std::uint64_t burst = first; burst <= last; ++burst) {
        std::uint64_t row = burst * cfg_.burst_bytes / cfg_.row_buffer_bytes;
        if (row_open && *row_open == row) {
            lat += cfg_.t_burst;
        } else {
            lat += cfg_.row_miss_cost();
            row_open = row;
        }
    }
    if (commit) banks_.at(bank).open_row = row_open;
    return lat;
}

SimTime MemoryModule::dram_latency(std::uint32_t bank, std::uint64_t offset, std::uint64_t size) {
    if (size == 0) throw std::invalid_argument("dram_latency: zero size");
    return dram_cost(bank, offset, size, true);
}

SimTime MemoryModule::dram_latency_peek(std::uint32_t bank, std::uint64_t offset,
                                        std::uint64_t size) const {
    if (size == 0) throw std::invalid_argument("dram_latency: zero size");
    return dram_cost(bank, offset, size, false);
}

SimTime MemoryModule::dma_bank_touch(std::uint32_t bank) {
    banks_.at(bank).open_row.reset();
    return cfg_.row_activate_cost();
}

std::optional<std::uint64_t> MemoryModule::open_row(std::uint32_t bank) const {
    return banks_.at(bank).open_row;
}

HostAccessResult MemoryModule::host_access(MemOp op, std::uint64_t addr, std::uint64_t size,
                                           BytesView payload, SimTime now) {
    if (size == 0) throw std::invalid_argument("host_access: zero size");
    BankAddress ba = translate(addr);
    if (ba.offset + size > cfg_.bank_size_bytes) {
        throw AddressError("host access crosses bank boundary");
    }
    if (op == MemOp::Write && payload.size() != size) {
        throw std::invalid_argument("host_access: payload size mismatch");
    }

    Bank& bank = banks_.at(ba.bank);
    bool blocked = bank.range.covers_any(ba.offset, size);

    HostAccessResult res;
    res.blocked = blocked;
    // Blocked accesses are charged like served ones so that protection
    // itself does not become a timing channel; they do not move the row
    // buffer or touch bank content.
    res.latency = dram_cost(ba.bank, ba.offset, size, !blocked);

    if (op == MemOp::Read) {
        if (blocked) {
            res.data.assign(size, 0);
        } else {
            res.data.assign(bank.data.begin() + static_cast<std::ptrdiff_t>(ba.offset),
                            bank.data.begin() + static_cast<std::ptrdiff_t>(ba.offset + size));
        }
    } else if (!blocked) {
        std::memcpy(bank.data.data() + ba.offset, payload.data(), size);
    }

    if (cfg_.trace_enabled) {
        trace_.push_back(TraceEvent{now, op, addr, size, blocked});
    }
    return res;
}

void MemoryModule::set_access_range(std::uint32_t bank, AccessRange range) {
    banks_.at(bank).range = range;
}

const AccessRange& MemoryModule::access_range(std::uint32_t bank) const {
    return banks_.at(bank).range;
}

std::span<std::uint8_t> MemoryModule::bank_data(std::uint32_t bank) {
    auto& d = banks_.at(bank).data;
    return {d.data(), d.size()};
}

std::span<const std::uint8_t> MemoryModule::bank_data(std::uint32_t bank) const {
    const auto& d = banks_.at(bank).data;
    return {d.data(), d.size()};
}

void MemoryModule::record_event(const TraceEvent& ev) {
    if (cfg_.trace_enabled) trace_.push_back(ev);
}

} // namespace pimenc
