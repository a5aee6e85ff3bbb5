#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pimenc/config.hpp"
#include "pimenc/crypto.hpp"
#include "pimenc/time.hpp"

namespace pimenc {

using crypto::Bytes;
using crypto::BytesView;

enum class MemOp : std::uint8_t { Read, Write };

struct BankAddress {
    std::uint32_t bank;
    std::uint64_t offset;
};

/// Per-bank protected-range registers. An offset a is protected iff
/// (a & mask) == base with a nonzero register pair; base == mask == 0
/// disables the check entirely.
struct AccessRange {
    std::uint64_t base = 0;
    std::uint64_t mask = 0;

    bool enabled() const { return base != 0 || mask != 0; }
    bool covers(std::uint64_t offset) const { return enabled() && (offset & mask) == base; }
    /// True if any offset in [offset, offset+size) is protected.
    bool covers_any(std::uint64_t offset, std::uint64_t size) const;
};

struct TraceEvent {
    SimTime timestamp;
    MemOp op;
    std::uint64_t address;
    std::uint64_t size;
    bool blocked;
};

struct AddressError : std::out_of_range {
    explicit AddressError(const std::string& m) : std::out_of_range(m) {}
};

struct HostAccessResult {
    Bytes data;      // reads only; zero-filled when blocked
    SimTime latency;
    bool blocked = false;
};

/// The n-bank memory module: bank storage, open-page row-buffer timing,
/// per-bank access-control registers, the host-visible access port and
/// the bus tracer. PIM-side (DMA) accesses bypass filtering and tracing.
class MemoryModule {
public:
    explicit MemoryModule(const SimConfig& cfg);

    BankAddress translate(std::uint64_t host_addr) const;
    std::uint64_t host_address(std::uint32_t bank, std::uint64_t offset) const;

    /// Host port. Reads inside an active range return zeros; writes there
    /// are dropped. Blocked accesses are charged the same latency as
    /// served ones and leave row-buffer state untouched.
    HostAccessResult host_access(MemOp op, std::uint64_t addr, std::uint64_t size,
                                 BytesView payload, SimTime now);

    /// PIM-core-side register update. Intentionally absent from the host
    /// SDK surface; reachable only via the PROTECT command handler and
    /// the kernel ABI.
    void set_access_range(std::uint32_t bank, AccessRange range);
    const AccessRange& access_range(std::uint32_t bank) const;

    std::span<std::uint8_t> bank_data(std::uint32_t bank);
    std::span<const std::uint8_t> bank_data(std::uint32_t bank) const;

    /// Per-burst hit/miss accounting: a burst in the open row costs
    /// tBURST, anything else tRP+tRCD+tCL+tBURST and opens its row.
    SimTime dram_latency(std::uint32_t bank, std::uint64_t offset, std::uint64_t size);
    /// Same accounting without committing row-buffer changes.
    SimTime dram_latency_peek(std::uint32_t bank, std::uint64_t offset, std::uint64_t size) const;

    /// DMA engines activate their target row once per request and leave
    /// the bank precharged; streaming cost is covered by the link rate.
    SimTime dma_bank_touch(std::uint32_t bank);

    std::optional<std::uint64_t> open_row(std::uint32_t bank) const;

    /// One register access on the host bus costs one closed-row DRAM
    /// access; the interconnect cost of MMIO is otherwise unspecified.
    SimTime mmio_access_cost() const { return cfg_.row_miss_cost(); }
    void record_event(const TraceEvent& ev);

    const std::vector<TraceEvent>& trace() const { return trace_; }
    void clear_trace() { trace_.clear(); }

private:
    SimTime dram_cost(std::uint32_t bank, std::uint64_t offset, std::uint64_t size,
                      bool commit) const;

    struct Bank {
        std::vector<std::uint8_t> data;
        std::optional<std::uint64_t> open_row;
        AccessRange range;
    };

    const SimConfig& cfg_;
    mutable std::vector<Bank> banks_;
    std::vector<TraceEvent> trace_;
};

} // namespace pimenc
