#pragma once

#include <memory>
#include <random>
#include <vector>

#include "pimenc/channel.hpp"
#include "pimenc/config.hpp"
#include "pimenc/dma.hpp"
#include "pimenc/memory.hpp"

namespace pimenc {

/// Single-threaded deterministic engine owning the whole simulated
/// system: the memory module, one PIM core package per bank (local
/// memory, DMA engine, command interface) and the clocks. The host bus
/// is serial on the host clock; banks progress on their own clocks and
/// joins take the max of completion times.
///
/// All randomness (keys, nonces, benchmark patterns) comes from one
/// seeded generator, so two runs with the same config and workload are
/// bit-identical.
class Engine {
public:
    // Per-bank MMIO register map, above the banks:
    // mmio_base + bank * kMmioStride + offset.
    static constexpr std::uint64_t kMmioStride = 0x1000;
    static constexpr std::uint64_t kCmdRegOff = 0x000;
    static constexpr std::uint64_t kParamRegOff = 0x200;
    static constexpr std::uint64_t kStatusRegOff = 0x400;
    static constexpr std::uint64_t kRespRegOff = 0x600;
    static constexpr std::uint64_t kStatusBytes = 8;

    explicit Engine(SimConfig cfg);
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const SimConfig& cfg() const { return cfg_; }
    MemoryModule& mem() { return mem_; }
    const MemoryModule& mem() const { return mem_; }
    DeviceIdentity& identity() { return identity_; }

    std::uint64_t rng_u64() { return rng_(); }
    std::array<std::uint8_t, 32> rng_bytes32();
    crypto::Key rng_key();

    SimTime host_time() const { return host_time_; }
    SimTime bank_time(std::uint32_t bank) const { return banks_.at(bank).clock; }

    std::uint64_t cmd_reg(std::uint32_t bank) const;
    std::uint64_t param_reg(std::uint32_t bank) const;
    std::uint64_t status_reg(std::uint32_t bank) const;
    std::uint64_t resp_reg(std::uint32_t bank) const;

    /// Host port: data region plus the MMIO registers. This is the only
    /// surface the host SDK touches; every access lands in the trace.
    Bytes host_read(std::uint64_t addr, std::uint64_t size);
    void host_write(std::uint64_t addr, BytesView data);

    /// Host-side compute accounting (e.g. k-means aggregation).
    void charge_host_cycles(std::uint64_t n) { host_time_ += cfg_.host_cycles(n); }

    // Engine-level access for workloads and the device side.
    DmaEngine& dma(std::uint32_t bank) { return *banks_.at(bank).dma; }
    SessionDevice& session(std::uint32_t bank) { return *banks_.at(bank).session; }
    std::span<std::uint8_t> local_mem(std::uint32_t bank);
    void zeroize_local(std::uint32_t bank);

    void claim_bank(std::uint32_t bank);
    void release_bank(std::uint32_t bank);

private:
    struct BankUnit {
        std::vector<std::uint8_t> local;
        std::unique_ptr<DmaEngine> dma;
        std::unique_ptr<SessionDevice> session;
        SimTime clock;
        SimTime response_ready;
        bool claimed = false;
    };

    bool is_mmio(std::uint64_t addr) const;

    SimConfig cfg_;
    std::mt19937_64 rng_;
    DeviceIdentity identity_;
    MemoryModule mem_;
    std::vector<BankUnit> banks_;
    SimTime host_time_;
};

} // namespace pimenc
