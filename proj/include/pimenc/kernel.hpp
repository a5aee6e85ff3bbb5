#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pimenc/config.hpp"
#include "pimenc/crypto.hpp"
#include "pimenc/dma.hpp"
#include "pimenc/memory.hpp"

namespace pimenc {

/// Transportable kernel image. Wire format (big-endian lengths):
/// "PIMK" || u16 name length || name bytes || u32 version || payload.
struct KernelImage {
    static constexpr std::array<std::uint8_t, 4> kMagic{'P', 'I', 'M', 'K'};

    std::string name;
    std::uint32_t version = 1;
    Bytes payload;

    Bytes serialize() const;
    static std::optional<KernelImage> parse(BytesView wire);
};

enum class ParamType : std::uint8_t { Addr = 1, Size = 2, Scalar = 3, Blob = 4 };

/// Ordered, typed kernel parameters: address handles, sizes, scalars and
/// short opaque blobs (e.g. a query string). Never dataset payloads.
struct ParamRecord {
    struct Entry {
        ParamType type;
        std::uint64_t value = 0;
        Bytes blob;
    };
    std::vector<Entry> entries;

    ParamRecord& add_addr(std::uint64_t v);
    ParamRecord& add_size(std::uint64_t v);
    ParamRecord& add_scalar(std::uint64_t v);
    ParamRecord& add_blob(BytesView v);

    std::uint64_t addr(std::size_t i) const;
    std::uint64_t size(std::size_t i) const;
    std::uint64_t scalar(std::size_t i) const;
    const Bytes& blob(std::size_t i) const;

    /// u16 count || entries (type u8, then u64 BE or u8 len + bytes).
    Bytes serialize() const;
    static std::optional<ParamRecord> parse(BytesView wire);
};

struct KernelTrap : std::runtime_error {
    explicit KernelTrap(const std::string& m) : std::runtime_error("kernel trap: " + m) {}
};

/// The device ABI a running kernel sees. Confined to its own bank: local
/// memory, the bank-facing DMA engine, explicit cycle accounting and the
/// bank's protection registers. No path to the EK, other banks or host
/// memory exists here.
class KernelContext {
public:
    KernelContext(const SimConfig& cfg, MemoryModule& mem, DmaEngine& dma, std::uint32_t bank,
                  std::span<std::uint8_t> local_mem, const ParamRecord& params);

    const ParamRecord& params() const { return params_; }
    const SimConfig& config() const { return cfg_; }
    std::uint32_t bank() const { return bank_; }

    std::uint64_t cost(const std::string& name) const { return cfg_.cost(name); }
    void consume_cycles(std::uint64_t n) { cycles_ += n; }

    /// Issue a DMA request; traps on any engine error.
    void dma(const DmaRequest& req);
    /// DMA that reports tag failures to the kernel instead of trapping.
    DmaStatus dma_checked(const DmaRequest& req);

    /// Local scratch access, one fixed-latency charge per call.
    std::span<const std::uint8_t> local_read(std::uint64_t offset, std::uint64_t len);
    void local_write(std::uint64_t offset, BytesView data);

    void set_protect(AccessRange range);
    void clear_protect();

    /// Small completion summary returned to the host in the response
    /// frame. At most 200 bytes.
    void post_result(BytesView summary);

    [[noreturn]] void trap(const std::string& reason) { throw KernelTrap(reason); }

    // Accounting, read by the core after the kernel returns.
    std::uint64_t cycles() const { return cycles_; }
    SimTime dma_time() const { return dma_time_; }
    SimTime local_time() const { return local_time_; }
    SimTime total_time() const;
    const Bytes& result_summary() const { return result_; }

private:
    const SimConfig& cfg_;
    MemoryModule& mem_;
    DmaEngine& dma_;
    std::uint32_t bank_;
    std::span<std::uint8_t> local_;
    const ParamRecord& params_;

    std::uint64_t cycles_ = 0;
    SimTime dma_time_;
    SimTime local_time_;
    Bytes result_;
};

using KernelFn = std::function<void(KernelContext&)>;

/// Name -> native implementation. The serialized image is what travels,
/// is measured and size-checked; behavior is supplied here.
class KernelRegistry {
public:
    static void register_kernel(const std::string& name, KernelFn fn);
    static const KernelFn* find(const std::string& name);
    static bool contains(const std::string& name);
};

/// Registers the built-in kernels (k-means, hashtable, noop). Idempotent.
void register_builtin_kernels();

} // namespace pimenc
