#include "pimenc/kernel.hpp"

#include <cstring>
#include <map>

namespace pimenc {

namespace {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
    BytesView in;
    std::size_t pos = 0;

    bool take(void* dst, std::size_t n) {
        if (pos + n > in.size()) return false;
        std::memcpy(dst, in.data() + pos, n);
        pos += n;
        return true;
    }
    std::optional<std::uint16_t> u16() {
        std::uint8_t b[2];
        if (!take(b, 2)) return std::nullopt;
        return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
    }
    std::optional<std::uint32_t> u32() {
        std::uint8_t b[4];
        if (!take(b, 4)) return std::nullopt;
        std::uint32_t v = 0;
        for (auto x : b) v = (v << 8) | x;
        return v;
    }
    std::optional<std::uint64_t> u64() {
        std::uint8_t b[8];
        if (!take(b, 8)) return std::nullopt;
        std::uint64_t v = 0;
        for (auto x : b) v = (v << 8) | x;
        return v;
    }
};

} // namespace

Bytes KernelImage::serialize() const {
    Bytes out;
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    put_u16(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put_u32(out, version);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::optional<KernelImage> KernelImage::parse(BytesView wire) {
    Reader r{wire};
    std::array<std::uint8_t, 4> magic{};
    if (!r.take(magic.data(), 4) || magic != kMagic) return std::nullopt;
    auto name_len = r.u16();
    if (!name_len || *name_len == 0) return std::nullopt;
    std::string name(*name_len, '\0');
    if (!r.take(name.data(), *name_len)) return std::nullopt;
    auto version = r.u32();
    if (!version) return std::nullopt;
    KernelImage img;
    img.name = std::move(name);
    img.version = *version;
    img.payload.assign(wire.begin() + static_cast<std::ptrdiff_t>(r.pos), wire.end());
    return img;
}

ParamRecord& ParamRecord::add_addr(std::uint64_t v) {
    entries.push_back({ParamType::Addr, v, {}});
    return *this;
}
ParamRecord& ParamRecord::add_size(std::uint64_t v) {
    entries.push_back({ParamType::Size, v, {}});
    return *this;
}
ParamRecord& ParamRecord::add_scalar(std::uint64_t v) {
    entries.push_back({ParamType::Scalar, v, {}});
    return *this;
}
ParamRecord& ParamRecord::add_blob(BytesView v) {
    if (v.size() > 255) throw std::invalid_argument("param blob too large");
    entries.push_back({ParamType::Blob, 0, Bytes(v.begin(), v.end())});
    return *this;
}

namespace {
const ParamRecord::Entry& checked_entry(const ParamRecord& r, std::size_t i, ParamType t) {
    if (i >= r.entries.size() || r.entries[i].type != t) {
        throw KernelTrap("parameter " + std::to_string(i) + " has unexpected type");
    }
    return r.entries[i];
}
} // namespace

std::uint64_t ParamRecord::addr(std::size_t i) const {
    return checked_entry(*this, i, ParamType::Addr).value;
}
std::uint64_t ParamRecord::size(std::size_t i) const {
    return checked_entry(*this, i, ParamType::Size).value;
}
std::uint64_t ParamRecord::scalar(std::size_t i) const {
    return checked_entry(*this, i, ParamType::Scalar).value;
}
const Bytes& ParamRecord::blob(std::size_t i) const {
    return checked_entry(*this, i, ParamType::Blob).blob;
}

Bytes ParamRecord::serialize() const {
    Bytes out;
    put_u16(out, static_cast<std::uint16_t>(entries.size()));
    for (const auto& e : entries) {
        out.push_back(static_cast<std::uint8_t>(e.type));
        if (e.type == ParamType::Blob) {
            out.push_back(static_cast<std::uint8_t>(e.blob.size()));
            out.insert(out.end(), e.blob.begin(), e.blob.end());
        } else {
            put_u64(out, e.value);
        }
    }
    return out;
}

std::optional<ParamRecord> ParamRecord::parse(BytesView wire) {
    Reader r{wire};
    auto count = r.u16();
    if (!count) return std::nullopt;
    ParamRecord rec;
    for (std::uint16_t i = 0; i < *count; ++i) {
        std::uint8_t type;
        if (!r.take(&type, 1)) return std::nullopt;
        if (type < 1 || type > 4) return std::nullopt;
        Entry e;
        e.type = static_cast<ParamType>(type);
        if (e.type == ParamType::Blob) {
            std::uint8_t len;
            if (!r.take(&len, 1)) return std::nullopt;
            e.blob.resize(len);
            if (!r.take(e.blob.data(), len)) return std::nullopt;
        } else {
            auto v = r.u64();
            if (!v) return std::nullopt;
            e.value = *v;
        }
        rec.entries.push_back(std::move(e));
    }
    return rec;
}

KernelContext::KernelContext(const SimConfig& cfg, MemoryModule& mem, DmaEngine& dma,
                             std::uint32_t bank, std::span<std::uint8_t> local_mem,
                             const ParamRecord& params)
    : cfg_(cfg), mem_(mem), dma_(dma), bank_(bank), local_(local_mem), params_(params) {}

void KernelContext::dma(const DmaRequest& req) {
    DmaResult r = dma_.transfer(req);
    dma_time_ += r.latency;
    if (r.status != DmaStatus::Ok) {
        trap("dma error " + std::to_string(static_cast<int>(r.status)));
    }
}

DmaStatus KernelContext::dma_checked(const DmaRequest& req) {
    DmaResult r = dma_.transfer(req);
    dma_time_ += r.latency;
    if (r.status != DmaStatus::Ok && r.status != DmaStatus::AuthFailure) {
        trap("dma error " + std::to_string(static_cast<int>(r.status)));
    }
    return r.status;
}

std::span<const std::uint8_t> KernelContext::local_read(std::uint64_t offset, std::uint64_t len) {
    if (offset + len > local_.size()) trap("local read out of bounds");
    local_time_ += cfg_.local_mem_latency;
    return {local_.data() + offset, len};
}

void KernelContext::local_write(std::uint64_t offset, BytesView data) {
    if (offset + data.size() > local_.size()) trap("local write out of bounds");
    local_time_ += cfg_.local_mem_latency;
    std::memcpy(local_.data() + offset, data.data(), data.size());
}

void KernelContext::set_protect(AccessRange range) {
    mem_.set_access_range(bank_, range);
}

void KernelContext::clear_protect() {
    mem_.set_access_range(bank_, AccessRange{});
}

void KernelContext::post_result(BytesView summary) {
    if (summary.size() > 200) trap("result summary too large");
    result_.assign(summary.begin(), summary.end());
}

SimTime KernelContext::total_time() const {
    return cfg_.pim_cycles(cycles_) + dma_time_ + local_time_;
}

namespace {
std::map<std::string, KernelFn>& registry() {
    static std::map<std::string, KernelFn> r;
    return r;
}
} // namespace

void KernelRegistry::register_kernel(const std::string& name, KernelFn fn) {
    registry()[name] = std::move(fn);
}

const KernelFn* KernelRegistry::find(const std::string& name) {
    auto it = registry().find(name);
    return it == registry().end() ? nullptr : &it->second;
}

bool KernelRegistry::contains(const std::string& name) {
    return registry().count(name) != 0;
}

} // namespace pimenc
