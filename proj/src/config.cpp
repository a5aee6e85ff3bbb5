#include "pimenc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pimenc {

using nlohmann::json;

std::map<std::string, std::uint64_t> SimConfig::default_cost_table() {
    return {
        // PIM kernel costs (PIM-core cycles)
        {"kernel_dispatch", 256},
        {"command_handle", 64},
        {"kmeans_batch_setup", 128},
        {"kmeans_dist_base", 8},
        {"kmeans_dist_per_dim", 4},
        {"kmeans_membership_update", 4},
        {"hashtable_hash", 32},
        {"hashtable_probe", 8},
        // Host-side costs (host cycles)
        {"host_aggregate_base", 64},
        {"host_aggregate_per_cluster_dim", 2},
        // Host k-means baseline estimate (host cycles); calibration only.
        {"host_dist_base", 16},
        {"host_dist_per_dim", 2},
        {"host_object_overhead", 16},
    };
}

std::uint64_t SimConfig::cost(const std::string& name) const {
    auto it = kernel_cost_table.find(name);
    if (it == kernel_cost_table.end()) throw ConfigError("unknown cost table entry: " + name);
    return it->second;
}

void SimConfig::validate() const {
    auto positive = [](std::uint64_t v, const char* key) {
        if (v == 0) throw ConfigError(std::string("config: ") + key + " must be positive");
    };
    positive(host_clock_hz, "host_clock_hz");
    positive(pim_clock_hz, "pim_clock_hz");
    positive(aes_clock_hz, "aes_clock_hz");
    positive(n_banks, "n_banks");
    positive(bank_size_bytes, "bank_size_bytes");
    positive(local_mem_bytes, "local_mem_bytes");
    positive(row_buffer_bytes, "row_buffer_bytes");
    positive(burst_bytes, "burst_bytes");
    if ((bank_size_bytes & (bank_size_bytes - 1)) != 0) {
        throw ConfigError("config: bank_size_bytes must be a power of two");
    }
    if (local_mem_bytes >= bank_size_bytes) {
        throw ConfigError("config: local_mem_bytes must be smaller than bank_size_bytes");
    }
    if (row_buffer_bytes % burst_bytes != 0) {
        throw ConfigError("config: row_buffer_bytes must be a multiple of burst_bytes");
    }
    if (aes_serial_den == 0 || aes_serial_num > aes_serial_den) {
        throw ConfigError("config: aes_serial fraction must be in (0, 1]");
    }
    auto nonneg_time = [](const SimTime& t, const char* key) {
        if (t.is_negative()) throw ConfigError(std::string("config: ") + key + " must be non-negative");
    };
    nonneg_time(local_mem_latency, "local_mem_latency_ns");
    nonneg_time(t_rp, "tRP_ns");
    nonneg_time(t_rcd, "tRCD_ns");
    nonneg_time(t_cl, "tCL_ns");
    nonneg_time(t_burst, "tBURST_ns");
    if (module_base % bank_size_bytes != 0) {
        throw ConfigError("config: module_base must be aligned to bank_size_bytes");
    }
}

namespace {

std::uint64_t get_u64(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        auto s = v.get<std::int64_t>();
        if (s < 0) throw ConfigError("config: " + key + " must be non-negative");
        return static_cast<std::uint64_t>(s);
    }
    if (v.is_number_float()) {
        double d = v.get<double>();
        double r = std::nearbyint(d);
        if (d < 0 || std::fabs(d - r) > 1e-6) {
            throw ConfigError("config: " + key + " must be a non-negative integer");
        }
        return static_cast<std::uint64_t>(r);
    }
    throw ConfigError("config: " + key + " must be a number");
}

SimTime get_time_ns(const json& j, const std::string& key) {
    double d = j.at(key).get<double>();
    try {
        Ratio r = exact_ratio_from_decimal(d, key);
        return SimTime::ratio_ns(r.num, r.den);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

} // namespace

SimConfig load_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");

    static const std::set<std::string> known = {
        "host_clock_hz", "pim_clock_hz", "aes_clock_hz",
        "n_banks", "bank_size_bytes", "local_mem_bytes",
        "row_buffer_bytes", "burst_bytes",
        "local_mem_latency_ns", "tRP_ns", "tRCD_ns", "tCL_ns", "tBURST_ns",
        "dma_raw_bandwidth_bytes_per_ns",
        "aes_serial_num", "aes_serial_den",
        "module_base", "trace_enabled", "rng_seed",
        "kernel_cost_table",
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("config: unknown key: " + it.key());
    }

    SimConfig cfg;
    if (doc.contains("host_clock_hz")) cfg.host_clock_hz = get_u64(doc, "host_clock_hz");
    if (doc.contains("pim_clock_hz")) cfg.pim_clock_hz = get_u64(doc, "pim_clock_hz");
    if (doc.contains("aes_clock_hz")) cfg.aes_clock_hz = get_u64(doc, "aes_clock_hz");
    if (doc.contains("n_banks")) cfg.n_banks = static_cast<std::uint32_t>(get_u64(doc, "n_banks"));
    if (doc.contains("bank_size_bytes")) cfg.bank_size_bytes = get_u64(doc, "bank_size_bytes");
    if (doc.contains("local_mem_bytes")) cfg.local_mem_bytes = get_u64(doc, "local_mem_bytes");
    if (doc.contains("row_buffer_bytes")) cfg.row_buffer_bytes = static_cast<std::uint32_t>(get_u64(doc, "row_buffer_bytes"));
    if (doc.contains("burst_bytes")) cfg.burst_bytes = static_cast<std::uint32_t>(get_u64(doc, "burst_bytes"));
    if (doc.contains("local_mem_latency_ns")) cfg.local_mem_latency = get_time_ns(doc, "local_mem_latency_ns");
    if (doc.contains("tRP_ns")) cfg.t_rp = get_time_ns(doc, "tRP_ns");
    if (doc.contains("tRCD_ns")) cfg.t_rcd = get_time_ns(doc, "tRCD_ns");
    if (doc.contains("tCL_ns")) cfg.t_cl = get_time_ns(doc, "tCL_ns");
    if (doc.contains("tBURST_ns")) cfg.t_burst = get_time_ns(doc, "tBURST_ns");
    if (doc.contains("dma_raw_bandwidth_bytes_per_ns")) {
        double d = doc.at("dma_raw_bandwidth_bytes_per_ns").get<double>();
        try {
            cfg.dma_raw_bandwidth = exact_ratio_from_decimal(d, "dma_raw_bandwidth_bytes_per_ns");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (doc.contains("aes_serial_num")) cfg.aes_serial_num = static_cast<std::uint32_t>(get_u64(doc, "aes_serial_num"));
    if (doc.contains("aes_serial_den")) cfg.aes_serial_den = static_cast<std::uint32_t>(get_u64(doc, "aes_serial_den"));
    if (doc.contains("module_base")) cfg.module_base = get_u64(doc, "module_base");
    if (doc.contains("trace_enabled")) cfg.trace_enabled = doc.at("trace_enabled").get<bool>();
    if (doc.contains("rng_seed")) cfg.rng_seed = get_u64(doc, "rng_seed");
    if (doc.contains("kernel_cost_table")) {
        const json& table = doc.at("kernel_cost_table");
        if (!table.is_object()) throw ConfigError("config: kernel_cost_table must be an object");
        for (auto it = table.begin(); it != table.end(); ++it) {
            if (!cfg.kernel_cost_table.count(it.key())) {
                throw ConfigError("config: unknown cost table entry: " + it.key());
            }
            cfg.kernel_cost_table[it.key()] = get_u64(table, it.key());
        }
    }

    cfg.validate();
    return cfg;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

} // namespace pimenc
