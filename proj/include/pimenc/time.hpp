#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pimenc {

/// Exact rational count of simulated nanoseconds.
///
/// Every configured latency (0.01 ns local-memory hits, 13.75 ns DRAM
/// timings, 10/3 ns AES cycles) is representable exactly, so summing N
/// copies of a latency equals N * latency bit-for-bit on every platform.
/// Stored normalized as num/den with den > 0; arithmetic runs through
/// 128-bit intermediates and throws SimTimeOverflow if a result no longer
/// fits in 64 bits after reduction.
class SimTime {
public:
    constexpr SimTime() = default;

    static SimTime zero() { return SimTime(); }
    static SimTime ns(std::int64_t v) { return SimTime(v, 1); }
    /// Exact num/den nanoseconds.
    static SimTime ratio_ns(std::int64_t num, std::int64_t den);
    static SimTime ps(std::int64_t v) { return ratio_ns(v, 1000); }
    /// n clock cycles at clock_hz: n * 1e9 / clock_hz nanoseconds, exact.
    static SimTime cycles(std::uint64_t n, std::uint64_t clock_hz);

    SimTime operator+(const SimTime& o) const;
    SimTime operator-(const SimTime& o) const;
    SimTime& operator+=(const SimTime& o) { *this = *this + o; return *this; }
    SimTime operator*(std::uint64_t k) const;
    /// Exact (this * num / den).
    SimTime mul_ratio(std::uint64_t num, std::uint64_t den) const;

    bool operator==(const SimTime& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const SimTime& o) const { return !(*this == o); }
    bool operator<(const SimTime& o) const;
    bool operator<=(const SimTime& o) const { return *this < o || *this == o; }
    bool operator>(const SimTime& o) const { return o < *this; }
    bool operator>=(const SimTime& o) const { return o <= *this; }

    static SimTime max(const SimTime& a, const SimTime& b) { return a < b ? b : a; }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    double to_ns() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Decimal string in nanoseconds, at most `frac_digits` fractional
    /// digits (truncated), trailing zeros trimmed. Deterministic.
    std::string to_string(int frac_digits = 6) const;

private:
    SimTime(std::int64_t n, std::int64_t d) : num_(n), den_(d) {}
    static SimTime make(__int128 num, __int128 den);

    std::int64_t num_{0};
    std::int64_t den_{1};
};

struct SimTimeOverflow : std::overflow_error {
    SimTimeOverflow() : std::overflow_error("simulated time overflow") {}
};

/// Exact positive rational, used for rates (bytes per nanosecond).
struct Ratio {
    std::int64_t num{1};
    std::int64_t den{1};

    /// bytes / rate nanoseconds, exact.
    SimTime time_for_bytes(std::uint64_t bytes) const;
};

/// Parse a decimal value that carries at most micro-unit precision
/// (e.g. ns values with up to 6 fractional digits) into an exact ratio.
/// Throws std::invalid_argument when v has more precision than that.
Ratio exact_ratio_from_decimal(double v, const std::string& what);

} // namespace pimenc
