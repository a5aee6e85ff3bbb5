#include "pimenc/time.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace pimenc {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr __int128 kI64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kI64Min = std::numeric_limits<std::int64_t>::min();

} // namespace

SimTime SimTime::make(__int128 num, __int128 den) {
    if (den == 0) throw std::invalid_argument("SimTime: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) return SimTime(0, 1);
    __int128 g = gcd128(num, den);
    num /= g;
    den /= g;
    if (num > kI64Max || num < kI64Min || den > kI64Max) throw SimTimeOverflow();
    return SimTime(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

SimTime SimTime::ratio_ns(std::int64_t num, std::int64_t den) {
    return make(num, den);
}

SimTime SimTime::cycles(std::uint64_t n, std::uint64_t clock_hz) {
    if (clock_hz == 0) throw std::invalid_argument("SimTime::cycles: zero clock");
    // n cycles = n * (1e9 / hz) ns
    return make(static_cast<__int128>(n) * 1000000000, static_cast<__int128>(clock_hz));
}

SimTime SimTime::operator+(const SimTime& o) const {
    __int128 n = static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    return make(n, d);
}

SimTime SimTime::operator-(const SimTime& o) const {
    __int128 n = static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    return make(n, d);
}

SimTime SimTime::operator*(std::uint64_t k) const {
    return make(static_cast<__int128>(num_) * static_cast<__int128>(k), den_);
}

SimTime SimTime::mul_ratio(std::uint64_t num, std::uint64_t den) const {
    if (den == 0) throw std::invalid_argument("SimTime::mul_ratio: zero denominator");
    return make(static_cast<__int128>(num_) * static_cast<__int128>(num),
                static_cast<__int128>(den_) * static_cast<__int128>(den));
}

bool SimTime::operator<(const SimTime& o) const {
    return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
}

std::string SimTime::to_string(int frac_digits) const {
    __int128 n = num_;
    std::string sign;
    if (n < 0) {
        sign = "-";
        n = -n;
    }
    __int128 d = den_;
    __int128 whole = n / d;
    __int128 rem = n % d;

    std::string head;
    if (whole == 0) {
        head = "0";
    } else {
        while (whole > 0) {
            head.insert(head.begin(), static_cast<char>('0' + static_cast<int>(whole % 10)));
            whole /= 10;
        }
    }
    std::string frac;
    for (int i = 0; i < frac_digits && rem != 0; ++i) {
        rem *= 10;
        frac.push_back(static_cast<char>('0' + static_cast<int>(rem / d)));
        rem %= d;
    }
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (frac.empty()) return sign + head;
    return sign + head + "." + frac;
}

SimTime Ratio::time_for_bytes(std::uint64_t bytes) const {
    // bytes / (num/den) = bytes * den / num
    if (num <= 0 || den <= 0) throw std::invalid_argument("Ratio: non-positive rate");
    __int128 n = static_cast<__int128>(bytes) * den;
    if (n > std::numeric_limits<std::int64_t>::max()) throw SimTimeOverflow();
    return SimTime::ratio_ns(static_cast<std::int64_t>(n), num);
}

Ratio exact_ratio_from_decimal(double v, const std::string& what) {
    if (!(v > 0) || !std::isfinite(v)) {
        throw std::invalid_argument(what + ": must be a positive finite number");
    }
    double scaled = v * 1e6;
    double rounded = std::nearbyint(scaled);
    if (std::fabs(scaled - rounded) > 1e-3 || rounded < 1 || rounded > 9e18) {
        throw std::invalid_argument(what + ": more than 6 decimal digits of precision");
    }
    std::int64_t num = static_cast<std::int64_t>(rounded);
    std::int64_t den = 1000000;
    std::int64_t g = std::gcd(num, den);
    return Ratio{num / g, den / g};
}

} // namespace pimenc
