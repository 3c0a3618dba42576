#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "uzz/errors.hpp"

namespace uzz {

// Exact rational arithmetic on 64-bit numerator/denominator, always reduced,
// with 128-bit intermediates. Distances, radii and constants all live here;
// the library has no floating point. Values outside the 64-bit range throw
// overflow_error instead of silently losing exactness.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    // 2^k as an exact rational; |k| must stay within the 64-bit mantissa.
    static Rational pow2(int k) {
        if (k > 62 || k < -62) throw overflow_error("pow2: exponent out of range");
        if (k >= 0) return Rational(std::int64_t(1) << k);
        Rational r;
        r.num_ = 1;
        r.den_ = std::int64_t(1) << (-k);
        return r;
    }

    // Accepts "p", "-p" or "p/q" with q > 0.
    static Rational parse(std::string_view s);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_positive() const { return num_ > 0; }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return fromWide((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                        (__int128)a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return fromWide((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                        (__int128)a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return fromWide((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw domain_error("rational division by zero");
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        if (d < 0) { n = -n; d = -d; }
        return fromWide(n, d);
    }

    // Unique m with 2^m <= *this < 2^(m+1); requires a positive value.
    int floor_log2() const;
    // Smallest m with *this <= 2^m; requires a positive value.
    int ceil_log2() const {
        int m = floor_log2();
        return is_pow2() ? m : m + 1;
    }
    bool is_pow2() const {
        auto p = [](std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; };
        return (num_ == 1 && p(den_)) || (den_ == 1 && p(num_));
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    void normalize() {
        if (den_ == 0) throw malformed_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    static Rational fromWide(__int128 n, __int128 d);
};

inline Rational Rational::fromWide(__int128 n, __int128 d) {
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    const __int128 lim = (__int128)INT64_MAX;
    if (n > lim || n < -lim || d > lim) throw overflow_error("rational out of 64-bit range");
    Rational r;
    r.num_ = (std::int64_t)n;
    r.den_ = (std::int64_t)d;
    if (r.den_ == 0) throw malformed_error("rational with zero denominator");
    return r;
}

inline int Rational::floor_log2() const {
    if (num_ <= 0) throw domain_error("floor_log2 of a non-positive rational");
    // find m with 2^m <= num/den < 2^(m+1), i.e. num >= den*2^m and num < den*2^(m+1)
    int m = 0;
    if (num_ >= den_) {
        while (m < 126 && ((__int128)den_ << (m + 1)) <= (__int128)num_) ++m;
    } else {
        m = -1;
        while (m > -127 && ((__int128)num_ << (-m)) < (__int128)den_) --m;
    }
    return m;
}

inline Rational Rational::parse(std::string_view s) {
    auto parse_int = [](std::string_view v) -> std::int64_t {
        if (v.empty()) throw malformed_error("empty rational component");
        bool neg = v.front() == '-';
        if (neg) v.remove_prefix(1);
        if (v.empty()) throw malformed_error("bad rational literal");
        std::int64_t out = 0;
        for (char c : v) {
            if (c < '0' || c > '9') throw malformed_error("bad rational literal");
            if (out > (INT64_MAX - (c - '0')) / 10) throw overflow_error("rational literal too large");
            out = out * 10 + (c - '0');
        }
        return neg ? -out : out;
    };
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(s));
    return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace uzz
