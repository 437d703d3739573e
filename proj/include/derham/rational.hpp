#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "derham/errors.hpp"

namespace derham {

/// p/q with 64-bit terms, always reduced with q > 0. Every operation checks
/// for overflow and throws OverflowError instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1) {
        if (den == 0) throw DomainError("rational with zero denominator");
        if (den < 0) {
            num = checked_neg(num);
            den = checked_neg(den);
        }
        const std::int64_t g = std::gcd(num, den);
        num_ = num / g;
        den_ = den / g;
    }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const std::int64_t bd = b.den_ / g;
        return {checked_add(checked_mul(a.num_, bd), checked_mul(b.num_, a.den_ / g)), checked_mul(a.den_, bd)};
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(checked_neg(b.num_), b.den_); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        const std::int64_t g1 = std::gcd(a.num_, b.den_);
        const std::int64_t g2 = std::gcd(b.num_, a.den_);
        return {checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1)};
    }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

    /// Parses "p/q" or an integer "p".
    static Rational parse(std::string_view s) {
        const auto slash = s.find('/');
        auto to_i64 = [](std::string_view part) {
            std::size_t used = 0;
            const std::string str(part);
            long long v = 0;
            try {
                v = std::stoll(str, &used);
            } catch (const std::exception&) {
                throw DomainError("not a fraction: '" + str + "'");
            }
            if (used != str.size()) throw DomainError("not a fraction: '" + str + "'");
            return static_cast<std::int64_t>(v);
        };
        if (slash == std::string_view::npos) return {to_i64(s), 1};
        return {to_i64(s.substr(0, slash)), to_i64(s.substr(slash + 1))};
    }

    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("rational overflow in multiply");
        return r;
    }
    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw OverflowError("rational overflow in add");
        return r;
    }
    static std::int64_t checked_neg(std::int64_t a) {
        std::int64_t r;
        if (__builtin_sub_overflow(std::int64_t{0}, a, &r)) throw OverflowError("rational overflow in negate");
        return r;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace derham
