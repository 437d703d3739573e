#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "derham/errors.hpp"
#include "derham/rational.hpp"

namespace derham {

/// Truncated base-m expansion A_1 ... A_n of some t in [0,1).
class MadicDigits {
public:
    MadicDigits(int base, std::vector<std::uint8_t> digits) : base_(base), digits_(std::move(digits)) {
        if (base_ < 2 || base_ > 256) throw DomainError("digit base must lie in [2, 256]");
        for (auto d : digits_) {
            if (d >= base_) throw DomainError("digit " + std::to_string(d) + " out of range for base " +
                                              std::to_string(base_));
        }
    }
    explicit MadicDigits(int base) : MadicDigits(base, {}) {}

    int base() const noexcept { return base_; }
    std::size_t size() const noexcept { return digits_.size(); }
    bool empty() const noexcept { return digits_.empty(); }
    std::uint8_t operator[](std::size_t k) const { return digits_[k]; }
    std::span<const std::uint8_t> digits() const noexcept { return digits_; }

    /// t_n = sum_k A_k m^-k (floating).
    double t_n() const {
        double t = 0.0;
        for (std::size_t k = digits_.size(); k-- > 0;) t = (t + digits_[k]) / base_;
        return t;
    }

    /// t_n as an exact fraction; throws OverflowError when m^n exceeds 63 bits.
    Rational t_n_exact() const {
        std::int64_t num = 0, den = 1;
        for (auto d : digits_) {
            num = Rational::checked_add(Rational::checked_mul(num, base_), d);
            den = Rational::checked_mul(den, base_);
        }
        return {num, den};
    }

    /// Index k with t_n = k / m^n (most significant digit first).
    std::uint64_t index() const {
        std::uint64_t k = 0;
        for (auto d : digits_) k = k * static_cast<std::uint64_t>(base_) + d;
        return k;
    }

    MadicDigits prefix(std::size_t n) const {
        return {base_, std::vector<std::uint8_t>(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(
                                                                                       std::min(n, digits_.size())))};
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t k = 0; k < digits_.size(); ++k) {
            if (base_ > 10 && k > 0) s += ':';
            s += std::to_string(digits_[k]);
        }
        return s;
    }

    friend bool operator==(const MadicDigits&, const MadicDigits&) = default;

private:
    int base_;
    std::vector<std::uint8_t> digits_;
};

/// First n digits of t by the floor(m t) recursion. No correction is applied
/// for inputs that are not representable exactly.
inline MadicDigits madic_digits(double t, int m, int n) {
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("madic_digits: t must lie in [0,1)");
    if (n < 1) throw DomainError("madic_digits: n must be >= 1");
    std::vector<std::uint8_t> d(static_cast<std::size_t>(n));
    for (auto& a : d) {
        t *= m;
        const double f = std::floor(t);
        a = static_cast<std::uint8_t>(std::min<double>(f, m - 1));
        t -= f;
    }
    return {m, std::move(d)};
}

/// Exact digits of a fraction p/q in [0,1).
inline MadicDigits madic_digits(const Rational& t, int m, int n) {
    if (t.num() < 0 || t.num() >= t.den()) throw DomainError("madic_digits: t must lie in [0,1)");
    if (n < 1) throw DomainError("madic_digits: n must be >= 1");
    std::vector<std::uint8_t> d(static_cast<std::size_t>(n));
    __int128 p = t.num();
    const __int128 q = t.den();
    for (auto& a : d) {
        p *= m;
        a = static_cast<std::uint8_t>(p / q);
        p %= q;
    }
    return {m, std::move(d)};
}

/// Digits of k / m^n.
inline MadicDigits digits_from_index(std::uint64_t k, int m, int n) {
    std::vector<std::uint8_t> d(static_cast<std::size_t>(n));
    for (std::size_t j = d.size(); j-- > 0;) {
        d[j] = static_cast<std::uint8_t>(k % static_cast<std::uint64_t>(m));
        k /= static_cast<std::uint64_t>(m);
    }
    return {m, std::move(d)};
}

/// Shift H: drops A_1.
inline MadicDigits shift(const MadicDigits& d) {
    if (d.empty()) throw DomainError("shift of an empty digit string");
    return {d.base(), std::vector<std::uint8_t>(d.digits().begin() + 1, d.digits().end())};
}

/// m-adic successor of the same length (t_n + m^-n); nullopt when that is 1.
inline std::optional<MadicDigits> successor(const MadicDigits& d) {
    std::vector<std::uint8_t> v(d.digits().begin(), d.digits().end());
    for (std::size_t j = v.size(); j-- > 0;) {
        if (v[j] + 1 < d.base()) {
            ++v[j];
            return MadicDigits(d.base(), std::move(v));
        }
        v[j] = 0;
    }
    return std::nullopt;
}

/// Truncates or extends d to `length` digits; extension appends the base-m
/// digits of 1/2, so the result addresses the midpoint of d's cell.
inline MadicDigits extend_to_midpoint(const MadicDigits& d, std::size_t length) {
    const int m = d.base();
    std::vector<std::uint8_t> v(d.digits().begin(), d.digits().begin() + static_cast<std::ptrdiff_t>(
                                                                             std::min(length, d.size())));
    for (std::size_t k = 0; v.size() < length; ++k) {
        if (m % 2 == 0) {
            v.push_back(k == 0 ? static_cast<std::uint8_t>(m / 2) : 0);
        } else {
            v.push_back(static_cast<std::uint8_t>((m - 1) / 2));
        }
    }
    return {m, std::move(v)};
}

inline constexpr std::uint64_t kMaxGridPoints = std::uint64_t{1} << 24;

/// m^n, throwing ResourceError beyond the 2^24-cell cap.
inline std::uint64_t grid_size(int m, int n) {
    if (n < 0) throw DomainError("negative depth");
    std::uint64_t s = 1;
    for (int k = 0; k < n; ++k) {
        s *= static_cast<std::uint64_t>(m);
        if (s > kMaxGridPoints) {
            throw ResourceError("grid of " + std::to_string(m) + "^" + std::to_string(n) +
                                " cells exceeds the 2^24 cap");
        }
    }
    return s;
}

}  // namespace derham
