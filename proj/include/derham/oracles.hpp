#pragma once

// Closed-form references for checking the solver. Nothing here composes
// branch maps; each oracle reaches G by a different route.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "derham/digits.hpp"
#include "derham/errors.hpp"
#include "derham/rational.hpp"

namespace derham::oracles {

/// Increasing affine branches r_i x + c_i whose images tile [0,1]:
/// c_0 = 0 and c_i = c_{i-1} + r_{i-1}.
struct AffineDigitFamily {
    int base = 2;
    std::vector<double> rates;
    std::vector<double> offsets;

    AffineDigitFamily(std::vector<double> r, std::vector<double> c)
        : base(static_cast<int>(r.size())), rates(std::move(r)), offsets(std::move(c)) {
        if (base < 2 || offsets.size() != rates.size()) throw DomainError("affine family: need m >= 2 rates and offsets");
        if (offsets[0] != 0.0) throw DomainError("affine family: c_0 must be 0");
        for (int i = 1; i < base; ++i) {
            if (std::abs(offsets[i] - offsets[i - 1] - rates[i - 1]) > 1e-12) {
                throw DomainError("affine family: branch images do not tile [0,1]");
            }
        }
        for (double r : rates) {
            if (!(r >= 0.0 && r < 1.0)) throw DomainError("affine family: rates must lie in [0,1)");
        }
    }

    static AffineDigitFamily from_rates(std::vector<double> r) {
        std::vector<double> c(r.size(), 0.0);
        for (std::size_t i = 1; i < r.size(); ++i) c[i] = c[i - 1] + r[i - 1];
        return {std::move(r), std::move(c)};
    }
};

inline AffineDigitFamily cantor_family() { return {{0.5, 0.0, 0.5}, {0.0, 0.5, 0.5}}; }
inline AffineDigitFamily bernoulli_family(std::vector<double> a) { return AffineDigitFamily::from_rates(std::move(a)); }
inline AffineDigitFamily okamoto_family(double a, double b) { return {{a, b - a, 1.0 - b}, {0.0, a, b}}; }

/// G(t_n) = sum_k c_{A_k} prod_{j<k} r_{A_j}, summed front to back.
inline double affine_digit_series(const AffineDigitFamily& fam, const MadicDigits& d) {
    if (d.base() != fam.base) throw DomainError("digit base differs from family base");
    double sum = 0.0;
    double scale = 1.0;
    for (auto a : d.digits()) {
        sum += fam.offsets[a] * scale;
        scale *= fam.rates[a];
    }
    return sum;
}

/// Partial quotients of p/q in [0,1]: p/q = [0; a_1, a_2, ...].
inline std::vector<std::int64_t> continued_fraction(const Rational& x) {
    std::vector<std::int64_t> a;
    std::int64_t p = x.num(), q = x.den();
    // skip the integer part (0 on [0,1), 1 for x = 1 handled by caller)
    p %= q;
    while (p != 0) {
        a.push_back(q / p);
        const std::int64_t r = q % p;
        q = p;
        p = r;
    }
    return a;
}

namespace detail {

inline void check_minkowski_argument(const Rational& x) {
    if (x < Rational(0) || x > Rational(1)) throw DomainError("minkowski_q: x must lie in [0,1]");
    if (x.den() > 1'000'000'000) throw DomainError("minkowski_q: denominator above 1e9");
}

}  // namespace detail

/// ?(x) as an exact dyadic rational: ?([0; a1, a2, ...]) = 2 sum_k (-1)^{k+1} 2^-(a1+...+ak).
inline Rational minkowski_q_exact(const Rational& x) {
    detail::check_minkowski_argument(x);
    if (x == Rational(1)) return Rational(1);
    Rational sum(0);
    std::int64_t s = 0;
    int sign = 1;
    for (auto a : continued_fraction(x)) {
        s += a;
        if (s - 1 > 62) throw OverflowError("minkowski_q_exact: 2^-" + std::to_string(s - 1) + " exceeds 64-bit range");
        sum = sum + Rational(sign, std::int64_t{1} << (s - 1));
        sign = -sign;
    }
    return sum;
}

/// ?(x) in floating point; no range limit on the partial-quotient sums.
inline double minkowski_q(const Rational& x) {
    detail::check_minkowski_argument(x);
    if (x == Rational(1)) return 1.0;
    double sum = 0.0;
    std::int64_t s = 0;
    int sign = 1;
    for (auto a : continued_fraction(x)) {
        s += a;
        sum += sign * std::ldexp(2.0, static_cast<int>(-std::min<std::int64_t>(s, 2000)));
        sign = -sign;
    }
    return sum;
}

/// Floating inputs are accepted only when they are dyadic with denominator <= 2^30.
inline double minkowski_q(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("minkowski_q: x must lie in [0,1]");
    const double scaled = std::ldexp(x, 30);
    if (scaled != std::floor(scaled)) throw DomainError("minkowski_q: argument is not a small-denominator rational");
    return minkowski_q(Rational(static_cast<std::int64_t>(scaled), std::int64_t{1} << 30));
}

/// Stern-Brocot cell [left, right] reached by reading digit 0 as "go left" and 1 as "go right".
struct SternBrocotCell {
    Rational left{0, 1};
    Rational right{1, 1};
};

inline SternBrocotCell stern_brocot_cell(const MadicDigits& d) {
    if (d.base() != 2) throw DomainError("Stern-Brocot walk needs base-2 digits");
    if (d.size() > 60) throw OverflowError("Stern-Brocot walk deeper than 60 levels");
    std::int64_t lp = 0, lq = 1, rp = 1, rq = 1;
    for (auto a : d.digits()) {
        const std::int64_t mp = Rational::checked_add(lp, rp);
        const std::int64_t mq = Rational::checked_add(lq, rq);
        if (a == 0) {
            rp = mp;
            rq = mq;
        } else {
            lp = mp;
            lq = mq;
        }
    }
    return {Rational(lp, lq), Rational(rp, rq)};
}

/// ?^-1(t_n), the left mediant endpoint of the Stern-Brocot walk.
inline Rational minkowski_q_inverse(const MadicDigits& d) { return stern_brocot_cell(d).left; }

/// T(x) = sum_{k < terms} 2^-k dist(2^k x, Z); truncation error <= 2^-terms.
inline double takagi(double x, int terms) {
    if (terms < 1) throw DomainError("takagi: terms must be >= 1");
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) {
        const double y = std::ldexp(x, k);
        const double frac = y - std::floor(y);
        sum += std::ldexp(std::min(frac, 1.0 - frac), -k);
    }
    return sum;
}

}  // namespace derham::oracles
