#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "derham/digits.hpp"
#include "derham/errors.hpp"
#include "derham/geometry.hpp"
#include "derham/parallel.hpp"
#include "derham/rational.hpp"
#include "derham/system.hpp"
#include "derham/wide_real.hpp"

namespace derham {

/// Which end of the depth-n cell to evaluate: G(t_n) or G(t_n + m^-n).
enum class Tail { zero, one };

/// G(t_n) (tail zero) or G(t_n + m^-n) (tail one) as
/// f_{A_1} o ... o f_{A_n}(Fix f_0 or Fix f_{m-1}). f_{A_1} is applied last.
inline Point eval_G_madic(const DeRhamSystem& sys, const MadicDigits& d, Tail tail = Tail::zero) {
    if (d.base() != sys.base()) throw DomainError("digit base differs from system base");
    Point x = tail == Tail::zero ? sys.fix_first() : sys.fix_last();
    for (std::size_t k = d.size(); k-- > 0;) x = sys.branch(d[k]).eval(x);
    return x;
}

/// Interval-only variant carried in wide_real, so values far below the
/// double range near superattracting fixed points survive.
inline wide_real eval_G_madic_wide(const DeRhamSystem& sys, const MadicDigits& d, Tail tail = Tail::zero) {
    if (sys.space() != Space::interval) throw DomainError("eval_G_madic_wide needs an interval system");
    if (d.base() != sys.base()) throw DomainError("digit base differs from system base");
    wide_real x = tail == Tail::zero ? sys.fix_first().x : sys.fix_last().x;
    for (std::size_t k = d.size(); k-- > 0;) x = sys.branch(d[k]).eval_scalar(x);
    return x;
}

/// |G(t_n + m^-n) - G(t_n)| = mantissa * 2^exp2. Kept split so increments far
/// below the double range still have an exact logarithm.
struct ScaledIncrement {
    double mantissa = 0.0;
    std::int64_t exp2 = 0;

    double value() const {
        if (mantissa == 0.0) return 0.0;
        const auto e = std::clamp<std::int64_t>(exp2, INT_MIN / 2, INT_MAX / 2);
        return std::ldexp(mantissa, static_cast<int>(e));
    }
    /// log_base of the increment; -inf when zero.
    double log(double base) const {
        if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
        return (std::log2(mantissa) + static_cast<double>(exp2)) / std::log2(base);
    }
};

namespace detail {

// Moves the binary exponent of delta into exp2 so delta stays O(1).
inline void renormalize(Point& delta, std::int64_t& exp2) {
    const double s = std::max(std::abs(delta.x), std::abs(delta.y));
    if (s == 0.0 || !std::isfinite(s)) return;
    int k = 0;
    std::frexp(s, &k);
    delta = {std::ldexp(delta.x, -k), std::ldexp(delta.y, -k)};
    exp2 += k;
}

// One branch applied to the cell endpoints and their difference. The
// difference goes through the divided difference, never through hi - lo.
struct CellState {
    Point lo, hi, delta;

    void apply(const DifferentiableMap& f) {
        if (f.space() == Space::interval) {
            delta.x *= f.slope_scalar(lo.x, hi.x);
        } else {
            delta = f.jacobian_unchecked(lo).apply(delta);  // plane kinds are affine
        }
        lo = f.eval(lo);
        hi = f.eval(hi);
    }
};

inline CellState unit_cell(const DeRhamSystem& sys) {
    return {sys.fix_first(), sys.fix_last(), sys.fix_last() - sys.fix_first()};
}

/// Values for every digit string of length `levels`, index = digits' m-adic
/// index (A_1 most significant). out[a m^(L-1) + k] = step(a, level_{L-1}[k]),
/// i.e. each string is composed innermost-first starting from `base`.
template <class Value, class Step>
std::vector<Value> compose_tree(int m, int levels, Value base, Step&& step) {
    grid_size(m, levels);
    std::vector<Value> cur{std::move(base)};
    for (int level = 1; level <= levels; ++level) {
        std::vector<Value> next(cur.size() * static_cast<std::size_t>(m));
        const std::size_t width = cur.size();
        parallel_for(next.size(), [&](std::size_t i) {
            next[i] = step(static_cast<int>(i / width), cur[i % width]);
        });
        cur = std::move(next);
    }
    return cur;
}

}  // namespace detail

inline ScaledIncrement scaled_increment(const DeRhamSystem& sys, const MadicDigits& d) {
    if (d.base() != sys.base()) throw DomainError("digit base differs from system base");
    auto cell = detail::unit_cell(sys);
    std::int64_t e = 0;
    detail::renormalize(cell.delta, e);
    for (std::size_t k = d.size(); k-- > 0;) {
        cell.apply(sys.branch(d[k]));
        detail::renormalize(cell.delta, e);
    }
    return {norm(cell.delta), e};
}

/// M_n(t) = |G(t_n + m^-n) - G(t_n)| for the cell addressed by d.
inline double increment_Mn(const DeRhamSystem& sys, const MadicDigits& d) { return scaled_increment(sys, d).value(); }

/// G at t with the error bracket |G(t_n + m^-depth) - G(t_n)|.
struct GValue {
    Point value;
    double bracket = 0.0;
};

inline GValue eval_G(const DeRhamSystem& sys, const MadicDigits& d) {
    return {eval_G_madic(sys, d, Tail::zero), increment_Mn(sys, d)};
}

/// G(t) via the first `depth` digits of the exact fraction t.
inline GValue eval_G(const DeRhamSystem& sys, const Rational& t, int depth) {
    if (depth < 1) throw DomainError("eval_G: depth must be >= 1");
    if (t == Rational(1)) return {sys.fix_last(), 0.0};
    return eval_G(sys, madic_digits(t, sys.base(), depth));
}

/// G(t) via the floor(m t) digits of a floating t.
inline GValue eval_G(const DeRhamSystem& sys, double t, int depth) {
    if (depth < 1) throw DomainError("eval_G: depth must be >= 1");
    if (t == 1.0) return {sys.fix_last(), 0.0};
    return eval_G(sys, madic_digits(t, sys.base(), depth));
}

/// G on the grid k m^-depth, k = 0..m^depth, in increasing t.
struct CurveSample {
    int base = 2;
    int depth = 0;
    Space space = Space::interval;
    std::vector<double> t;
    std::vector<Point> points;

    std::size_t size() const noexcept { return t.size(); }
};

inline CurveSample sample_curve(const DeRhamSystem& sys, int depth) {
    const std::uint64_t cells = grid_size(sys.base(), depth);
    CurveSample s{sys.base(), depth, sys.space(), {}, {}};
    s.points = detail::compose_tree(sys.base(), depth, sys.fix_first(),
                                    [&](int a, const Point& x) { return sys.branch(a).eval(x); });
    s.points.push_back(sys.fix_last());
    s.t.resize(s.points.size());
    for (std::uint64_t k = 0; k <= cells; ++k) s.t[k] = static_cast<double>(k) / static_cast<double>(cells);
    return s;
}

/// M_n for every depth-n cell; row k is the cell [k m^-n, (k+1) m^-n).
struct IncrementTable {
    int base = 2;
    int depth = 0;
    std::vector<double> increments;

    MadicDigits digits(std::size_t k) const { return digits_from_index(k, base, depth); }
};

/// Calls fn(n, increments) for n = 1..n_max, reusing level n-1 to build level n.
template <class Fn>
void visit_increment_levels(const DeRhamSystem& sys, int n_max, Fn&& fn) {
    const int m = sys.base();
    grid_size(m, n_max);
    std::vector<detail::CellState> cur{detail::unit_cell(sys)};
    for (int n = 1; n <= n_max; ++n) {
        std::vector<detail::CellState> next(cur.size() * static_cast<std::size_t>(m));
        const std::size_t width = cur.size();
        parallel_for(next.size(), [&](std::size_t i) {
            auto c = cur[i % width];
            c.apply(sys.branch(static_cast<int>(i / width)));
            next[i] = c;
        });
        cur = std::move(next);
        std::vector<double> inc(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i) inc[i] = norm(cur[i].delta);
        fn(n, std::span<const double>(inc));
    }
}

inline IncrementTable increment_table(const DeRhamSystem& sys, int depth) {
    IncrementTable t{sys.base(), depth, {}};
    if (depth == 0) {
        t.increments = {norm(detail::unit_cell(sys).delta)};
        return t;
    }
    visit_increment_levels(sys, depth, [&](int n, std::span<const double> inc) {
        if (n == depth) t.increments.assign(inc.begin(), inc.end());
    });
    return t;
}

}  // namespace derham
