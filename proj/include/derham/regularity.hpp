#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "derham/digits.hpp"
#include "derham/errors.hpp"
#include "derham/parallel.hpp"
#include "derham/solver.hpp"
#include "derham/system.hpp"
#include "derham/wide_real.hpp"

namespace derham {

/// Pointwise integrands of alpha and beta at one digit string:
/// -log_m ||Df_{A_1}(G(Ht))|| and log_m ||(Df_{A_1}(G(Ht)))^-1||.
/// Either is +inf when the corresponding singular value is zero.
struct IntegrandValue {
    double neg_log_norm = 0.0;
    double log_inv_norm = 0.0;
};

enum class Method { quadrature, monte_carlo };

inline std::string_view to_string(Method m) { return m == Method::quadrature ? "quadrature" : "monte_carlo"; }

struct RegularityEstimate {
    double alpha = 0.0;
    double beta = 0.0;
    Method method = Method::quadrature;
    int depth = 0;  // grid depth (quadrature) or sampled digit length (Monte Carlo)
    int eval_depth = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> stderr_alpha;  // Monte Carlo only
    std::optional<double> stderr_beta;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double neg_log(double sigma, int m) { return sigma == 0.0 ? kInf : -std::log(sigma) / std::log(m); }

inline IntegrandValue integrand_from_point(const DeRhamSystem& sys, int branch, const wide_real& y) {
    const wide_real d = sys.branch(branch).derivative_scalar(y);
    const double v = d == 0 ? kInf : -log_abs(d, sys.base());
    return {v, v};
}

inline IntegrandValue integrand_from_point(const DeRhamSystem& sys, int branch, Point y) {
    const auto sv = jacobian_norms(sys.branch(branch).jacobian_unchecked(y));
    return {neg_log(sv.sigma_max, sys.base()), neg_log(sv.sigma_min, sys.base())};
}

inline int default_eval_depth(int depth) { return depth + 20; }

struct Moments {
    double mean = 0.0;
    std::optional<double> standard_error;
};

inline Moments moments(std::span<const double> v) {
    Moments r;
    const double n = static_cast<double>(v.size());
    r.mean = pairwise_sum(v) / n;
    if (!std::isfinite(r.mean)) return r;
    if (v.size() < 2) {
        r.standard_error = 0.0;
        return r;
    }
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - r.mean) * (v[i] - r.mean);
    r.standard_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    return r;
}

}  // namespace detail

/// Integrands at d. G(Ht) is evaluated on shift(d) truncated or extended to
/// eval_depth digits; extension lands on the midpoint of the shifted cell.
inline IntegrandValue integrand_at(const DeRhamSystem& sys, const MadicDigits& d, int eval_depth) {
    if (d.empty()) throw DomainError("integrand_at needs at least one digit");
    if (eval_depth < 0) throw DomainError("eval_depth must be >= 0");
    const auto tail = extend_to_midpoint(shift(d), static_cast<std::size_t>(eval_depth));
    if (sys.space() == Space::interval) {
        return detail::integrand_from_point(sys, d[0], eval_G_madic_wide(sys, tail));
    }
    return detail::integrand_from_point(sys, d[0], eval_G_madic(sys, tail));
}

/// alpha, beta as m^-depth times the sum of integrand_at over all depth-digit
/// strings. Exact at depth 1 for systems with constant Df. A single +inf
/// summand makes the estimate +inf.
inline RegularityEstimate alpha_beta_quadrature(const DeRhamSystem& sys, int depth, int eval_depth = 0) {
    if (depth < 1) throw DomainError("quadrature depth must be >= 1");
    if (eval_depth == 0) eval_depth = detail::default_eval_depth(depth);
    if (eval_depth < depth) throw DomainError("eval_depth must be >= depth");
    const int m = sys.base();
    const std::uint64_t cells = grid_size(m, depth);
    const std::uint64_t width = cells / static_cast<std::uint64_t>(m);
    // Digits beyond the depth-1 shifted prefix are shared by every cell.
    const auto pad = extend_to_midpoint(MadicDigits(m), static_cast<std::size_t>(eval_depth - (depth - 1)));

    std::vector<double> neg(cells), inv(cells);
    auto fill = [&](const auto& points) {
        parallel_for(cells, [&](std::size_t i) {
            const auto v = detail::integrand_from_point(sys, static_cast<int>(i / width), points[i % width]);
            neg[i] = v.neg_log_norm;
            inv[i] = v.log_inv_norm;
        });
    };
    if (sys.space() == Space::interval) {
        fill(detail::compose_tree(m, depth - 1, eval_G_madic_wide(sys, pad),
                                  [&](int a, const wide_real& x) { return sys.branch(a).eval_scalar(x); }));
    } else {
        fill(detail::compose_tree(m, depth - 1, eval_G_madic(sys, pad),
                                  [&](int a, const Point& x) { return sys.branch(a).eval(x); }));
    }
    RegularityEstimate est;
    est.method = Method::quadrature;
    est.depth = depth;
    est.eval_depth = eval_depth;
    est.alpha = pairwise_sum(neg) / static_cast<double>(cells);
    est.beta = pairwise_sum(inv) / static_cast<double>(cells);
    return est;
}

/// Draws `count` digit strings of length `len` from one mt19937_64 stream,
/// string-major, digit = next() mod m.
inline std::vector<MadicDigits> draw_digit_strings(int m, std::uint64_t count, int len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<MadicDigits> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::vector<std::uint8_t> d(static_cast<std::size_t>(len));
        for (auto& a : d) a = static_cast<std::uint8_t>(rng() % static_cast<std::uint64_t>(m));
        out.emplace_back(m, std::move(d));
    }
    return out;
}

/// Birkhoff-style Monte Carlo: mean of integrand_at over uniformly drawn digit
/// strings. Digits are drawn sequentially, integrands evaluated per index and
/// reduced in index order, so the result is the same for any thread count.
inline RegularityEstimate alpha_beta_monte_carlo(const DeRhamSystem& sys, std::uint64_t samples, int digit_len,
                                                 int eval_depth, std::uint64_t seed) {
    if (samples < 1) throw DomainError("Monte Carlo needs at least one sample");
    if (digit_len < 1) throw DomainError("digit_len must be >= 1");
    if (eval_depth == 0) eval_depth = detail::default_eval_depth(digit_len);
    const auto strings = draw_digit_strings(sys.base(), samples, digit_len, seed);
    std::vector<double> neg(samples), inv(samples);
    parallel_for(samples, [&](std::size_t i) {
        const auto v = integrand_at(sys, strings[i], eval_depth);
        neg[i] = v.neg_log_norm;
        inv[i] = v.log_inv_norm;
    });
    const auto a = detail::moments(neg);
    const auto b = detail::moments(inv);
    RegularityEstimate est;
    est.method = Method::monte_carlo;
    est.depth = digit_len;
    est.eval_depth = eval_depth;
    est.samples = samples;
    est.seed = seed;
    est.alpha = a.mean;
    est.beta = b.mean;
    est.stderr_alpha = a.standard_error;
    est.stderr_beta = b.standard_error;
    return est;
}

/// -log_m M_n(t) / n along one random t, n = 1..n_max.
struct ExponentTrace {
    int base = 2;
    std::uint64_t seed = 0;
    MadicDigits digits{2};
    std::vector<double> values;  // values[n-1]
};

inline ExponentTrace empirical_exponent(const DeRhamSystem& sys, std::uint64_t seed, int n_max) {
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    ExponentTrace tr{sys.base(), seed, draw_digit_strings(sys.base(), 1, n_max, seed).front(), {}};
    tr.values.resize(static_cast<std::size_t>(n_max));
    parallel_for(tr.values.size(), [&](std::size_t i) {
        const int n = static_cast<int>(i) + 1;
        tr.values[i] = -scaled_increment(sys, tr.digits.prefix(static_cast<std::size_t>(n))).log(sys.base()) / n;
    });
    return tr;
}

/// S_n = sum over the depth-n grid of M_n^p, i.e. the p-variation sum of the
/// m-adic partition.
struct VariationTable {
    double p = 1.0;
    int base = 2;
    std::vector<double> sums;  // sums[n-1] = S_n
};

inline VariationTable p_variation_table(const DeRhamSystem& sys, double p, int n_max) {
    if (!(p > 0.0)) throw DomainError("p must be > 0");
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    VariationTable vt{p, sys.base(), {}};
    visit_increment_levels(sys, n_max, [&](int, std::span<const double> inc) {
        std::vector<double> powed(inc.size());
        for (std::size_t i = 0; i < inc.size(); ++i) powed[i] = p == 1.0 ? inc[i] : std::pow(inc[i], p);
        vt.sums.push_back(pairwise_sum(powed));
    });
    return vt;
}

enum class Verdict { derivative_zero_ae, nondifferentiable_ae, inconclusive };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::derivative_zero_ae: return "derivative_zero_ae";
        case Verdict::nondifferentiable_ae: return "nondifferentiable_ae";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct RegularityVerdict {
    Verdict tag = Verdict::inconclusive;
    double alpha = 0.0;
    double beta = 0.0;
    double margin = 0.0;
};

/// alpha - margin > 1: DG = 0 a.e.; beta + margin < 1: DG exists nowhere a.e.
inline RegularityVerdict classify(const RegularityEstimate& est, double margin) {
    if (!(margin >= 0.0)) throw DomainError("margin must be >= 0");
    RegularityVerdict v{Verdict::inconclusive, est.alpha, est.beta, margin};
    if (est.alpha - margin > 1.0) {
        v.tag = Verdict::derivative_zero_ae;
    } else if (est.beta + margin < 1.0) {
        v.tag = Verdict::nondifferentiable_ae;
    }
    return v;
}

/// Error allowance for classify: 3 standard errors for Monte Carlo, and for
/// quadrature the change against the half-depth grid.
inline double default_margin(const DeRhamSystem& sys, const RegularityEstimate& est) {
    if (est.method == Method::monte_carlo) {
        const double sa = est.stderr_alpha.value_or(0.0);
        const double sb = est.stderr_beta.value_or(0.0);
        return 3.0 * std::max(sa, sb);
    }
    const int half = std::max(1, (est.depth + 1) / 2);
    if (half == est.depth) return 0.0;
    const auto coarse = alpha_beta_quadrature(sys, half, est.eval_depth - (est.depth - half));
    auto delta = [](double a, double b) {
        if (std::isinf(a) && std::isinf(b)) return 0.0;
        return std::abs(a - b);
    };
    return std::max(delta(est.alpha, coarse.alpha), delta(est.beta, coarse.beta));
}

}  // namespace derham
