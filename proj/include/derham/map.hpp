#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "derham/errors.hpp"
#include "derham/geometry.hpp"

namespace derham {

/// Closed set of branch kinds, each with an analytic derivative.
///
///   affine                a x + b                              params (a, b)
///   polynomial            c0 + c1 x + ... + ck x^k             params (c0, ..., ck)
///   moebius               (a x + b)/(c x + d) + p0 + p1 x + ...  params (a, b, c, d, p0, p1, ...)
///   conjugate_affine      c conj(z) + d on C = R^2             params (Re c, Im c, Re d, Im d)
///   coordinate_affine_2d  A (x, y) + b                         params (a11, a12, a21, a22, b1, b2)
///
/// The optional polynomial tail on `moebius` carries perturbed linear
/// fractional branches such as x/(1+x) - eps x (1 - x).
enum class MapKind { affine, polynomial, moebius, conjugate_affine, coordinate_affine_2d };

inline std::string_view to_string(MapKind k) {
    switch (k) {
        case MapKind::affine: return "affine";
        case MapKind::polynomial: return "polynomial";
        case MapKind::moebius: return "moebius";
        case MapKind::conjugate_affine: return "conjugate_affine";
        case MapKind::coordinate_affine_2d: return "coordinate_affine_2d";
    }
    return "?";
}

inline std::optional<MapKind> map_kind_from_string(std::string_view s) {
    for (auto k : {MapKind::affine, MapKind::polynomial, MapKind::moebius, MapKind::conjugate_affine,
                   MapKind::coordinate_affine_2d}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

inline Space space_of(MapKind k) {
    return (k == MapKind::conjugate_affine || k == MapKind::coordinate_affine_2d) ? Space::plane
                                                                                   : Space::interval;
}

namespace detail {

// Slack on the [0,1] membership test; composed maps drift by a few ulps.
inline constexpr double kIntervalSlack = 1e-9;

template <class Real>
Real poly_eval(std::span<const double> c, const Real& x) {
    Real acc = 0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * x + Real(c[j]);
    return acc;
}

template <class Real>
Real poly_derivative(std::span<const double> c, const Real& x) {
    Real acc = 0;
    for (std::size_t j = c.size(); j-- > 1;) acc = acc * x + Real(static_cast<double>(j) * c[j]);
    return acc;
}

// Divided difference p[x, y] = sum_j c_j h_{j-1}(x, y), h_j = y h_{j-1} + x^j.
// Equals p'(x) when x == y and never subtracts p(y) - p(x).
template <class Real>
Real poly_slope(std::span<const double> c, const Real& x, const Real& y) {
    Real acc = 0;
    Real h = 1;
    Real xpow = 1;
    for (std::size_t j = 1; j < c.size(); ++j) {
        acc += Real(c[j]) * h;
        xpow *= x;
        h = y * h + xpow;
    }
    return acc;
}

}  // namespace detail

/// One branch f_i of a de Rham system: exact evaluation and exact Jacobian.
class DifferentiableMap {
public:
    DifferentiableMap(MapKind kind, std::vector<double> params,
                      std::optional<double> declared_lipschitz = std::nullopt)
        : kind_(kind), params_(std::move(params)), declared_lipschitz_(declared_lipschitz) {
        std::size_t need = 0;
        bool exact = true;
        switch (kind_) {
            case MapKind::affine: need = 2; break;
            case MapKind::polynomial: need = 1; exact = false; break;
            case MapKind::moebius: need = 4; exact = false; break;
            case MapKind::conjugate_affine: need = 4; break;
            case MapKind::coordinate_affine_2d: need = 6; break;
        }
        if (params_.size() < need || (exact && params_.size() != need)) {
            throw DomainError(std::string(to_string(kind_)) + ": expected " + (exact ? "" : "at least ") +
                              std::to_string(need) + " parameters, got " + std::to_string(params_.size()));
        }
        for (double p : params_) {
            if (!std::isfinite(p)) throw DomainError(std::string(to_string(kind_)) + ": non-finite parameter");
        }
        if (kind_ == MapKind::moebius && params_[2] == 0.0 && params_[3] == 0.0) {
            throw DomainError("moebius: c and d both zero");
        }
        if (declared_lipschitz_ && !(*declared_lipschitz_ > 0.0 && *declared_lipschitz_ <= 1.0)) {
            throw DomainError("declared Lipschitz constant must lie in (0, 1]");
        }
    }

    static DifferentiableMap affine(double slope, double intercept) {
        return {MapKind::affine, {slope, intercept}};
    }
    static DifferentiableMap polynomial(std::vector<double> coeffs) {
        return {MapKind::polynomial, std::move(coeffs)};
    }
    static DifferentiableMap moebius(double a, double b, double c, double d, std::vector<double> correction = {}) {
        std::vector<double> p{a, b, c, d};
        p.insert(p.end(), correction.begin(), correction.end());
        return {MapKind::moebius, std::move(p)};
    }
    static DifferentiableMap conjugate_affine(std::complex<double> c, std::complex<double> d) {
        return {MapKind::conjugate_affine, {c.real(), c.imag(), d.real(), d.imag()}};
    }
    static DifferentiableMap coordinate_affine(double a11, double a12, double a21, double a22, double b1, double b2) {
        return {MapKind::coordinate_affine_2d, {a11, a12, a21, a22, b1, b2}};
    }

    MapKind kind() const noexcept { return kind_; }
    const std::vector<double>& params() const noexcept { return params_; }
    std::optional<double> declared_lipschitz() const noexcept { return declared_lipschitz_; }
    Space space() const noexcept { return space_of(kind_); }

    /// True when Df is constant on X.
    bool is_linear() const noexcept {
        switch (kind_) {
            case MapKind::affine:
            case MapKind::conjugate_affine:
            case MapKind::coordinate_affine_2d: return true;
            case MapKind::polynomial: return params_.size() <= 2;
            case MapKind::moebius: return false;
        }
        return false;
    }

    // Scalar paths for interval kinds, generic over double / wide_real.

    template <class Real>
    Real eval_scalar(const Real& x) const {
        switch (kind_) {
            case MapKind::affine: return Real(params_[0]) * x + Real(params_[1]);
            case MapKind::polynomial: return detail::poly_eval<Real>(params_, x);
            case MapKind::moebius: {
                const Real den = Real(params_[2]) * x + Real(params_[3]);
                if (den == 0) throw DomainError("moebius: pole");
                Real r = (Real(params_[0]) * x + Real(params_[1])) / den;
                if (params_.size() > 4) r += detail::poly_eval<Real>(tail(), x);
                return r;
            }
            default: throw DomainError("eval_scalar on a plane map");
        }
    }

    template <class Real>
    Real derivative_scalar(const Real& x) const {
        switch (kind_) {
            case MapKind::affine: return Real(params_[0]);
            case MapKind::polynomial: return detail::poly_derivative<Real>(params_, x);
            case MapKind::moebius: {
                const Real den = Real(params_[2]) * x + Real(params_[3]);
                if (den == 0) throw DomainError("moebius: pole");
                Real r = Real(moebius_det()) / (den * den);
                if (params_.size() > 4) r += detail::poly_derivative<Real>(tail(), x);
                return r;
            }
            default: throw DomainError("derivative_scalar on a plane map");
        }
    }

    /// Divided difference (f(y) - f(x)) / (y - x), computed without the subtraction.
    template <class Real>
    Real slope_scalar(const Real& x, const Real& y) const {
        switch (kind_) {
            case MapKind::affine: return Real(params_[0]);
            case MapKind::polynomial: return detail::poly_slope<Real>(params_, x, y);
            case MapKind::moebius: {
                const Real dx = Real(params_[2]) * x + Real(params_[3]);
                const Real dy = Real(params_[2]) * y + Real(params_[3]);
                if (dx == 0 || dy == 0) throw DomainError("moebius: pole");
                Real r = Real(moebius_det()) / (dx * dy);
                if (params_.size() > 4) r += detail::poly_slope<Real>(tail(), x, y);
                return r;
            }
            default: throw DomainError("slope_scalar on a plane map");
        }
    }

    /// f(p). Throws DomainError outside X or at a pole.
    Point eval(Point p) const {
        check_domain(p);
        return eval_unchecked(p);
    }

    Point eval_unchecked(Point p) const {
        switch (kind_) {
            case MapKind::conjugate_affine: {
                const auto& c = params_;
                // c * conj(z) = (cr x + ci y) + i (ci x - cr y)
                return {c[0] * p.x + c[1] * p.y + c[2], c[1] * p.x - c[0] * p.y + c[3]};
            }
            case MapKind::coordinate_affine_2d: {
                const auto& c = params_;
                return {c[0] * p.x + c[1] * p.y + c[4], c[2] * p.x + c[3] * p.y + c[5]};
            }
            default: return {eval_scalar<double>(p.x), 0.0};
        }
    }

    Jacobian jacobian(Point p) const {
        check_domain(p);
        return jacobian_unchecked(p);
    }

    Jacobian jacobian_unchecked(Point p) const {
        switch (kind_) {
            case MapKind::conjugate_affine:
                return Jacobian::matrix(params_[0], params_[1], params_[1], -params_[0]);
            case MapKind::coordinate_affine_2d:
                return Jacobian::matrix(params_[0], params_[1], params_[2], params_[3]);
            default: return Jacobian::scalar(derivative_scalar<double>(p.x));
        }
    }

    void check_domain(Point p) const {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite point");
        if (space() == Space::interval &&
            (p.x < -detail::kIntervalSlack || p.x > 1.0 + detail::kIntervalSlack || p.y != 0.0)) {
            throw DomainError("point outside X = [0,1]: " + std::to_string(p.x));
        }
    }

    friend bool operator==(const DifferentiableMap&, const DifferentiableMap&) = default;

private:
    std::span<const double> tail() const { return std::span<const double>(params_).subspan(4); }
    double moebius_det() const { return params_[0] * params_[3] - params_[1] * params_[2]; }

    MapKind kind_;
    std::vector<double> params_;
    std::optional<double> declared_lipschitz_;
};

inline Point map_eval(const DifferentiableMap& f, Point x) { return f.eval(x); }
inline Jacobian map_jacobian(const DifferentiableMap& f, Point x) { return f.jacobian(x); }

namespace detail {

inline std::optional<Point> closed_form_fixed_point(const DifferentiableMap& f) {
    const auto& p = f.params();
    switch (f.kind()) {
        case MapKind::affine:
            if (p[0] == 1.0) return std::nullopt;
            return Point{p[1] / (1.0 - p[0]), 0.0};
        case MapKind::conjugate_affine: {
            // z = c conj(z) + d  =>  z = (c conj(d) + d) / (1 - |c|^2)
            const std::complex<double> c{p[0], p[1]}, d{p[2], p[3]};
            const double den = 1.0 - std::norm(c);
            if (den == 0.0) return std::nullopt;
            const auto z = (c * std::conj(d) + d) / den;
            return Point{z.real(), z.imag()};
        }
        case MapKind::coordinate_affine_2d: {
            // (I - A) z = b
            const double m11 = 1.0 - p[0], m12 = -p[1], m21 = -p[2], m22 = 1.0 - p[3];
            const double det = m11 * m22 - m12 * m21;
            if (det == 0.0) return std::nullopt;
            return Point{(m22 * p[4] - m12 * p[5]) / det, (m11 * p[5] - m21 * p[4]) / det};
        }
        case MapKind::moebius: {
            if (p.size() > 4) return std::nullopt;
            // c x^2 + (d - a) x - b = 0
            const double a = p[0], b = p[1], c = p[2], d = p[3];
            std::vector<double> roots;
            if (c == 0.0) {
                if (d - a != 0.0) roots.push_back(b / (d - a));
            } else {
                const double lin = d - a;
                const double disc = std::max(0.0, lin * lin + 4.0 * b * c);
                const double q = -0.5 * (lin + std::copysign(std::sqrt(disc), lin));
                if (q != 0.0) {
                    roots.push_back(q / c);
                    roots.push_back(-b / q);
                } else {
                    roots.push_back(0.0);
                }
            }
            std::optional<Point> best;
            double best_slope = 0.0;
            for (double r : roots) {
                if (!(r >= -kIntervalSlack && r <= 1.0 + kIntervalSlack)) continue;
                r = std::clamp(r, 0.0, 1.0);
                if (c * r + d == 0.0) continue;
                const double s = std::abs(f.derivative_scalar(r));
                if (!best || s < best_slope) {
                    best = Point{r, 0.0};
                    best_slope = s;
                }
            }
            return best;
        }
        case MapKind::polynomial: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

/// Fix(f): closed form for affine / Moebius / plane kinds, otherwise damped
/// iteration from the centroid of X (with a Newton step whenever it lowers the
/// residual). The returned x satisfies |f(x) - x| <= tol.
inline Point fixed_point(const DifferentiableMap& f, double tol = 1e-14, long max_iter = 100000) {
    if (auto x = detail::closed_form_fixed_point(f)) {
        if (distance(f.eval_unchecked(*x), *x) <= tol) return *x;
    }
    // A weak contraction has at most one fixed point, so an exact endpoint hit
    // is the answer. Parabolic endpoints (f'(x) = 1) would otherwise need ~1/tol steps.
    if (f.space() == Space::interval) {
        for (double c : {0.0, 1.0}) {
            if (f.eval_unchecked({c, 0.0}).x == c) return {c, 0.0};
        }
    }
    constexpr double kDamping = 0.5;
    Point x = f.space() == Space::interval ? Point{0.5, 0.0} : Point{0.0, 0.0};
    for (long it = 0; it < max_iter; ++it) {
        const Point fx = f.eval(x);
        const double res = distance(fx, x);
        if (res <= tol) return x;
        Point next = x + kDamping * (fx - x);
        if (f.space() == Space::interval) {
            const double g1 = f.derivative_scalar(x.x) - 1.0;
            if (g1 != 0.0) {
                const double xn = x.x - (fx.x - x.x) / g1;
                if (xn >= 0.0 && xn <= 1.0 && std::abs(f.eval_scalar(xn) - xn) < res) next = {xn, 0.0};
            }
        }
        x = next;
    }
    throw ConvergenceError("fixed-point iteration did not converge in " + std::to_string(max_iter) +
                           " steps; map may not be a weak contraction");
}

}  // namespace derham
