#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

namespace derham {

/// Ambient space X: the unit interval [0,1] or the plane R^2 (identified with C).
enum class Space { interval, plane };

inline std::string_view to_string(Space s) { return s == Space::interval ? "interval" : "plane"; }

/// A point of X. Interval points keep y == 0.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point, Point) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Derivative of a branch at a point: 1x1 on the interval, 2x2 (row-major) on the plane.
struct Jacobian {
    int dim = 1;
    std::array<double, 4> a{};

    static Jacobian scalar(double d) { return {1, {d, 0.0, 0.0, 0.0}}; }
    static Jacobian matrix(double a11, double a12, double a21, double a22) {
        return {2, {a11, a12, a21, a22}};
    }

    Point apply(Point v) const {
        if (dim == 1) return {a[0] * v.x, 0.0};
        return {a[0] * v.x + a[1] * v.y, a[2] * v.x + a[3] * v.y};
    }

    double determinant() const { return dim == 1 ? a[0] : a[0] * a[3] - a[1] * a[2]; }
};

struct SingularValues {
    double sigma_max = 0.0;
    double sigma_min = 0.0;  // 1 / ||J^{-1}||; zero when J is singular
};

/// Operator norm and inverse-norm reciprocal of a 1x1 or 2x2 Jacobian.
///
/// For M = [[a,b],[c,d]]: sigma_max + sigma_min and sigma_max - sigma_min are
/// hypot(a+d, b-c) and hypot(a-d, b+c) in some order (which is larger depends
/// on sign(det)). Both are free of the cancellation in the sqrt(F^2 +- 2|det|) form.
inline SingularValues jacobian_norms(const Jacobian& j) {
    if (j.dim == 1) {
        const double s = std::abs(j.a[0]);
        return {s, s};
    }
    const auto& m = j.a;
    const double p = std::hypot(m[0] + m[3], m[1] - m[2]);
    const double q = std::hypot(m[0] - m[3], m[1] + m[2]);
    const double smax = 0.5 * (p + q);
    const double det = std::abs(j.determinant());
    const double smin = smax > 0.0 ? std::min(det / smax, smax) : 0.0;
    return {smax, smin};
}

}  // namespace derham
