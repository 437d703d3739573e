#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "derham/map.hpp"
#include "derham/system.hpp"

namespace derham::presets {

/// m = 3: x/2, 1/2, (x+1)/2. Solution is the Cantor function.
inline DeRhamSystem cantor() {
    return DeRhamSystem({DifferentiableMap::affine(0.5, 0.0), DifferentiableMap::affine(0.0, 0.5),
                         DifferentiableMap::affine(0.5, 0.5)},
                        "cantor");
}

/// f_i(x) = a_i x + a_0 + ... + a_{i-1}: distribution function of the
/// Bernoulli measure with weights a (Lebesgue's singular function for m = 2).
inline DeRhamSystem bernoulli(std::span<const double> a) {
    if (a.size() < 2) throw DomainError("bernoulli: need at least two weights");
    double total = 0.0;
    for (double w : a) {
        if (!(w > 0.0 && w < 1.0)) throw DomainError("bernoulli: weights must lie in (0,1)");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("bernoulli: weights must sum to 1");
    std::vector<DifferentiableMap> f;
    double offset = 0.0;
    for (double w : a) {
        f.push_back(DifferentiableMap::affine(w, offset));
        offset += w;
    }
    return DeRhamSystem(std::move(f), "bernoulli");
}

inline DeRhamSystem bernoulli(std::initializer_list<double> a) {
    return bernoulli(std::span<const double>(a.begin(), a.size()));
}

/// m = 3: a x, a + (b-a) x, (1-b) x + b with 0 < a < b < 1.
inline DeRhamSystem okamoto(double a, double b) {
    if (!(0.0 < a && a < b && b < 1.0)) throw DomainError("okamoto: need 0 < a < b < 1");
    return DeRhamSystem({DifferentiableMap::affine(a, 0.0), DifferentiableMap::affine(b - a, a),
                         DifferentiableMap::affine(1.0 - b, b)},
                        "okamoto");
}

/// x/(x+1), 1/(2-x). Solution is the inverse of Minkowski's question-mark function.
inline DeRhamSystem minkowski_inverse() {
    return DeRhamSystem({DifferentiableMap::moebius(1, 0, 1, 1), DifferentiableMap::moebius(0, 1, -1, 2)},
                        "minkowski_inverse");
}

/// Cesaro-type curve on C: eta conj(z), (1-eta) conj(z) + eta. eta = 1/2 + i sqrt(3)/6 gives Koch.
inline DeRhamSystem derham(std::complex<double> eta) {
    return DeRhamSystem({DifferentiableMap::conjugate_affine(eta, 0.0),
                         DifferentiableMap::conjugate_affine(1.0 - eta, eta)},
                        "derham");
}

/// Pair with (1-eta) on both branches; only continuous for eta = 1/2.
inline DeRhamSystem derham_literal(std::complex<double> eta) {
    return DeRhamSystem({DifferentiableMap::conjugate_affine(1.0 - eta, 0.0),
                         DifferentiableMap::conjugate_affine(1.0 - eta, eta)},
                        "derham_literal");
}

inline std::complex<double> koch_eta() { return {0.5, std::sqrt(3.0) / 6.0}; }
inline DeRhamSystem koch() { return derham(koch_eta()); }

/// x^2/2, (x+1)/2.
inline DeRhamSystem quadratic() {
    return DeRhamSystem({DifferentiableMap::polynomial({0.0, 0.0, 0.5}), DifferentiableMap::affine(0.5, 0.5)},
                        "quadratic");
}

/// x^3/4 + x/12, (2x+1)/3.
inline DeRhamSystem cubic() {
    return DeRhamSystem({DifferentiableMap::polynomial({0.0, 1.0 / 12.0, 0.0, 0.25}),
                         DifferentiableMap::affine(2.0 / 3.0, 1.0 / 3.0)},
                        "cubic");
}

/// Plane pair with alpha = 1 < beta = +inf: x/2 + i y/3 and (x+1)/2.
inline DeRhamSystem anisotropic() {
    return DeRhamSystem({DifferentiableMap::coordinate_affine(0.5, 0.0, 0.0, 1.0 / 3.0, 0.0, 0.0),
                         DifferentiableMap::coordinate_affine(0.5, 0.0, 0.0, 0.0, 0.5, 0.0)},
                        "anisotropic");
}

/// (1/2 + eps) x, (1/2 - eps) x + 1/2 + eps. Its eps-derivative at 0 is a multiple of the Takagi function.
inline DeRhamSystem hata_yamaguti(double eps) {
    if (!(std::abs(eps) < 0.5)) throw DomainError("hata_yamaguti: need |eps| < 1/2");
    return DeRhamSystem({DifferentiableMap::affine(0.5 + eps, 0.0), DifferentiableMap::affine(0.5 - eps, 0.5 + eps)},
                        "hata_yamaguti");
}

/// x^2/2 - eps x^4 and the affine branch through (0, 1/2 - eps) and (1, 1).
inline DeRhamSystem quartic_perturbation(double eps) {
    return DeRhamSystem({DifferentiableMap::polynomial({0.0, 0.0, 0.5, 0.0, -eps}),
                         DifferentiableMap::affine(0.5 + eps, 0.5 - eps)},
                        "quartic_perturbation");
}

/// x/(1+x) - eps x(1-x), 1/(2-x) + eps x^2 (1-x).
inline DeRhamSystem perturbed_minkowski(double eps) {
    return DeRhamSystem({DifferentiableMap::moebius(1, 0, 1, 1, {0.0, -eps, eps}),
                         DifferentiableMap::moebius(0, 1, -1, 2, {0.0, 0.0, eps, -eps})},
                        "perturbed_minkowski");
}

}  // namespace derham::presets
