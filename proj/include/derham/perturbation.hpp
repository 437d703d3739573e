#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "derham/errors.hpp"
#include "derham/oracles.hpp"
#include "derham/presets.hpp"
#include "derham/regularity.hpp"
#include "derham/solver.hpp"
#include "derham/system.hpp"

namespace derham {

/// eps -> system, for eps in [eps_min, eps_max]. Every generated system is validated.
struct SystemFamily {
    std::string name;
    std::function<DeRhamSystem(double)> generator;
    double eps_min = 0.0;
    double eps_max = 0.0;
    /// sup_{i,x} ||Df_i(x)^-1|| < inf, so alpha_eps -> alpha_0 is expected, not just the liminf bound.
    bool bounded_inverse_derivative = false;
    /// Closed-form alpha(eps) when known.
    std::function<double(double)> closed_form_alpha;

    DeRhamSystem at(double eps) const {
        if (!(eps >= eps_min && eps <= eps_max)) {
            throw DomainError(name + ": eps = " + std::to_string(eps) + " outside [" + std::to_string(eps_min) + ", " +
                              std::to_string(eps_max) + "]");
        }
        auto sys = generator(eps);
        require_valid(sys);
        return sys;
    }
};

namespace families {

inline SystemFamily bernoulli() {
    return {"bernoulli",
            [](double e) { return presets::bernoulli({0.5 + e, 0.5 - e}); },
            -0.45,
            0.45,
            true,
            [](double e) { return -(std::log2(0.5 + e) + std::log2(0.5 - e)) / 2.0; }};
}

inline SystemFamily hata_yamaguti() {
    auto f = bernoulli();
    f.name = "hata_yamaguti";
    f.generator = [](double e) { return presets::hata_yamaguti(e); };
    return f;
}

/// Okamoto's (a, b) = (1/3 + eps, 2/3).
inline SystemFamily okamoto() {
    return {"okamoto",
            [](double e) { return presets::okamoto(1.0 / 3.0 + e, 2.0 / 3.0); },
            -0.3,
            0.3,
            true,
            [](double e) {
                const double a = 1.0 / 3.0 + e, b = 2.0 / 3.0;
                return -(std::log(a) + std::log(b - a) + std::log(1.0 - b)) / std::log(3.0) / 3.0;
            }};
}

inline SystemFamily quartic_perturbation() {
    return {"quartic_perturbation", [](double e) { return presets::quartic_perturbation(e); }, 0.0, 0.1, false, {}};
}

inline SystemFamily perturbed_minkowski() {
    return {"perturbed_minkowski", [](double e) { return presets::perturbed_minkowski(e); }, 0.0, 0.1, true, {}};
}

}  // namespace families

/// Looks up a builtin family; accepts example_2_8_i / example_2_8_ii as aliases.
inline SystemFamily family_by_name(std::string_view name) {
    if (name == "bernoulli") return families::bernoulli();
    if (name == "hata_yamaguti") return families::hata_yamaguti();
    if (name == "okamoto") return families::okamoto();
    if (name == "quartic_perturbation" || name == "example_2_8_i") return families::quartic_perturbation();
    if (name == "perturbed_minkowski" || name == "example_2_8_ii") return families::perturbed_minkowski();
    throw DomainError("unknown family '" + std::string(name) + "'");
}

/// max over the depth grid of |G_a(t) - G_b(t)|; a lower bound of the sup norm.
inline double sup_distance(const DeRhamSystem& a, const DeRhamSystem& b, int depth) {
    if (a.base() != b.base() || a.space() != b.space()) throw DomainError("sup_distance: systems differ in base or space");
    const auto ga = sample_curve(a, depth);
    const auto gb = sample_curve(b, depth);
    double d = 0.0;
    for (std::size_t k = 0; k < ga.size(); ++k) d = std::max(d, distance(ga.points[k], gb.points[k]));
    return d;
}

struct StudyRow {
    double eps = 0.0;
    double sup_distance = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double margin = 0.0;  // half-depth quadrature delta
};

struct StudyTable {
    std::string family;
    double alpha0 = 0.0;
    double beta0 = 0.0;
    std::vector<StudyRow> rows;
    bool liminf_alpha_holds = true;  // alpha_eps >= alpha_0 - tol on every row
    bool liminf_beta_holds = true;
    std::optional<bool> alpha_gap_monotone;  // only for bounded-inverse families
    std::optional<bool> beta_gap_monotone;
};

inline StudyTable convergence_study(const SystemFamily& fam, const std::vector<double>& eps_list, int depth,
                                    int reg_depth, double tol = 1e-9) {
    if (eps_list.empty()) throw DomainError("convergence_study: empty eps list");
    for (std::size_t k = 1; k < eps_list.size(); ++k) {
        if (!(std::abs(eps_list[k]) < std::abs(eps_list[k - 1]))) {
            throw DomainError("convergence_study: eps list must decrease towards 0");
        }
    }
    const auto base = fam.at(0.0);
    const auto ref = alpha_beta_quadrature(base, reg_depth);
    StudyTable table{fam.name, ref.alpha, ref.beta, {}, true, true, std::nullopt, std::nullopt};
    for (double e : eps_list) {
        const auto sys = fam.at(e);
        const auto est = alpha_beta_quadrature(sys, reg_depth);
        table.rows.push_back({e, sup_distance(sys, base, depth), est.alpha, est.beta, default_margin(sys, est)});
        table.liminf_alpha_holds = table.liminf_alpha_holds && est.alpha >= ref.alpha - tol;
        table.liminf_beta_holds = table.liminf_beta_holds && est.beta >= ref.beta - tol;
    }
    if (fam.bounded_inverse_derivative) {
        auto monotone = [&](auto value, double target) {
            for (std::size_t k = 1; k < table.rows.size(); ++k) {
                if (std::abs(value(table.rows[k]) - target) > std::abs(value(table.rows[k - 1]) - target) + tol) {
                    return false;
                }
            }
            return true;
        };
        table.alpha_gap_monotone = monotone([](const StudyRow& r) { return r.alpha; }, ref.alpha);
        table.beta_gap_monotone = monotone([](const StudyRow& r) { return r.beta; }, ref.beta);
    }
    return table;
}

/// Central difference (G_{+eps} - G_{-eps}) / (2 eps) on the depth grid, stored in points[k].x.
inline CurveSample perturbation_derivative(const SystemFamily& fam, int depth, double eps) {
    if (!(eps > 0.0)) throw DomainError("perturbation_derivative: eps must be > 0");
    const auto plus = sample_curve(fam.at(eps), depth);
    const auto minus = sample_curve(fam.at(-eps), depth);
    if (plus.space != Space::interval) throw DomainError("perturbation_derivative needs an interval family");
    CurveSample out = plus;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.points[k] = {(plus.points[k].x - minus.points[k].x) / (2.0 * eps), 0.0};
    }
    return out;
}

struct ScaleFit {
    double scale = 0.0;         // least-squares c in derivative ~ c T
    double max_residual = 0.0;  // max |derivative - c T|
    double amplitude = 0.0;     // max |c T|
};

/// Fits derivative ~ c * takagi(t) over the sample grid.
inline ScaleFit fit_takagi_scale(const CurveSample& derivative, int terms = 60) {
    double num = 0.0, den = 0.0;
    std::vector<double> tk(derivative.size());
    for (std::size_t k = 0; k < derivative.size(); ++k) {
        tk[k] = oracles::takagi(derivative.t[k], terms);
        num += derivative.points[k].x * tk[k];
        den += tk[k] * tk[k];
    }
    ScaleFit fit;
    fit.scale = den > 0.0 ? num / den : 0.0;
    for (std::size_t k = 0; k < derivative.size(); ++k) {
        fit.max_residual = std::max(fit.max_residual, std::abs(derivative.points[k].x - fit.scale * tk[k]));
        fit.amplitude = std::max(fit.amplitude, std::abs(fit.scale * tk[k]));
    }
    return fit;
}

}  // namespace derham
