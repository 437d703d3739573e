#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "derham/errors.hpp"
#include "derham/geometry.hpp"
#include "derham/map.hpp"

namespace derham {

/// Base m and the ordered branches f_0 ... f_{m-1} of G(t) = f_i(G(mt - i)).
/// Fix(f_0) and Fix(f_{m-1}) are computed once at construction.
class DeRhamSystem {
public:
    explicit DeRhamSystem(std::vector<DifferentiableMap> branches, std::string name = {})
        : branches_(std::move(branches)), name_(std::move(name)) {
        if (branches_.size() < 2) throw DomainError("a de Rham system needs m >= 2 branches");
        if (branches_.size() > 256) throw DomainError("base above 256 is not supported");
        space_ = branches_.front().space();
        for (const auto& f : branches_) {
            if (f.space() != space_) throw DomainError("branches mix interval and plane kinds");
        }
        fix_first_ = fixed_point(branches_.front());
        fix_last_ = fixed_point(branches_.back());
    }

    int base() const noexcept { return static_cast<int>(branches_.size()); }
    Space space() const noexcept { return space_; }
    const DifferentiableMap& branch(int i) const { return branches_.at(static_cast<std::size_t>(i)); }
    const std::vector<DifferentiableMap>& branches() const noexcept { return branches_; }
    const std::string& name() const noexcept { return name_; }

    /// G(0)
    Point fix_first() const noexcept { return fix_first_; }
    /// G(1)
    Point fix_last() const noexcept { return fix_last_; }

    /// Same base, space and branches (names ignored).
    bool same_maps(const DeRhamSystem& o) const { return branches_ == o.branches_; }

private:
    std::vector<DifferentiableMap> branches_;
    std::string name_;
    Space space_ = Space::interval;
    Point fix_first_, fix_last_;
};

struct BranchReport {
    int index = 0;
    double max_jacobian_norm = 0.0;
    double max_lipschitz_quotient = 0.0;
    bool maps_into_x = true;
    bool weak_contraction = true;
};

struct JunctionReport {
    int index = 0;  // checks f_i(Fix f_{m-1}) == f_{i+1}(Fix f_0)
    double residual = 0.0;
    bool ok = true;
};

struct ValidationReport {
    std::vector<BranchReport> branches;
    std::vector<JunctionReport> junctions;
    bool passed = true;

    double max_junction_residual() const {
        double r = 0.0;
        for (const auto& j : junctions) r = std::max(r, j.residual);
        return r;
    }

    std::string summary() const {
        std::string s;
        char buf[160];
        for (const auto& b : branches) {
            std::snprintf(buf, sizeof buf, "branch %d: max|Df|=%.6g lip=%.6g into_X=%s weak=%s\n", b.index,
                          b.max_jacobian_norm, b.max_lipschitz_quotient, b.maps_into_x ? "yes" : "NO",
                          b.weak_contraction ? "yes" : "NO");
            s += buf;
        }
        for (const auto& j : junctions) {
            std::snprintf(buf, sizeof buf, "junction %d: residual=%.3g %s\n", j.index, j.residual,
                          j.ok ? "ok" : "FAIL");
            s += buf;
        }
        s += passed ? "PASS\n" : "FAIL\n";
        return s;
    }
};

/// Thrown when a constructed system does not pass validate_system.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report)
        : std::runtime_error("system failed validation:\n" + report.summary()), report_(std::move(report)) {}
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

namespace detail {

inline std::vector<Point> validation_grid(Space space, int grid_n) {
    std::vector<Point> g;
    if (space == Space::interval) {
        for (int k = 0; k < grid_n; ++k) g.push_back({static_cast<double>(k) / (grid_n - 1), 0.0});
    } else {
        // Box around the unit square; every plane preset keeps its curve inside it.
        const int side = std::max(2, std::min(grid_n, 24));
        for (int i = 0; i < side; ++i) {
            for (int j = 0; j < side; ++j) {
                g.push_back({-0.5 + 2.0 * i / (side - 1), -0.5 + 2.0 * j / (side - 1)});
            }
        }
    }
    return g;
}

}  // namespace detail

/// Grid certificate for weak contraction, invariance of X and the junction
/// (D-)conditions. Failures are reported, never thrown.
inline ValidationReport validate_system(const DeRhamSystem& sys, int grid_n = 65, double tol = 1e-10) {
    if (grid_n < 2) throw DomainError("validate_system: grid_n must be >= 2");
    ValidationReport rep;
    const auto grid = detail::validation_grid(sys.space(), grid_n);
    for (int i = 0; i < sys.base(); ++i) {
        const auto& f = sys.branch(i);
        BranchReport b;
        b.index = i;
        std::vector<Point> img(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            img[k] = f.eval_unchecked(grid[k]);
            b.max_jacobian_norm = std::max(b.max_jacobian_norm, jacobian_norms(f.jacobian_unchecked(grid[k])).sigma_max);
            if (sys.space() == Space::interval && (img[k].x < -tol || img[k].x > 1.0 + tol)) b.maps_into_x = false;
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (std::size_t l = k + 1; l < grid.size(); ++l) {
                const double q = distance(img[k], img[l]) / distance(grid[k], grid[l]);
                b.max_lipschitz_quotient = std::max(b.max_lipschitz_quotient, q);
            }
        }
        const double bound = f.declared_lipschitz().value_or(1.0);
        b.weak_contraction = b.max_lipschitz_quotient <= bound + tol && b.max_jacobian_norm <= 1.0 + tol;
        rep.passed = rep.passed && b.maps_into_x && b.weak_contraction;
        rep.branches.push_back(b);
    }
    for (int i = 0; i + 1 < sys.base(); ++i) {
        JunctionReport j;
        j.index = i;
        j.residual = distance(sys.branch(i).eval_unchecked(sys.fix_last()),
                              sys.branch(i + 1).eval_unchecked(sys.fix_first()));
        j.ok = j.residual <= tol;
        rep.passed = rep.passed && j.ok;
        rep.junctions.push_back(j);
    }
    return rep;
}

/// Throws ValidationError unless the system passes.
inline const DeRhamSystem& require_valid(const DeRhamSystem& sys) {
    auto rep = validate_system(sys);
    if (!rep.passed) throw ValidationError(std::move(rep));
    return sys;
}

}  // namespace derham
