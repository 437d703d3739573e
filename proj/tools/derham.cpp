// Command-line front end. Exit codes: 0 success, 2 validation failure, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "derham/derham.hpp"

using namespace derham;

namespace {

constexpr int kValidationExit = 2;

// A path to a JSON document, or an inline preset such as "koch" or "bernoulli(0.25,0.75)".
DeRhamSystem load(const std::string& arg) {
    if (std::filesystem::exists(arg) || arg.ends_with(".json")) return load_system_spec(arg);
    return parse_system_spec(json(arg));
}

// Writes to `path`, or to stdout when path is empty or "-".
template <class Write>
void output(const std::string& path, Write&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    detail::write_file(path, write);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw DomainError("bad number '" + item + "' in list");
        }
    }
    return out;
}

// Largest |G - oracle| over random digit strings.
struct Comparison {
    double max_error = 0.0;
    std::size_t points = 0;
};

oracles::AffineDigitFamily affine_family_of(const DeRhamSystem& sys) {
    std::vector<double> rates, offsets;
    for (const auto& f : sys.branches()) {
        if (f.kind() != MapKind::affine) throw DomainError("affine oracle needs a system of affine branches");
        rates.push_back(f.params()[0]);
        offsets.push_back(f.params()[1]);
    }
    return {rates, offsets};
}

Comparison compare_with_oracle(const DeRhamSystem& sys, const std::string& oracle, std::size_t points, int max_len,
                               std::uint64_t seed) {
    if (sys.space() != Space::interval) throw DomainError("oracles cover interval systems only");
    std::optional<oracles::AffineDigitFamily> fam;
    if (oracle == "cantor" || oracle == "bernoulli" || oracle == "okamoto") {
        fam = affine_family_of(sys);
        if (oracle == "cantor" && sys.base() != 3) throw DomainError("cantor oracle needs m = 3");
        if (oracle == "okamoto" && sys.base() != 3) throw DomainError("okamoto oracle needs m = 3");
    } else if (oracle == "minkowski") {
        if (sys.base() != 2) throw DomainError("minkowski oracle needs m = 2");
        if (max_len > 60) throw DomainError("minkowski oracle supports at most 60 digits");
    } else {
        throw DomainError("unknown oracle '" + oracle + "'");
    }
    std::mt19937_64 rng(seed);
    Comparison c;
    for (std::size_t i = 0; i < points; ++i) {
        std::vector<std::uint8_t> raw(1 + rng() % static_cast<std::uint64_t>(max_len));
        for (auto& a : raw) a = static_cast<std::uint8_t>(rng() % static_cast<std::uint64_t>(sys.base()));
        const MadicDigits d(sys.base(), raw);
        const double expect =
            fam ? oracles::affine_digit_series(*fam, d) : oracles::minkowski_q_inverse(d).to_double();
        c.max_error = std::max(c.max_error, std::abs(eval_G_madic(sys, d).x - expect));
        ++c.points;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"de Rham curves: solve G(t) = f_i(G(mt - i)), estimate alpha/beta, emit CSV/SVG"};
    app.require_subcommand(1);
    std::string spec, out;

    auto* validate = app.add_subcommand("validate", "check weak contraction and junction conditions");
    int grid_n = 65;
    double tol = 1e-10;
    validate->add_option("spec", spec, "system document or preset")->required();
    validate->add_option("--grid", grid_n, "validation grid size")->check(CLI::Range(2, 100000));
    validate->add_option("--tol", tol, "junction and contraction tolerance");

    auto* eval = app.add_subcommand("eval", "G(t) with its bracket");
    std::string t_arg;
    int depth = 20;
    eval->add_option("spec", spec)->required();
    eval->add_option("--t", t_arg, "p/q or decimal in [0,1]")->required();
    eval->add_option("--depth", depth)->check(CLI::PositiveNumber);

    auto* sample = app.add_subcommand("sample", "G on the m-adic grid");
    std::string svg;
    SvgOptions svg_opt;
    sample->add_option("spec", spec)->required();
    sample->add_option("--depth", depth)->required()->check(CLI::NonNegativeNumber);
    sample->add_option("--out", out, "CSV destination ('-' for stdout)");
    sample->add_option("--svg", svg, "SVG destination");
    sample->add_option("--width", svg_opt.width)->check(CLI::PositiveNumber);
    sample->add_option("--height", svg_opt.height)->check(CLI::PositiveNumber);
    sample->add_option("--stroke", svg_opt.stroke);

    auto* increments = app.add_subcommand("increments", "M_n for every depth-n cell");
    increments->add_option("spec", spec)->required();
    increments->add_option("--depth", depth)->required()->check(CLI::NonNegativeNumber);
    increments->add_option("--out", out);

    auto* regularity = app.add_subcommand("regularity", "alpha, beta and the verdict");
    std::string method = "quad";
    std::uint64_t samples = 100000, seed = 42;
    int eval_depth = 0;
    std::optional<double> margin;
    regularity->add_option("spec", spec)->required();
    regularity->add_option("--method", method)->check(CLI::IsMember({"quad", "mc"}));
    regularity->add_option("--depth", depth, "grid depth (quad) or digit length (mc)")->check(CLI::PositiveNumber);
    regularity->add_option("--eval-depth", eval_depth, "digits used for G(Ht); 0 = depth + 20");
    regularity->add_option("--samples", samples)->check(CLI::PositiveNumber);
    regularity->add_option("--seed", seed);
    regularity->add_option("--margin", margin, "classification margin; default from the estimator");
    regularity->add_option("--out", out);

    auto* variation = app.add_subcommand("variation", "p-variation sums over m-adic partitions");
    double p = 1.0;
    int n_max = 10;
    variation->add_option("spec", spec)->required();
    variation->add_option("--p", p)->check(CLI::PositiveNumber);
    variation->add_option("--nmax", n_max)->check(CLI::PositiveNumber);
    variation->add_option("--out", out);

    auto* exponent = app.add_subcommand("exponent", "-log_m M_n(t) / n along a random t");
    exponent->add_option("spec", spec)->required();
    exponent->add_option("--seed", seed);
    exponent->add_option("--nmax", n_max)->check(CLI::PositiveNumber);
    exponent->add_option("--out", out);

    auto* compare = app.add_subcommand("compare", "solver against a closed-form oracle");
    std::string oracle;
    std::size_t points = 1000;
    int max_len = 20;
    compare->add_option("spec", spec)->required();
    compare->add_option("--oracle", oracle)->required()->check(CLI::IsMember({"cantor", "bernoulli", "okamoto", "minkowski"}));
    compare->add_option("--points", points)->check(CLI::PositiveNumber);
    compare->add_option("--max-len", max_len)->check(CLI::Range(1, 60));
    compare->add_option("--seed", seed);
    compare->add_option("--tol", tol);

    auto* perturb = app.add_subcommand("perturb", "continuity study over a system family");
    std::string family, eps_list = "0.1,0.05,0.025";
    int reg_depth = 10;
    std::optional<double> takagi_eps;
    perturb->add_option("--family", family)->required();
    perturb->add_option("--eps-list", eps_list, "comma-separated, decreasing towards 0");
    perturb->add_option("--depth", depth, "grid depth for sup distances")->check(CLI::NonNegativeNumber);
    perturb->add_option("--reg-depth", reg_depth, "quadrature depth for alpha, beta")->check(CLI::PositiveNumber);
    perturb->add_option("--takagi-eps", takagi_eps, "also fit the central-difference derivative against Takagi");
    perturb->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) {
            const auto sys = load(spec);
            const auto rep = validate_system(sys, grid_n, tol);
            std::cout << sys.name() << " (m=" << sys.base() << ", " << to_string(sys.space()) << ")\n" << rep.summary();
            return rep.passed ? 0 : kValidationExit;
        }
        if (*eval) {
            const auto sys = load(spec);
            const GValue g = t_arg.find('.') != std::string::npos || t_arg.find('e') != std::string::npos
                                 ? eval_G(sys, std::stod(t_arg), depth)
                                 : eval_G(sys, Rational::parse(t_arg), depth);
            std::cout << "t,x" << (sys.space() == Space::plane ? ",y" : "") << ",bracket\n"
                      << t_arg << ',' << format_number(g.value.x);
            if (sys.space() == Space::plane) std::cout << ',' << format_number(g.value.y);
            std::cout << ',' << format_number(g.bracket) << '\n';
            return 0;
        }
        if (*sample) {
            const auto s = sample_curve(load(spec), depth);
            if (!out.empty() || svg.empty()) output(out, [&](std::ostream& o) { write_csv(o, s); });
            if (!svg.empty()) emit_svg(s, svg, svg_opt);
            return 0;
        }
        if (*increments) {
            const auto t = increment_table(load(spec), depth);
            output(out, [&](std::ostream& o) { write_csv(o, t); });
            return 0;
        }
        if (*regularity) {
            const auto sys = load(spec);
            const auto est = method == "quad" ? alpha_beta_quadrature(sys, depth, eval_depth)
                                              : alpha_beta_monte_carlo(sys, samples, depth, eval_depth, seed);
            const auto verdict = classify(est, margin.value_or(default_margin(sys, est)));
            output(out, [&](std::ostream& o) { write_csv(o, est, verdict); });
            return 0;
        }
        if (*variation) {
            const auto vt = p_variation_table(load(spec), p, n_max);
            output(out, [&](std::ostream& o) { write_csv(o, vt); });
            return 0;
        }
        if (*exponent) {
            const auto tr = empirical_exponent(load(spec), seed, n_max);
            output(out, [&](std::ostream& o) { write_csv(o, tr); });
            return 0;
        }
        if (*compare) {
            const auto c = compare_with_oracle(load(spec), oracle, points, max_len, seed);
            std::cout << "oracle,points,max_error\n"
                      << oracle << ',' << c.points << ',' << format_number(c.max_error) << '\n';
            return c.max_error <= std::max(tol, 1e-12) ? 0 : 1;
        }
        if (*perturb) {
            const auto fam = family_by_name(family);
            const auto table = convergence_study(fam, parse_list(eps_list), depth, reg_depth);
            output(out, [&](std::ostream& o) { write_csv(o, table); });
            std::cerr << "liminf_alpha_holds=" << (table.liminf_alpha_holds ? "true" : "false");
            if (table.alpha_gap_monotone) std::cerr << " alpha_gap_monotone=" << (*table.alpha_gap_monotone ? "true" : "false");
            std::cerr << '\n';
            if (takagi_eps) {
                const auto fit = fit_takagi_scale(perturbation_derivative(fam, depth, *takagi_eps));
                std::cerr << "takagi_scale=" << format_number(fit.scale) << " max_residual=" << format_number(fit.max_residual)
                          << " amplitude=" << format_number(fit.amplitude) << '\n';
            }
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what();
        return kValidationExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
