#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "derham/io.hpp"

using namespace derham;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_rows(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string parse_error_path(const std::string& text) {
    try {
        parse_system_spec(std::string_view(text));
    } catch (const ParseError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST(ParseSpec, CantorPreset) {
    const auto sys = parse_system_spec(std::string_view(R"({"preset": "cantor"})"));
    EXPECT_EQ(sys.base(), 3);
    EXPECT_TRUE(sys.same_maps(presets::cantor()));
}

TEST(ParseSpec, MinkowskiPreset) {
    EXPECT_TRUE(parse_system_spec(std::string_view(R"("minkowski_inverse")")).same_maps(presets::minkowski_inverse()));
}

TEST(ParseSpec, PresetCallSyntaxAndParamsArray) {
    const auto a = parse_system_spec(std::string_view(R"j({"preset": "bernoulli(0.25, 0.75)"})j"));
    const auto b = parse_system_spec(std::string_view(R"({"preset": "bernoulli", "params": [0.25, 0.75]})"));
    EXPECT_TRUE(a.same_maps(b));
    EXPECT_TRUE(a.same_maps(presets::bernoulli({0.25, 0.75})));
    const auto koch = parse_system_spec(std::string_view(R"({"preset": "derham", "params": [0.5, 0.28867513459481287]})"));
    EXPECT_EQ(koch.space(), Space::plane);
}

TEST(ParseSpec, NumberedAliases) {
    EXPECT_TRUE(parse_system_spec(std::string_view(R"("example_2_2_i")")).same_maps(presets::quadratic()));
    EXPECT_TRUE(parse_system_spec(std::string_view(R"("example_2_2_ii")")).same_maps(presets::cubic()));
    EXPECT_TRUE(parse_system_spec(std::string_view(R"("remark_2_5")")).same_maps(presets::anisotropic()));
    EXPECT_TRUE(parse_system_spec(std::string_view(R"j("example_2_8_i(0.05)")j"))
                    .same_maps(presets::quartic_perturbation(0.05)));
    EXPECT_TRUE(parse_system_spec(std::string_view(R"j("example_2_8_ii(0.05)")j"))
                    .same_maps(presets::perturbed_minkowski(0.05)));
}

TEST(ParseSpec, ExplicitIdentitySystem) {
    const auto sys = parse_system_spec(std::string_view(R"({
        "base": 2, "space": "interval", "name": "identity",
        "maps": [{"kind": "affine", "params": [0.5, 0]}, {"kind": "affine", "params": [0.5, 0.5]}]})"));
    EXPECT_EQ(sys.name(), "identity");
    EXPECT_EQ(eval_G(sys, Rational(3, 8), 10).value.x, 0.375);
}

TEST(ParseSpec, ErrorPaths) {
    EXPECT_EQ(parse_error_path(R"({"preset": "nope"})"), "/preset");
    EXPECT_EQ(parse_error_path(R"({"preset": "cantor", "base": 3})"), "/base");
    EXPECT_EQ(parse_error_path(R"({"base": 2, "space": "interval"})"), "/maps");
    EXPECT_EQ(parse_error_path(R"({"base": 2, "space": "line", "maps": []})"), "/space");
    EXPECT_EQ(parse_error_path(R"({"base": 2, "space": "interval", "maps": [{"kind": "affine", "params": [0.5, 0]}]})"),
              "/maps");
    EXPECT_EQ(parse_error_path(R"({"base": 2, "space": "interval",
        "maps": [{"kind": "affine", "params": [0.5, 0]}, {"kind": "affine", "params": [0.5, "x"]}]})"),
              "/maps/1/params/1");
    EXPECT_EQ(parse_error_path(R"({"base": 2, "space": "interval",
        "maps": [{"kind": "affine", "params": [0.5, 0]}, {"kind": "spline", "params": []}]})"),
              "/maps/1/kind");
    EXPECT_EQ(parse_error_path(R"({"base": 2, "space": "plane",
        "maps": [{"kind": "affine", "params": [0.5, 0]}, {"kind": "affine", "params": [0.5, 0.5]}]})"),
              "/maps/0/kind");
    EXPECT_EQ(parse_error_path(R"j({"preset": "okamoto(0.5)"})j"), "/preset");
    EXPECT_EQ(parse_error_path(R"j({"preset": "okamoto(0.6, 0.2)"})j"), "/preset");
    EXPECT_EQ(parse_error_path("{not json"), "");
}

TEST(ParseSpec, ValidationFailureCarriesReport) {
    try {
        parse_system_spec(std::string_view(R"({"preset": "derham_literal", "params": [0.25, 0]})"));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_FALSE(e.report().passed);
        EXPECT_NEAR(e.report().max_junction_residual(), 0.5, 1e-14);
    }
}

TEST(ParseSpec, EveryPresetHasZeroJunctionResidual) {
    for (const char* doc : {"cantor", "bernoulli(0.25,0.75)", "bernoulli(0.2,0.3,0.5)", "okamoto(0.2,0.6)",
                            "minkowski_inverse", "derham(0.3,0.3)", "koch", "quadratic", "cubic", "anisotropic",
                            "hata_yamaguti(0.1)", "quartic_perturbation(0.1)", "perturbed_minkowski(0.1)"}) {
        const auto sys = parse_system_spec(json(doc));
        EXPECT_LE(validate_system(sys).max_junction_residual(), 1e-12) << doc;
    }
}

// parse -> serialize -> parse reproduces the same maps, and serialization is a fixed point.
TEST(ParseSpec, RoundTripIdempotent) {
    for (const char* doc : {"cantor", "bernoulli(0.25,0.75)", "okamoto(0.2,0.6)", "minkowski_inverse", "koch",
                            "cubic", "anisotropic", "perturbed_minkowski(0.05)"}) {
        const auto sys = parse_system_spec(json(doc));
        const auto once = serialize_system(sys);
        const auto again = parse_system_spec(once);
        EXPECT_TRUE(sys.same_maps(again)) << doc;
        EXPECT_EQ(serialize_system(again).dump(), once.dump()) << doc;
        EXPECT_TRUE(parse_system_spec(std::string_view(once.dump())).same_maps(sys)) << doc;
    }
}

TEST(LoadSpec, MissingFile) { EXPECT_THROW(load_system_spec("/nonexistent/spec.json"), IoError); }

TEST(LoadSpec, ShippedSpecsParse) {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(DERHAM_SPECS_DIR)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_system_spec(entry.path().string())) << entry.path();
        ++count;
    }
    EXPECT_GT(count, 0);
}

TEST(FormatNumber, SpecialValues) {
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
}

TEST(Csv, DepthZeroCurveHasThreeLines) {
    const auto csv = to_csv(sample_curve(presets::minkowski_inverse(), 0));
    EXPECT_EQ(csv, "t,g\n0,0\n1,1\n");
}

TEST(Csv, PlaneCurveColumns) {
    const auto rows = read_rows(to_csv(sample_curve(presets::koch(), 2)));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x", "y"}));
}

// Every number survives the trip through text exactly.
TEST(Csv, RoundTripExact) {
    const auto sample = sample_curve(presets::minkowski_inverse(), 10);
    const auto rows = read_rows(to_csv(sample));
    ASSERT_EQ(rows.size(), sample.size() + 1);
    for (std::size_t k = 0; k < sample.size(); ++k) {
        EXPECT_EQ(std::strtod(rows[k + 1][0].c_str(), nullptr), sample.t[k]);
        EXPECT_EQ(std::strtod(rows[k + 1][1].c_str(), nullptr), sample.points[k].x);
    }
}

TEST(Csv, VariationTelescopesForMinkowski) {
    const auto rows = read_rows(to_csv(p_variation_table(presets::minkowski_inverse(), 1.0, 6)));
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "p", "s_n"}));
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(std::strtod(rows[k][2].c_str(), nullptr), 1.0, 1e-12);
}

TEST(Csv, ExponentTraceFairBernoulli) {
    const auto rows = read_rows(to_csv(empirical_exponent(presets::bernoulli({0.5, 0.5}), 1, 5)));
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(rows[k][1], "1");
}

TEST(Csv, IncrementTableAndEstimate) {
    const auto rows = read_rows(to_csv(increment_table(presets::bernoulli({0.25, 0.75}), 2)));
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "00", "0", "0.0625"}));
    EXPECT_EQ(rows[4], (std::vector<std::string>{"3", "11", "0.75", "0.5625"}));

    const auto est = alpha_beta_quadrature(presets::cantor(), 2);
    const auto line = read_rows(to_csv_estimate(est, classify(est, 0.0)));
    EXPECT_EQ(line[1][5], "inf");
    EXPECT_EQ(line[1].back(), "derivative_zero_ae");
}

TEST(Svg, FairBernoulliDiagonal) {
    std::ostringstream out;
    write_svg(out, sample_curve(presets::bernoulli({0.5, 0.5}), 2), {100, 100, "#000", 1.0});
    EXPECT_NE(out.str().find("points=\"0.000,100.000 25.000,75.000 50.000,50.000 75.000,25.000 100.000,0.000\""),
              std::string::npos)
        << out.str();
    EXPECT_NE(out.str().find("viewBox=\"0 0 100 100\""), std::string::npos);
}

TEST(Svg, Deterministic) {
    const auto s = sample_curve(presets::koch(), 8);
    std::ostringstream a, b;
    write_svg(a, s);
    write_svg(b, s);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Emit, UnwritableDestination) {
    EXPECT_THROW(emit_csv(sample_curve(presets::cantor(), 1), "/nonexistent/dir/out.csv"), IoError);
    EXPECT_THROW(emit_svg(sample_curve(presets::cantor(), 1), "/nonexistent/dir/out.svg"), IoError);
}

TEST(Emit, WritesFile) {
    const auto path = (fs::temp_directory_path() / "derham_emit_test.csv").string();
    emit_csv(sample_curve(presets::cantor(), 1), path);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), "t,g\n0,0\n0.33333333333333331,0.5\n0.66666666666666663,0.5\n1,1\n");
    fs::remove(path);
}
