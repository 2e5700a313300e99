#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>

#include "oracles.hpp"
#include "spraycard/pipeline.hpp"
#include "spraycard/synthcard.hpp"
#include "spraycard/synthcard_json.hpp"

namespace spraycard {
namespace {

SynthSpec blank(double w = 10000, double h = 5000, double dpi = 600) {
    SynthSpec s;
    s.card_width_um = w;
    s.card_height_um = h;
    s.dpi = dpi;
    return s;
}

TEST(Render, EmptyLayoutIsUniformBackground) {
    const SynthCard card = render(blank());
    EXPECT_TRUE(card.truth.drops.empty());
    for (const Rgb& p : card.image.pixels()) {
        EXPECT_FLOAT_EQ(p.r, 0.85f);
        EXPECT_FLOAT_EQ(p.g, 0.85f);
    }
}

TEST(Render, ImageSizeFollowsDpi) {
    const SynthSpec s = blank(76000, 26000, 600);
    const SynthCard card = render(s);
    EXPECT_EQ(card.image.width(), 1795);  // 76000 * 600 / 25400 = 1795.3
    EXPECT_EQ(card.image.height(), 614);  // 614.17
}

TEST(Render, SingleDropAreaMatchesIndependentCount) {
    SynthSpec s = blank();
    s.drops.push_back({5000, 2500, 1000});
    const SynthCard card = render(s);
    ASSERT_EQ(card.truth.drops.size(), 1u);
    const double px_per_um = 600.0 / 25400.0;
    const BinaryImage disk = oracle::disk(card.image.width(), card.image.height(),
                                          5000 * px_per_um, 2500 * px_per_um, 500 * px_per_um);
    EXPECT_EQ(card.truth.drops[0].area_px, oracle::count(disk));
    // 11.81 px radius; the raster count stays within a perimeter of pi r^2.
    const double r = 500 * px_per_um;
    EXPECT_NEAR(static_cast<double>(card.truth.drops[0].area_px), std::numbers::pi * r * r, 2 * std::numbers::pi * r);
    std::int64_t dark = 0;
    for (const Rgb& p : card.image.pixels()) dark += p.r < 0.35f;
    EXPECT_EQ(dark, card.truth.drops[0].area_px);
}

TEST(Render, NoiseIsSeededAndDeterministic) {
    SynthSpec s = blank(5000, 5000, 300);
    s.drops.push_back({2500, 2500, 800});
    s.noise_sigma = 0.05;
    s.rng_seed = 42;
    const SynthCard a = render(s);
    const SynthCard b = render(s);
    EXPECT_EQ(a.image, b.image);
    s.rng_seed = 43;
    EXPECT_NE(render(s).image, a.image);
    for (const Rgb& p : a.image.pixels()) {
        ASSERT_GE(p.r, 0.0f);
        ASSERT_LE(p.r, 1.0f);
    }
}

TEST(Validate, DropCrossingEdgeNamesTheField) {
    SynthSpec s = blank();
    s.drops.push_back({5000, 2500, 100});
    s.drops.push_back({9900, 2500, 400});
    try {
        render(s);
        FAIL() << "expected LayoutError";
    } catch (const LayoutError& e) {
        EXPECT_EQ(e.field(), "drops[1].center_x_um");
    }
}

TEST(Validate, IntensitiesMustStraddleThreshold) {
    SynthSpec s = blank();
    s.drop_intensity = 0.4;
    EXPECT_THROW(validate(s), LayoutError);
    s = blank();
    s.background_intensity = 0.3;
    EXPECT_THROW(validate(s), LayoutError);
    s = blank();
    s.dpi = 0;
    EXPECT_THROW(validate(s), LayoutError);
}

TEST(Grid, TwentyMillimetreDropsFitOnStandardCard) {
    const auto drops = grid_layout({1000.0, 20, 3000.0, PixelPhase{0.0, 0.5}}, 76000, 26000, 600);
    ASSERT_EQ(drops.size(), 20u);
    SynthSpec s = blank(76000, 26000, 600);
    s.drops = drops;
    const SynthCard card = render(s);
    // Identical phase means identical rasterization.
    for (const auto& t : card.truth.drops) EXPECT_EQ(t.area_px, card.truth.drops[0].area_px);
    for (std::size_t i = 0; i < drops.size(); ++i)
        for (std::size_t j = i + 1; j < drops.size(); ++j)
            EXPECT_GE(std::hypot(drops[i].center_x_um - drops[j].center_x_um,
                                 drops[i].center_y_um - drops[j].center_y_um),
                      min_grid_spacing_um(1000, 600) - 2 * 25400.0 / 600);
}

TEST(Grid, SpacingBelowMinimumRejected) {
    EXPECT_THROW(grid_layout({1000.0, 4, 1100.0, std::nullopt}, 76000, 26000, 600), LayoutError);
    EXPECT_THROW(grid_layout({1000.0, 400, 3000.0, std::nullopt}, 76000, 26000, 600), LayoutError);
}

TEST(CoverageCard, AnalyticCoverage) {
    const SynthSpec s = coverage_card(1000, 2288, 8, 4, 600);
    EXPECT_EQ(s.drops.size(), 32u);
    const double analytic = std::numbers::pi * 1000.0 * 1000.0 / 4.0 / (2288.0 * 2288.0);
    double sum = 0.0;
    for (const auto& d : s.drops) sum += std::numbers::pi * d.diameter_um * d.diameter_um / 4.0;
    EXPECT_NEAR(sum / (s.card_width_um * s.card_height_um), analytic, 1e-12);
}

TEST(OverlapPair, UnionAreaMatchesLensFormula) {
    const double d = 1600, dist = 1200;
    SynthSpec s = blank(8000, 5000, 1200);
    s.drops = overlap_pair(d, dist, 4000, 2500);
    const SynthCard card = render(s);
    std::int64_t dark = 0;
    for (const Rgb& p : card.image.pixels()) dark += p.r < 0.35f;
    const double px_per_um = 1200 / 25400.0;
    const double r_px = d / 2 * px_per_um, dist_px = dist * px_per_um;
    const double expected = 2 * std::numbers::pi * r_px * r_px - oracle::lens_area(r_px, dist_px);
    EXPECT_NEAR(static_cast<double>(dark), expected, 0.01 * expected);
}

TEST(ControlCard, HasAllFiveBands) {
    const SynthSpec s = control_card(600, 4);
    EXPECT_EQ(s.drops.size(), 20u);
    EXPECT_NO_THROW(validate(s));
}

TEST(LayoutJson, ParsesAllSections) {
    const SynthSpec s = parse_synth_spec(R"({
        "card_width_um": 20000, "card_height_um": 10000, "dpi": 600,
        "noise_sigma": 0.02, "rng_seed": 9,
        "drops": [{"center_x_um": 1000, "center_y_um": 1000, "diameter_um": 250}],
        "grids": [{"diameter_um": 500, "count": 3, "spacing_um": 2000, "phase_px": [0.0, 0.5]}],
        "overlap_pairs": [{"diameter_um": 800, "center_distance_um": 600,
                           "mid_x_um": 15000, "mid_y_um": 8000}]
    })");
    EXPECT_EQ(s.drops.size(), 6u);
    EXPECT_EQ(s.rng_seed, 9u);
    EXPECT_DOUBLE_EQ(s.noise_sigma, 0.02);
    EXPECT_DOUBLE_EQ(s.drops[0].diameter_um, 250);
    EXPECT_DOUBLE_EQ(s.drops[5].diameter_um, 800);
}

std::string layout_error_field(const std::string& text) {
    try {
        render(parse_synth_spec(text));
    } catch (const LayoutError& e) {
        return e.field();
    }
    return "<no error>";
}

TEST(LayoutJson, ErrorsCarryFieldPath) {
    EXPECT_EQ(layout_error_field(R"({"card_height_um": 1, "dpi": 600})"), "card_width_um");
    EXPECT_EQ(layout_error_field(R"({"card_width_um": "x", "card_height_um": 1, "dpi": 600})"),
              "card_width_um");
    EXPECT_EQ(layout_error_field(R"({"card_width_um": 5000, "card_height_um": 5000, "dpi": 600,
        "drops": [{"center_x_um": 100, "center_y_um": 2500, "diameter_um": 500}]})"),
              "drops[0].center_x_um");
    EXPECT_EQ(layout_error_field(R"({"card_width_um": 5000, "card_height_um": 5000, "dpi": 600,
        "grids": [{"diameter_um": 500, "count": 3, "spacing_um": 10}]})"),
              "grids[0].spacing_um");
    EXPECT_EQ(layout_error_field("{not json"), "");
}

TEST(LayoutJson, GroundTruthSidecar) {
    SynthSpec s = blank();
    s.drops.push_back({5000, 2500, 1000});
    const SynthCard card = render(s);
    const auto doc = nlohmann::json::parse(ground_truth_json(s, card.truth));
    ASSERT_TRUE(doc.contains("drops"));
    ASSERT_EQ(doc["drops"].size(), 1u);
    EXPECT_EQ(doc["drops"][0]["area_px"].get<std::int64_t>(), card.truth.drops[0].area_px);
}

TEST(RoundTrip, MeasuredDiameterApproachesTruthWithDpi) {
    double prev_err = 1e9;
    for (double dpi : {300.0, 600.0, 1200.0}) {
        SynthSpec s = blank(20000, 10000, dpi);
        s.drops = grid_layout({1000.0, 8, 4000.0, std::nullopt}, 20000, 10000, dpi);
        const SynthCard card = render(s);
        AnalysisConfig cfg;
        cfg.card_width_um = s.card_width_um;
        cfg.card_height_um = s.card_height_um;
        const Analysis a = analyze(card.image, cfg);
        ASSERT_EQ(a.report.drop_count, 8) << dpi;
        double mean = 0;
        for (const auto& d : a.report.drops) mean += d.diameter_um;
        mean /= 8.0;
        const double err = std::abs(mean - 1000.0) / 1000.0;
        EXPECT_LT(err, 0.03) << dpi;
        if (dpi == 1200.0) {
            EXPECT_LE(err, prev_err + 0.002);
        }
        prev_err = err;
    }
}

}  // namespace
}  // namespace spraycard
