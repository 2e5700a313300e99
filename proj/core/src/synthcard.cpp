#include "spraycard/synthcard.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "spraycard/error.hpp"
#include "spraycard/metrics.hpp"
#include "spraycard/raster.hpp"

namespace spraycard {

double SynthSpec::um_per_px() const noexcept { return kMicrometersPerInch / dpi; }

int SynthSpec::image_width_px() const noexcept {
    return static_cast<int>(std::lround(card_width_um * dpi / kMicrometersPerInch));
}

int SynthSpec::image_height_px() const noexcept {
    return static_cast<int>(std::lround(card_height_um * dpi / kMicrometersPerInch));
}

namespace {

std::string drop_field(std::size_t i, const char* name) {
    return "drops[" + std::to_string(i) + "]." + name;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const SynthSpec& spec) {
    if (!(spec.card_width_um > 0.0)) throw LayoutError("card_width_um", "must be positive");
    if (!(spec.card_height_um > 0.0)) throw LayoutError("card_height_um", "must be positive");
    if (!(spec.dpi > 0.0)) throw LayoutError("dpi", "must be positive");
    if (spec.image_width_px() < 1 || spec.image_height_px() < 1) {
        throw LayoutError("dpi", "card renders to an empty image at this resolution");
    }
    if (!in_unit(spec.background_intensity)) {
        throw LayoutError("background_intensity", "must lie in [0,1]");
    }
    if (!in_unit(spec.drop_intensity)) throw LayoutError("drop_intensity", "must lie in [0,1]");
    if (!(spec.drop_intensity < kDefaultThreshold)) {
        throw LayoutError("drop_intensity", "must be below the 0.35 binarization threshold");
    }
    if (!(spec.background_intensity > kDefaultThreshold)) {
        throw LayoutError("background_intensity", "must be above the 0.35 binarization threshold");
    }
    if (!(spec.noise_sigma >= 0.0)) throw LayoutError("noise_sigma", "must be >= 0");

    for (std::size_t i = 0; i < spec.drops.size(); ++i) {
        const SynthDrop& d = spec.drops[i];
        if (!(d.diameter_um > 0.0)) throw LayoutError(drop_field(i, "diameter_um"), "must be positive");
        const double r = d.diameter_um / 2.0;
        if (!(d.center_x_um - r >= 0.0 && d.center_x_um + r <= spec.card_width_um)) {
            throw LayoutError(drop_field(i, "center_x_um"), "drop crosses the card edge");
        }
        if (!(d.center_y_um - r >= 0.0 && d.center_y_um + r <= spec.card_height_um)) {
            throw LayoutError(drop_field(i, "center_y_um"), "drop crosses the card edge");
        }
    }
}

SynthCard render(const SynthSpec& spec) {
    validate(spec);
    const int w = spec.image_width_px();
    const int h = spec.image_height_px();
    const double px_per_um = spec.dpi / kMicrometersPerInch;

    BinaryImage covered(w, h);
    GroundTruth truth;
    truth.drops.reserve(spec.drops.size());
    for (const SynthDrop& d : spec.drops) {
        const double cx = d.center_x_um * px_per_um;
        const double cy = d.center_y_um * px_per_um;
        const double r = d.diameter_um / 2.0 * px_per_um;
        const double r2 = r * r;
        TruthDrop t{d.diameter_um, 0, cx, cy};
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - r - 0.5)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + r - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - r - 0.5)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + r - 0.5)));
        for (int y = y0; y <= y1; ++y) {
            const double dy = y + 0.5 - cy;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x + 0.5 - cx;
                if (dx * dx + dy * dy <= r2) {
                    covered(x, y) = 1;
                    ++t.area_px;
                }
            }
        }
        truth.drops.push_back(t);
    }

    RgbImage img(w, h);
    const auto bg = static_cast<float>(spec.background_intensity);
    const auto fg = static_cast<float>(spec.drop_intensity);
    const auto cov = covered.pixels();
    auto out = img.pixels();
    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.rng_seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double base = cov[i] ? spec.drop_intensity : spec.background_intensity;
            const auto v = static_cast<float>(std::clamp(base + noise(rng), 0.0, 1.0));
            out[i] = Rgb{v, v, v};
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const float v = cov[i] ? fg : bg;
            out[i] = Rgb{v, v, v};
        }
    }
    return SynthCard{std::move(img), std::move(truth)};
}

double min_grid_spacing_um(double diameter_um, double dpi) {
    return diameter_um + 2.0 * (2.0 * kMicrometersPerInch / dpi);
}

std::vector<SynthDrop> grid_layout(const GridLayout& grid, double card_width_um,
                                   double card_height_um, double dpi) {
    if (!(grid.diameter_um > 0.0)) throw LayoutError("diameter_um", "must be positive");
    if (grid.count < 0) throw LayoutError("count", "must be >= 0");
    if (!(dpi > 0.0)) throw LayoutError("dpi", "must be positive");
    if (!(grid.spacing_um > min_grid_spacing_um(grid.diameter_um, dpi))) {
        throw LayoutError("spacing_um", "must exceed diameter + 4 px (" +
                                            std::to_string(min_grid_spacing_um(grid.diameter_um, dpi)) +
                                            " um) so dilated neighbours stay apart");
    }
    std::vector<SynthDrop> drops;
    if (grid.count == 0) return drops;

    const auto cols = static_cast<int>(std::floor(card_width_um / grid.spacing_um));
    if (cols < 1) throw LayoutError("spacing_um", "not a single column fits on the card");
    const int rows = (grid.count + cols - 1) / cols;
    if (rows * grid.spacing_um > card_height_um) {
        throw LayoutError("count", std::to_string(grid.count) + " drops do not fit on the card");
    }

    const double px_per_um = dpi / kMicrometersPerInch;
    const auto snap = [&](double um, double phase) {
        const double px = um * px_per_um;
        return (std::floor(px) + phase) / px_per_um;
    };
    const double r = grid.diameter_um / 2.0;
    drops.reserve(static_cast<std::size_t>(grid.count));
    for (int i = 0; i < grid.count; ++i) {
        SynthDrop d{(i % cols + 0.5) * grid.spacing_um, (i / cols + 0.5) * grid.spacing_um,
                    grid.diameter_um};
        if (grid.phase) {
            d.center_x_um = snap(d.center_x_um, grid.phase->x);
            d.center_y_um = snap(d.center_y_um, grid.phase->y);
        }
        if (d.center_x_um - r < 0.0 || d.center_x_um + r > card_width_um ||
            d.center_y_um - r < 0.0 || d.center_y_um + r > card_height_um) {
            throw LayoutError("count", "grid drop " + std::to_string(i) + " crosses the card edge");
        }
        drops.push_back(d);
    }
    return drops;
}

std::vector<SynthDrop> overlap_pair(double diameter_um, double center_distance_um,
                                    double mid_x_um, double mid_y_um) {
    if (!(diameter_um > 0.0)) throw LayoutError("diameter_um", "must be positive");
    if (!(center_distance_um >= 0.0)) throw LayoutError("center_distance_um", "must be >= 0");
    const double half = center_distance_um / 2.0;
    return {SynthDrop{mid_x_um - half, mid_y_um, diameter_um},
            SynthDrop{mid_x_um + half, mid_y_um, diameter_um}};
}

SynthSpec coverage_card(double diameter_um, double spacing_um, int cols, int rows, double dpi) {
    if (cols < 1 || rows < 1) throw LayoutError("count", "need at least one row and column");
    SynthSpec spec;
    spec.card_width_um = cols * spacing_um;
    spec.card_height_um = rows * spacing_um;
    spec.dpi = dpi;
    spec.drops = grid_layout(GridLayout{diameter_um, cols * rows, spacing_um, std::nullopt},
                             spec.card_width_um, spec.card_height_um, dpi);
    return spec;
}

SynthSpec control_card(double dpi, int drops_per_band) {
    static constexpr double kBands[] = {50.0, 100.0, 250.0, 500.0, 1000.0};
    SynthSpec spec;
    spec.dpi = dpi;
    spec.card_width_um = 0.0;
    double y = 0.0;
    std::vector<std::pair<double, double>> rows;  // (diameter, band top)
    for (double d : kBands) {
        const double spacing = std::max(2.0 * d, min_grid_spacing_um(d, dpi) + 1.0);
        spec.card_width_um = std::max(spec.card_width_um, drops_per_band * spacing);
        rows.emplace_back(d, y);
        y += spacing;
    }
    spec.card_height_um = y;
    for (auto [d, top] : rows) {
        const double spacing = std::max(2.0 * d, min_grid_spacing_um(d, dpi) + 1.0);
        for (int i = 0; i < drops_per_band; ++i) {
            spec.drops.push_back(SynthDrop{(i + 0.5) * spacing, top + spacing / 2.0, d});
        }
    }
    return spec;
}

}  // namespace spraycard
