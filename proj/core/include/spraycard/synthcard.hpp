#pragma once

// Synthetic water-sensitive cards with exactly known drops. Used as the
// ground-truth oracle for the segmentation pipeline.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spraycard/image.hpp"

namespace spraycard {

struct SynthDrop {
    double center_x_um = 0.0;
    double center_y_um = 0.0;
    double diameter_um = 0.0;
};

struct SynthSpec {
    double card_width_um = 0.0;
    double card_height_um = 0.0;
    double dpi = 600.0;
    std::vector<SynthDrop> drops;
    double background_intensity = 0.85;
    double drop_intensity = 0.10;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;

    double um_per_px() const noexcept;
    int image_width_px() const noexcept;
    int image_height_px() const noexcept;
};

struct TruthDrop {
    double diameter_um = 0.0;
    /// Pixels whose centre lies inside this drop's disk.
    std::int64_t area_px = 0;
    double center_x_px = 0.0;
    double center_y_px = 0.0;
};

struct GroundTruth {
    std::vector<TruthDrop> drops;
};

struct SynthCard {
    RgbImage image;
    GroundTruth truth;
};

/// Throws LayoutError naming the offending field.
void validate(const SynthSpec& spec);

/// Point-sampled rendering: a pixel takes the drop intensity iff its centre
/// is inside at least one drop disk. Gaussian noise, when requested, is
/// drawn from a seeded generator and clamped to [0,1]. Output size is
/// round(card_um * dpi / 25400) per axis.
SynthCard render(const SynthSpec& spec);

/// Sub-pixel position a drop centre is moved to inside its pixel, in
/// pixel units from the pixel's top-left corner.
struct PixelPhase {
    double x = 0.5;
    double y = 0.5;
};

struct GridLayout {
    double diameter_um = 0.0;
    int count = 0;
    double spacing_um = 0.0;
    /// When set, every centre is snapped to this phase of the pixel it
    /// falls in, so all drops rasterize identically.
    std::optional<PixelPhase> phase;
};

/// Smallest admissible grid spacing: the drop plus four pixels, so the
/// one-pixel dilations of neighbours never touch.
double min_grid_spacing_um(double diameter_um, double dpi);

/// Row-major grid of identical drops with centres at ((c + 0.5) s, (r + 0.5) s).
/// Throws LayoutError when the spacing is below min_grid_spacing_um or the
/// grid does not fit on the card.
std::vector<SynthDrop> grid_layout(const GridLayout& grid, double card_width_um,
                                   double card_height_um, double dpi);

/// Two equal drops on a horizontal line through (mid_x_um, mid_y_um), with
/// centres `center_distance_um` apart.
std::vector<SynthDrop> overlap_pair(double diameter_um, double center_distance_um,
                                    double mid_x_um, double mid_y_um);

/// Card sized to exactly `cols` x `rows` grid cells, giving a coverage of
/// pi d^2 / (4 s^2) for drops of diameter d at spacing s.
SynthSpec coverage_card(double diameter_um, double spacing_um, int cols, int rows, double dpi);

/// Bands of 50/100/250/500/1000 um drops, one band per row group, like a
/// commercial control card.
SynthSpec control_card(double dpi, int drops_per_band = 10);

}  // namespace spraycard
