#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spraycard/segmentation.hpp"

namespace spraycard {

inline constexpr double kMicrometersPerInch = 25400.0;

/// Coverage above this percentage makes counts and diameters unreliable
/// because neighbouring drops merge.
inline constexpr double kReliableCoverageLimitPct = 20.0;

/// Largest tolerated relative disagreement between the horizontal and the
/// vertical um/px scale.
inline constexpr double kMaxAspectMismatch = 0.02;

/// Physical card size next to its pixel size in the image.
struct CardSpec {
    double card_width_um = 0.0;
    double card_height_um = 0.0;
    int image_width_px = 0;
    int image_height_px = 0;

    double card_area_um2() const noexcept { return card_width_um * card_height_um; }
};

/// Power-law diameter correction d' = a * d^b.
struct CalibrationParams {
    static constexpr double kDefaultA = 0.2192733;
    static constexpr double kDefaultB = 1.227941;

    double a = kDefaultA;
    double b = kDefaultB;
    bool enabled = false;
};

struct DropMeasure {
    std::int32_t label = 0;
    std::int64_t area_px = 0;
    double area_um2 = 0.0;
    double diameter_um = 0.0;
    double calibrated_diameter_um = 0.0;
    double centroid_x_px = 0.0;
    double centroid_y_px = 0.0;
};

struct SprayReport {
    std::int64_t drop_count = 0;
    double um_per_px = 0.0;
    double card_area_cm2 = 0.0;
    double total_drop_area_um2 = 0.0;
    double density_per_cm2 = 0.0;
    double coverage_density_pct = 0.0;
    /// Percentiles of the reported (calibrated when enabled) diameters.
    /// Absent when no drops were found.
    std::optional<double> d10_um;
    std::optional<double> vmd_um;
    std::optional<double> d90_um;
    std::optional<double> drs;
    bool reliability_warning = false;
    bool no_drops = true;
    std::vector<DropMeasure> drops;
};

/// Validates `spec` and returns card_width_um / image_width_px.
/// Throws ParameterError for non-positive fields and DistortedCaptureError
/// when the two axes disagree by more than 2%.
double px_to_um_ratio(const CardSpec& spec);

/// Equivalent-circle diameter of a pixel area, scaled to micrometres.
double diameter_from_area_um(double area_px, double um_per_px);
double segment_diameter_um(const DropSegment& seg, double um_per_px);

double calibrate_diameter(double diameter_um, const CalibrationParams& params);

/// Linear interpolation between closest ranks: rank = p (n - 1) + 1 on the
/// ascending sample. Throws ParameterError on an empty sample or p outside
/// [0,1].
double percentile(std::span<const double> values, double p);

SprayReport compute_report(std::span<const DropSegment> segments, const CardSpec& spec,
                           const CalibrationParams& cal = {});

/// Whole pixels needed to span `diameter_um` at `dpi`; 0 means the length
/// cannot be represented. The raw length is first taken to one decimal, and
/// anything under a full pixel at that precision is unrepresentable;
/// otherwise it rounds to the nearest pixel. Throws ParameterError for
/// non-positive inputs.
std::int64_t pixels_for(double diameter_um, double dpi);

}  // namespace spraycard
