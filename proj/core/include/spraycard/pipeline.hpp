#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spraycard/image_io.hpp"
#include "spraycard/metrics.hpp"
#include "spraycard/raster.hpp"
#include "spraycard/segmentation.hpp"

namespace spraycard {

struct AnalysisConfig {
    double threshold = kDefaultThreshold;
    int se_side = 3;
    std::int64_t min_area_px = kDefaultMinAreaPx;
    double card_width_um = 0.0;
    double card_height_um = 0.0;
    CalibrationParams calibration;
};

/// Every intermediate raster of the five segmentation steps.
struct Segmentation {
    GrayImage gray;
    BinaryImage binary;
    BinaryImage dilated;
    BinaryImage eroded;
    BinaryImage contour;
    std::vector<Contour> contours;
    LabelMap labels;
    std::vector<DropSegment> segments;
};

/// Binarize, dilate, erode, ring, label rings, flood. The flood is seeded
/// with the drop-side half of every ring (`core_markers`) and with the
/// complement of the dilated image as background.
Segmentation segment_drops(GrayImage gray, const AnalysisConfig& config);

struct Analysis {
    Segmentation segmentation;
    CardSpec card;
    SprayReport report;
};

/// Full pipeline. RGB input goes through grayscale conversion first.
/// Throws ParameterError for invalid config and DistortedCaptureError when
/// the card size does not match the image aspect ratio.
Analysis analyze(const DecodedImage& image, const AnalysisConfig& config);
Analysis analyze(const RgbImage& image, const AnalysisConfig& config);

/// The original image with each kept segment painted in its own color.
/// Colors are distinct for distinct segments.
RgbImage render_overlay(const DecodedImage& original, const LabelMap& labels,
                        const std::vector<DropSegment>& segments);

/// Color used for the i-th kept segment (0-based).
Rgb segment_color(std::size_t index) noexcept;

}  // namespace spraycard
