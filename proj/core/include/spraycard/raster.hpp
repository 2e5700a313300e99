#pragma once

// Pixel-level transforms feeding the segmenter: grayscale conversion,
// fixed-threshold binarization, square-SE dilation/erosion and the
// dilated-minus-eroded contour ring.
//
// All functions are pure; the inputs are never modified.

#include "spraycard/image.hpp"

namespace spraycard {

inline constexpr double kDefaultThreshold = 0.35;

/// Full square structuring element of odd side. Side 3 grows or shrinks a
/// shape by one pixel per side.
class StructuringElement {
public:
    explicit StructuringElement(int side = 3);

    int side() const noexcept { return side_; }
    int radius() const noexcept { return side_ / 2; }

private:
    int side_;
};

/// Luma: 0.299 R + 0.587 G + 0.114 B, clamped to [0,1].
GrayImage to_grayscale(const RgbImage& img);

/// Replicates each gray value into all three channels.
RgbImage to_rgb(const GrayImage& img);

/// 1 where gray < threshold (dark dye = drop), 0 otherwise. The
/// comparison is strict and carried out at the storage precision of the
/// gray image. Throws ParameterError unless threshold is in (0,1).
BinaryImage binarize(const GrayImage& img, double threshold = kDefaultThreshold);

/// Out-of-bounds neighbours count as background.
BinaryImage dilate(const BinaryImage& img, const StructuringElement& se = StructuringElement{});

/// Out-of-bounds neighbours count as background, so shapes touching the
/// border are eroded there as well.
BinaryImage erode(const BinaryImage& img, const StructuringElement& se = StructuringElement{});

/// dilated AND NOT eroded. Throws DimensionError on size mismatch.
BinaryImage contour_mask(const BinaryImage& dilated, const BinaryImage& eroded);

BinaryImage logical_not(const BinaryImage& img);

std::size_t count_foreground(const BinaryImage& img) noexcept;

}  // namespace spraycard
