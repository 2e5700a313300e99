#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spraycard/image.hpp"

namespace spraycard {

/// Per-pixel segment ids. 0 is background, k >= 1 is segment k and
/// `kRidge` marks pixels where two segments meet.
class LabelMap {
public:
    using label_type = std::int32_t;
    static constexpr label_type kBackground = 0;
    static constexpr label_type kRidge = -1;

    LabelMap(int width, int height) : labels_(width, height, kBackground) {}
    explicit LabelMap(Raster<label_type> labels) : labels_(std::move(labels)) {}

    int width() const noexcept { return labels_.width(); }
    int height() const noexcept { return labels_.height(); }
    label_type operator()(int x, int y) const noexcept { return labels_(x, y); }
    label_type& operator()(int x, int y) noexcept { return labels_(x, y); }
    const Raster<label_type>& raster() const noexcept { return labels_; }

    /// Largest positive label present, 0 when there are no segments.
    label_type max_label() const noexcept;

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    Raster<label_type> labels_;
};

/// One 8-connected component of a contour mask.
struct Contour {
    std::int32_t label = 0;
    std::vector<Point> pixels;
    BoundingBox box;
};

/// Seed region for the flood. Unlike a Contour the pixel set need not be
/// connected.
struct Marker {
    std::int32_t label = 0;
    std::vector<Point> pixels;
};

struct DropSegment {
    std::int32_t label = 0;
    std::int64_t area_px = 0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    BoundingBox box;

    int width_px() const noexcept { return box.width(); }
    int height_px() const noexcept { return box.height(); }
};

inline constexpr std::int64_t kDefaultMinAreaPx = 2;

/// Labels the 8-connected foreground components of `mask` with a
/// two-pass union-find scan. Components are numbered 1..K in raster order
/// of their first pixel; pixel lists are in raster order.
std::vector<Contour> find_contours(const BinaryImage& mask);

/// Marker k = the whole ring of contour k.
std::vector<Marker> ring_markers(std::span<const Contour> contours);

/// Marker k = the pixels of contour k that are drop material in `binary`,
/// i.e. the inner half of each ring. Every ring produced by
/// dilate/erode/contour_mask contains at least one such pixel.
std::vector<Marker> core_markers(std::span<const Contour> contours, const BinaryImage& binary);

/// Marker-controlled priority flood over the raw gray relief.
///
/// Seeds: every pixel of marker k gets label k; every pixel where
/// `support` is 0 is background. Pixels claimed by two different markers
/// become ridge. Unseeded pixels are visited in ascending (gray,
/// background-before-drop, insertion order) and take the label of the
/// neighbour that queued them, unless their 4-neighbourhood already holds
/// two different positive labels, in which case they become ridge. The
/// middle key means a plateau shared by the card and a drop goes to the
/// card. Unreached pixels end up as background.
///
/// Throws DimensionError if `support` and `gray` differ in size or a marker
/// pixel lies outside the image.
LabelMap watershed(const GrayImage& gray, std::span<const Marker> markers,
                   const BinaryImage& support);

/// One DropSegment per positive label with at least `min_area_px` pixels,
/// ordered by label. Ridge pixels belong to no segment.
std::vector<DropSegment> extract_segments(const LabelMap& labels,
                                          std::int64_t min_area_px = kDefaultMinAreaPx);

}  // namespace spraycard
