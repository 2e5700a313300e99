#include "spraycard/pipeline.hpp"

#include <string>
#include <type_traits>
#include <utility>

namespace spraycard {

Segmentation segment_drops(GrayImage gray, const AnalysisConfig& config) {
    if (config.min_area_px < 1) {
        throw ParameterError("min_area_px must be >= 1, got " + std::to_string(config.min_area_px));
    }
    const StructuringElement se(config.se_side);

    BinaryImage binary = binarize(gray, config.threshold);
    BinaryImage dilated = dilate(binary, se);
    BinaryImage eroded = erode(binary, se);
    BinaryImage contour = contour_mask(dilated, eroded);
    std::vector<Contour> contours = find_contours(contour);

    const std::vector<Marker> markers = core_markers(contours, binary);
    LabelMap labels = watershed(gray, markers, dilated);
    std::vector<DropSegment> segments = extract_segments(labels, config.min_area_px);

    return Segmentation{std::move(gray),    std::move(binary),   std::move(dilated),
                        std::move(eroded),  std::move(contour),  std::move(contours),
                        std::move(labels),  std::move(segments)};
}

namespace {

GrayImage gray_of(const DecodedImage& image) {
    return std::visit(
        [](const auto& img) -> GrayImage {
            using T = std::decay_t<decltype(img)>;
            if constexpr (std::is_same_v<T, RgbImage>) {
                return to_grayscale(img);
            } else {
                return img;
            }
        },
        image);
}

int width_of(const DecodedImage& image) {
    return std::visit([](const auto& img) { return img.width(); }, image);
}

int height_of(const DecodedImage& image) {
    return std::visit([](const auto& img) { return img.height(); }, image);
}

}  // namespace

Analysis analyze(const DecodedImage& image, const AnalysisConfig& config) {
    const CardSpec card{config.card_width_um, config.card_height_um, width_of(image),
                        height_of(image)};
    px_to_um_ratio(card);
    if (config.calibration.enabled && !(config.calibration.a > 0.0 && config.calibration.b > 0.0)) {
        throw ParameterError("calibration parameters a and b must be positive");
    }

    Segmentation seg = segment_drops(gray_of(image), config);
    SprayReport report = compute_report(seg.segments, card, config.calibration);
    return Analysis{std::move(seg), card, std::move(report)};
}

Analysis analyze(const RgbImage& image, const AnalysisConfig& config) {
    return analyze(DecodedImage{image}, config);
}

Rgb segment_color(std::size_t index) noexcept {
    // Multiplication by an odd constant is a bijection on 24-bit integers.
    const auto code = static_cast<std::uint32_t>(((index + 1) * 0x9E3779u) & 0xFFFFFFu);
    return Rgb{static_cast<float>((code >> 16) & 0xFF) / 255.0f,
               static_cast<float>((code >> 8) & 0xFF) / 255.0f,
               static_cast<float>(code & 0xFF) / 255.0f};
}

RgbImage render_overlay(const DecodedImage& original, const LabelMap& labels,
                        const std::vector<DropSegment>& segments) {
    RgbImage out = std::visit(
        [](const auto& img) -> RgbImage {
            using T = std::decay_t<decltype(img)>;
            if constexpr (std::is_same_v<T, RgbImage>) {
                return img;
            } else {
                return to_rgb(img);
            }
        },
        original);
    require_same_size(out, labels, "render_overlay");

    std::vector<std::int32_t> slot(static_cast<std::size_t>(labels.max_label()) + 1, -1);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        slot[static_cast<std::size_t>(segments[i].label)] = static_cast<std::int32_t>(i);
    }
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const auto l = labels(x, y);
            if (l <= 0) continue;
            const std::int32_t s = slot[static_cast<std::size_t>(l)];
            if (s >= 0) out(x, y) = segment_color(static_cast<std::size_t>(s));
        }
    }
    return out;
}

}  // namespace spraycard
