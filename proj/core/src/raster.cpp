#include "spraycard/raster.hpp"

#include <algorithm>
#include <string>

namespace spraycard {

StructuringElement::StructuringElement(int side) : side_(side) {
    if (side < 1 || side % 2 == 0) {
        throw ParameterError("structuring element side must be odd and >= 1, got " +
                             std::to_string(side));
    }
}

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Rgb& p = src[i];
        const double y = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
        dst[i] = static_cast<float>(std::clamp(y, 0.0, 1.0));
    }
    return out;
}

RgbImage to_rgb(const GrayImage& img) {
    RgbImage out(img.width(), img.height());
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = Rgb{src[i], src[i], src[i]};
    }
    return out;
}

BinaryImage binarize(const GrayImage& img, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ParameterError("threshold must lie in (0,1), got " + std::to_string(threshold));
    }
    const auto t = static_cast<float>(threshold);
    BinaryImage out(img.width(), img.height());
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] < t ? 1 : 0;
    }
    return out;
}

namespace {

// Sliding-window count of foreground pixels along one line. A pixel is set
// when the count reaches `need`; out-of-range taps contribute zero.
void window_line(const std::uint8_t* src, std::size_t src_stride, std::uint8_t* dst,
                 std::size_t dst_stride, int n, int radius, int need) {
    int count = 0;
    for (int i = 0; i < std::min(radius, n); ++i) count += src[i * src_stride];
    for (int x = 0; x < n; ++x) {
        const int add = x + radius;
        if (add < n) count += src[add * src_stride];
        const int drop = x - radius - 1;
        if (drop >= 0) count -= src[drop * src_stride];
        dst[x * dst_stride] = count >= need ? 1 : 0;
    }
}

// Square SE is separable: one horizontal then one vertical pass.
BinaryImage square_filter(const BinaryImage& img, const StructuringElement& se, bool dilation) {
    const int w = img.width();
    const int h = img.height();
    const int r = se.radius();
    const int need = dilation ? 1 : se.side();
    if (r == 0) return img;

    BinaryImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        window_line(&img(0, y), 1, &tmp(0, y), 1, w, r, need);
    }
    BinaryImage out(w, h);
    const auto stride = static_cast<std::size_t>(w);
    for (int x = 0; x < w; ++x) {
        window_line(&tmp(x, 0), stride, &out(x, 0), stride, h, r, need);
    }
    return out;
}

}  // namespace

BinaryImage dilate(const BinaryImage& img, const StructuringElement& se) {
    return square_filter(img, se, true);
}

BinaryImage erode(const BinaryImage& img, const StructuringElement& se) {
    return square_filter(img, se, false);
}

BinaryImage contour_mask(const BinaryImage& dilated, const BinaryImage& eroded) {
    require_same_size(dilated, eroded, "contour_mask");
    BinaryImage out(dilated.width(), dilated.height());
    const auto d = dilated.pixels();
    const auto e = eroded.pixels();
    auto o = out.pixels();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = (d[i] != 0 && e[i] == 0) ? 1 : 0;
    }
    return out;
}

BinaryImage logical_not(const BinaryImage& img) {
    BinaryImage out(img.width(), img.height());
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 0 : 1;
    return out;
}

std::size_t count_foreground(const BinaryImage& img) noexcept {
    const auto px = img.pixels();
    return static_cast<std::size_t>(std::count_if(px.begin(), px.end(), [](auto v) { return v != 0; }));
}

}  // namespace spraycard
