#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spraycard/error.hpp"

namespace spraycard {

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Inclusive pixel bounding box.
struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;
    int y1 = -1;

    int width() const noexcept { return x1 - x0 + 1; }
    int height() const noexcept { return y1 - y0 + 1; }
    bool empty() const noexcept { return x1 < x0 || y1 < y0; }

    void extend(int x, int y) noexcept {
        if (empty()) {
            x0 = x1 = x;
            y0 = y1 = y;
            return;
        }
        if (x < x0) x0 = x;
        if (x > x1) x1 = x;
        if (y < y0) y0 = y;
        if (y > y1) y1 = y;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Dense row-major raster. Width and height are always >= 1.
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw DimensionError("raster dimensions must be >= 1, got " + std::to_string(width) +
                                 "x" + std::to_string(height));
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> row(int y) noexcept {
        return std::span<T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
    }
    std::span<const T> row(int y) const noexcept {
        return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }

    bool same_size(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_;
    int height_;
    std::vector<T> data_;
};

/// Linear RGB triple, each channel in [0,1].
struct Rgb {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Raster<Rgb>;
using GrayImage = Raster<float>;

/// 1 = drop material, 0 = card background.
using BinaryImage = Raster<std::uint8_t>;

template <typename A, typename B>
void require_same_size(const A& a, const B& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionError(std::string(what) + ": size mismatch " + std::to_string(a.width()) +
                             "x" + std::to_string(a.height()) + " vs " +
                             std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
}

}  // namespace spraycard
