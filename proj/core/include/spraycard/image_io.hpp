#pragma once

#include <filesystem>
#include <variant>

#include "spraycard/image.hpp"

namespace spraycard {

/// What came off disk. PGM input is already grayscale and skips the color
/// conversion step.
using DecodedImage = std::variant<RgbImage, GrayImage>;

enum class ImageFormat { png, pgm };

/// Sniffs the magic bytes: PNG signature or P2/P5 PGM header.
/// Throws ImageIoError for anything else.
ImageFormat detect_format(const std::filesystem::path& path);

/// 8-bit PNG (gray, RGB, palette; alpha is dropped, 16-bit is reduced to 8)
/// or 8-bit PGM (P5 binary or P2 ASCII, maxval <= 255). Channels are
/// normalized to [0,1] by dividing by 255 (or by maxval for PGM).
DecodedImage read_image(const std::filesystem::path& path);

/// Quantizes to 8 bits per channel with round-to-nearest.
void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Binary P5, maxval 255.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace spraycard
