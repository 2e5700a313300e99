#include "spraycard/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "spraycard/error.hpp"

namespace spraycard {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw ImageIoError("cannot open " + path.string());
    return f;
}

std::uint8_t quantize(float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
    auto* where = static_cast<std::string*>(png_get_error_ptr(png));
    if (where) *where = msg;
    png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

// libpng reports errors through longjmp, so only trivially destructible
// state may live between setjmp and the libpng calls in these functions.
struct RawRgb {
    png_bytep data = nullptr;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
};

bool decode_png(std::FILE* fp, RawRgb& out, std::string& error) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
    if (!png) {
        error = "out of memory";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    png_bytep* volatile rows = nullptr;
    if (!info || setjmp(png_jmpbuf(png))) {
        delete[] out.data;
        out.data = nullptr;
        delete[] rows;
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        return false;
    }

    png_init_io(png, fp);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    if (w == 0 || h == 0 || static_cast<unsigned long long>(w) * h > (1ull << 30) ||
        png_get_rowbytes(png, info) != static_cast<png_size_t>(w) * 3) {
        png_error(png, "unsupported PNG layout");
    }

    out.width = w;
    out.height = h;
    out.data = new png_byte[static_cast<std::size_t>(w) * h * 3];
    rows = new png_bytep[h];
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = out.data + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows);
    png_read_end(png, nullptr);

    delete[] rows;
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

RgbImage read_png(const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "rb");
    RawRgb raw;
    std::string error;
    if (!decode_png(fp.get(), raw, error)) {
        throw ImageIoError("cannot decode PNG " + path.string() + ": " + error);
    }
    std::unique_ptr<png_byte[]> owned(raw.data);
    RgbImage img(static_cast<int>(raw.width), static_cast<int>(raw.height));
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = Rgb{owned[3 * i] / 255.0f, owned[3 * i + 1] / 255.0f, owned[3 * i + 2] / 255.0f};
    }
    return img;
}

class PgmReader {
public:
    explicit PgmReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

    std::string token() {
        skip_space_and_comments();
        std::string t;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) t.push_back(static_cast<char>(bytes_[pos_++]));
        return t;
    }

    long number(const char* what) {
        const std::string t = token();
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }) ||
            t.size() > 9) {
            throw ImageIoError(std::string("bad PGM ") + what);
        }
        return std::stol(t);
    }

    // Exactly one whitespace byte separates the header from P5 raster data.
    void skip_single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw ImageIoError("bad PGM header");
        ++pos_;
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    const unsigned char* cursor() const noexcept { return bytes_.data() + pos_; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::vector<unsigned char> bytes_;
    std::size_t pos_ = 0;
};

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

GrayImage read_pgm(const std::filesystem::path& path) {
    PgmReader r(slurp(path));
    const std::string magic = r.token();
    if (magic != "P5" && magic != "P2") throw ImageIoError("not a PGM file: " + path.string());
    const long w = r.number("width");
    const long h = r.number("height");
    const long maxval = r.number("maxval");
    if (w < 1 || h < 1 || w * h > (1L << 30)) throw ImageIoError("bad PGM dimensions in " + path.string());
    if (maxval < 1 || maxval > 255) {
        throw ImageIoError("only 8-bit PGM is supported (maxval <= 255) in " + path.string());
    }

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    auto px = img.pixels();
    const auto scale = static_cast<float>(maxval);
    if (magic == "P5") {
        r.skip_single_space();
        if (r.remaining() < px.size()) throw ImageIoError("truncated PGM raster in " + path.string());
        const unsigned char* data = r.cursor();
        for (std::size_t i = 0; i < px.size(); ++i) {
            if (data[i] > maxval) throw ImageIoError("PGM sample exceeds maxval in " + path.string());
            px[i] = data[i] / scale;
        }
    } else {
        for (std::size_t i = 0; i < px.size(); ++i) {
            const long v = r.number("sample");
            if (v > maxval) throw ImageIoError("PGM sample exceeds maxval in " + path.string());
            px[i] = static_cast<float>(v) / scale;
        }
    }
    return img;
}

bool encode_png(std::FILE* fp, const std::vector<png_byte>& buffer, png_uint_32 w, png_uint_32 h,
                std::string& error) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
    if (!png) {
        error = "out of memory";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    png_bytep* volatile rows = nullptr;
    if (!info || setjmp(png_jmpbuf(png))) {
        delete[] rows;
        png_destroy_write_struct(&png, info ? &info : nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    rows = new png_bytep[h];
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = const_cast<png_bytep>(buffer.data() + static_cast<std::size_t>(y) * w * 3);
    }
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    delete[] rows;
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

ImageFormat detect_format(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open " + path.string());
    std::array<unsigned char, 8> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 8 && png_sig_cmp(head.data(), 0, 8) == 0) return ImageFormat::png;
    if (got >= 2 && head[0] == 'P' && (head[1] == '5' || head[1] == '2')) return ImageFormat::pgm;
    throw ImageIoError("unrecognized image format (expected PNG or PGM): " + path.string());
}

DecodedImage read_image(const std::filesystem::path& path) {
    switch (detect_format(path)) {
        case ImageFormat::png:
            return read_png(path);
        case ImageFormat::pgm:
            return read_pgm(path);
    }
    throw ImageIoError("unreachable");
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    std::vector<png_byte> buffer(img.size() * 3);
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        buffer[3 * i] = quantize(px[i].r);
        buffer[3 * i + 1] = quantize(px[i].g);
        buffer[3 * i + 2] = quantize(px[i].b);
    }
    FilePtr fp = open_file(path, "wb");
    std::string error;
    if (!encode_png(fp.get(), buffer, static_cast<png_uint_32>(img.width()),
                    static_cast<png_uint_32>(img.height()), error)) {
        throw ImageIoError("cannot encode PNG " + path.string() + ": " + error);
    }
    if (std::fflush(fp.get()) != 0) throw ImageIoError("write failed for " + path.string());
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot open " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    for (const float v : img.pixels()) out.put(static_cast<char>(quantize(v)));
    if (!out) throw ImageIoError("write failed for " + path.string());
}

}  // namespace spraycard
