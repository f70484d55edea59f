#pragma once

#include <png.h>

#include <cstdio>
#include <csetjmp>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlr {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit RGB pixels, row-major, 3 samples per pixel.
struct Rgb8Image {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> samples;
};

/// 8-bit grayscale pixels, row-major.
struct Gray8Image {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> samples;
};

namespace detail {

struct FileHandle {
    std::FILE* f = nullptr;
    explicit FileHandle(std::FILE* f_) : f(f_) {}
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
    ~FileHandle() {
        if (f) std::fclose(f);
    }
};

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Reads an 8-bit PNG of the required color type. No silent conversions:
// anything else (alpha in particular) is rejected with a clear error.
inline std::vector<unsigned char> read_png(const std::string& path, int required_color_type,
                                           int channels, int& width, int& height) {
    FileHandle fh(std::fopen(path.c_str(), "rb"));
    if (!fh.f) throw IoError("cannot open for reading: " + path);

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fh.f) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw IoError("not a PNG file: " + path);

    PngReadGuard g;
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng: failed to allocate read struct");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng: failed to allocate info struct");

    std::vector<unsigned char> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(g.png))) throw IoError("PNG decode failed: " + path);

    png_init_io(g.png, fh.f);
    png_set_sig_bytes(g.png, 8);
    png_read_info(g.png, g.info);

    const int color = png_get_color_type(g.png, g.info);
    const int depth = png_get_bit_depth(g.png, g.info);
    if (color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_GRAY_ALPHA ||
        png_get_valid(g.png, g.info, PNG_INFO_tRNS))
        throw IoError("alpha channel not supported: " + path);
    if (color != required_color_type || depth != 8)
        throw IoError((required_color_type == PNG_COLOR_TYPE_RGB
                           ? std::string("expected an 8-bit RGB PNG: ")
                           : std::string("expected an 8-bit grayscale PNG: ")) +
                      path);

    width = int(png_get_image_width(g.png, g.info));
    height = int(png_get_image_height(g.png, g.info));
    data.resize(std::size_t(width) * std::size_t(height) * std::size_t(channels));
    rows.resize(std::size_t(height));
    for (int i = 0; i < height; ++i)
        rows[std::size_t(i)] = data.data() + std::size_t(i) * std::size_t(width) * channels;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);
    return data;
}

inline void write_png(const std::string& path, const unsigned char* samples, int width,
                      int height, int color_type, int channels) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("write_png: empty image");
    FileHandle fh(std::fopen(path.c_str(), "wb"));
    if (!fh.f) throw IoError("cannot open for writing: " + path);

    PngWriteGuard g;
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng: failed to allocate write struct");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng: failed to allocate info struct");

    std::vector<png_bytep> rows(static_cast<std::size_t>(height), nullptr);
    for (int i = 0; i < height; ++i)
        rows[std::size_t(i)] =
            const_cast<png_bytep>(samples + std::size_t(i) * std::size_t(width) * channels);
    if (setjmp(png_jmpbuf(g.png))) throw IoError("PNG encode failed: " + path);

    png_init_io(g.png, fh.f);
    png_set_IHDR(g.png, g.info, png_uint_32(width), png_uint_32(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

}  // namespace detail

inline Rgb8Image read_rgb8_png(const std::string& path) {
    Rgb8Image img;
    img.samples = detail::read_png(path, PNG_COLOR_TYPE_RGB, 3, img.width, img.height);
    return img;
}

inline Gray8Image read_gray8_png(const std::string& path) {
    Gray8Image img;
    img.samples = detail::read_png(path, PNG_COLOR_TYPE_GRAY, 1, img.width, img.height);
    return img;
}

inline void write_rgb8_png(const std::string& path, const Rgb8Image& img) {
    if (img.samples.size() != std::size_t(img.width) * std::size_t(img.height) * 3)
        throw std::invalid_argument("write_rgb8_png: sample buffer size mismatch");
    detail::write_png(path, img.samples.data(), img.width, img.height, PNG_COLOR_TYPE_RGB, 3);
}

inline void write_gray8_png(const std::string& path, const Gray8Image& img) {
    if (img.samples.size() != std::size_t(img.width) * std::size_t(img.height))
        throw std::invalid_argument("write_gray8_png: sample buffer size mismatch");
    detail::write_png(path, img.samples.data(), img.width, img.height, PNG_COLOR_TYPE_GRAY, 1);
}

}  // namespace qlr
