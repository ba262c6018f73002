#include "relmap/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace relmap {

RasterImage::RasterImage(int width, int height)
    : red_(width, height), green_(width, height), blue_(width, height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("RasterImage: dimensions must be >= 1");
    }
}

RasterImage::RasterImage(Plane r, Plane g, Plane b)
    : red_(std::move(r)), green_(std::move(g)), blue_(std::move(b)) {
    if (red_.width < 1 || red_.height < 1) {
        throw std::invalid_argument("RasterImage: dimensions must be >= 1");
    }
    if (green_.width != red_.width || green_.height != red_.height ||
        blue_.width != red_.width || blue_.height != red_.height) {
        throw std::invalid_argument("RasterImage: planes must share dimensions");
    }
}

void RasterImage::set_pixel(int x, int y, float r, float g, float b) {
    red_.at(x, y) = r;
    green_.at(x, y) = g;
    blue_.at(x, y) = b;
}

std::string channel_name(ColorChannel c) {
    switch (c) {
        case ColorChannel::Red: return "red";
        case ColorChannel::Green: return "green";
        case ColorChannel::Blue: return "blue";
        case ColorChannel::Grey: return "grey";
        case ColorChannel::Opp1: return "opp1";
        case ColorChannel::Opp2: return "opp2";
    }
    return "?";
}

ColorChannel channel_from_name(const std::string& name) {
    if (name == "red") return ColorChannel::Red;
    if (name == "green") return ColorChannel::Green;
    if (name == "blue") return ColorChannel::Blue;
    if (name == "grey" || name == "gray") return ColorChannel::Grey;
    if (name == "opp1") return ColorChannel::Opp1;
    if (name == "opp2") return ColorChannel::Opp2;
    throw std::invalid_argument("unknown color channel: " + name);
}

Plane color_transform(const RasterImage& img, ColorChannel channel) {
    switch (channel) {
        case ColorChannel::Red: return img.red();
        case ColorChannel::Green: return img.green();
        case ColorChannel::Blue: return img.blue();
        default: break;
    }
    Plane out(img.width(), img.height());
    const auto& r = img.red().values;
    const auto& g = img.green().values;
    const auto& b = img.blue().values;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        switch (channel) {
            case ColorChannel::Grey: out.values[i] = (r[i] + g[i] + b[i]) / 3.0f; break;
            case ColorChannel::Opp1: out.values[i] = (r[i] - g[i] + 1.0f) / 2.0f; break;
            case ColorChannel::Opp2: out.values[i] = (r[i] + g[i] - 2.0f * b[i] + 2.0f) / 4.0f; break;
            default: break;
        }
    }
    return out;
}

std::vector<Plane> color_transform(const RasterImage& img,
                                   const std::vector<ColorChannel>& channels) {
    std::vector<Plane> planes;
    planes.reserve(channels.size());
    for (ColorChannel c : channels) planes.push_back(color_transform(img, c));
    return planes;
}

RasterImage to_grayscale(const RasterImage& img) {
    Plane grey = color_transform(img, ColorChannel::Grey);
    return RasterImage(grey, grey, grey);
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

RasterImage read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open PNG for reading: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng error while reading " + path.string());
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit RGB.
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    std::vector<png_byte> row(png_get_rowbytes(png, info));
    RasterImage img(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            img.set_pixel(static_cast<int>(x), static_cast<int>(y),
                          row[3 * x + 0] / 255.0f,
                          row[3 * x + 1] / 255.0f,
                          row[3 * x + 2] / 255.0f);
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open PNG for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng error while writing " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    auto to_byte = [](float v) {
        float c = std::clamp(v, 0.0f, 1.0f);
        return static_cast<png_byte>(c * 255.0f + 0.5f);
    };
    std::vector<png_byte> row(static_cast<std::size_t>(img.width()) * 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            row[3 * x + 0] = to_byte(img.red().at(x, y));
            row[3 * x + 1] = to_byte(img.green().at(x, y));
            row[3 * x + 2] = to_byte(img.blue().at(x, y));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_raster(const std::filesystem::path& path, const Plane& plane) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open raster for writing: " + path.string());
    const char magic[4] = {'R', 'R', 'A', 'S'};
    std::uint32_t w = static_cast<std::uint32_t>(plane.width);
    std::uint32_t h = static_cast<std::uint32_t>(plane.height);
    if (std::fwrite(magic, 1, 4, fp.get()) != 4 ||
        std::fwrite(&w, 4, 1, fp.get()) != 1 ||
        std::fwrite(&h, 4, 1, fp.get()) != 1 ||
        std::fwrite(plane.values.data(), 4, plane.values.size(), fp.get()) != plane.values.size()) {
        throw std::runtime_error("short write on raster: " + path.string());
    }
}

Plane read_raster(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open raster for reading: " + path.string());
    char magic[4];
    std::uint32_t w = 0, h = 0;
    if (std::fread(magic, 1, 4, fp.get()) != 4 || std::memcmp(magic, "RRAS", 4) != 0) {
        throw std::runtime_error("bad raster magic in " + path.string());
    }
    if (std::fread(&w, 4, 1, fp.get()) != 1 || std::fread(&h, 4, 1, fp.get()) != 1) {
        throw std::runtime_error("truncated raster header in " + path.string());
    }
    Plane plane(static_cast<int>(w), static_cast<int>(h));
    if (std::fread(plane.values.data(), 4, plane.values.size(), fp.get()) != plane.values.size()) {
        throw std::runtime_error("truncated raster payload in " + path.string());
    }
    return plane;
}

} // namespace relmap
