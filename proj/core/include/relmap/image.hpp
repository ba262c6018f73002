#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace relmap {

/// Single image plane, row-major float values.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    Plane() = default;
    Plane(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

/// RGB raster with all channel values in [0,1]. 8-bit sources are divided by
/// 255 at load time. Grayscale content is stored with r == g == b.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height);
    RasterImage(Plane r, Plane g, Plane b);

    int width() const { return red_.width; }
    int height() const { return red_.height; }

    const Plane& red() const { return red_; }
    const Plane& green() const { return green_; }
    const Plane& blue() const { return blue_; }
    Plane& red() { return red_; }
    Plane& green() { return green_; }
    Plane& blue() { return blue_; }

    void set_pixel(int x, int y, float r, float g, float b);

private:
    Plane red_, green_, blue_;
};

enum class ColorChannel { Red, Green, Blue, Grey, Opp1, Opp2 };

std::string channel_name(ColorChannel c);
ColorChannel channel_from_name(const std::string& name);

/// Pixel-wise channel transform. grey = (r+g+b)/3, opp1 = (r-g+1)/2,
/// opp2 = (r+g-2b+2)/4; raw channels pass through. Outputs stay in [0,1].
Plane color_transform(const RasterImage& img, ColorChannel channel);

std::vector<Plane> color_transform(const RasterImage& img,
                                   const std::vector<ColorChannel>& channels);

/// Grayscale image from the grey channel, replicated to r=g=b.
RasterImage to_grayscale(const RasterImage& img);

RasterImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RasterImage& img);

/// Flat f32 raster: magic "RRAS", u32 width, u32 height, then row-major
/// little-endian f32 values. Used for raw heatmaps and ground-truth masks.
void write_raster(const std::filesystem::path& path, const Plane& plane);
Plane read_raster(const std::filesystem::path& path);

} // namespace relmap
