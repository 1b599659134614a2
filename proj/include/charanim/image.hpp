#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace charanim {

struct Rgba {
    uint8_t r = 0, g = 0, b = 0, a = 255;
    bool operator==(const Rgba&) const = default;
};

/// 8-bit RGBA raster, row-major, y-down.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<Rgba> pixels;

    Raster() = default;
    Raster(int w, int h, Rgba fill = {255, 255, 255, 255})
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    Rgba& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Rgba& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Palette-indexed raster as stored in an indexed PNG.
struct IndexedImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> indices;           // row-major
    std::vector<Rgba> palette;

    uint8_t& at(int x, int y) { return indices[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return indices[static_cast<size_t>(y) * width + x]; }
};

Raster read_png(const std::string& path);
void write_png(const std::string& path, const Raster& img);

IndexedImage read_indexed_png(const std::string& path);
void write_indexed_png(const std::string& path, const IndexedImage& img);

/// Alpha-composites src over dst in place (premultiplication-free "over").
void composite_over(Raster& dst, const Raster& src);

}  // namespace charanim
