#pragma once

#include <Eigen/Core>
#include <vector>

#include "charanim/image.hpp"
#include "charanim/taxonomy.hpp"

namespace charanim {

using Vec3 = Eigen::Vector3d;

enum class ShadeClass : uint8_t { Background = 0, Shadow = 1, Unlit = 2, Highlight = 3 };

/// Three-level shading classification of the character foreground for one
/// light position in the normalized [0,1]^3 viewport (z > 0, light in
/// front of the character).
struct ShadingMap {
    int width = 0;
    int height = 0;
    std::vector<ShadeClass> classes;
    Vec3 light = Vec3::Zero();

    ShadeClass at(int x, int y) const { return classes[static_cast<size_t>(y) * width + x]; }
};

/// Pseudo-3D inflation of the foreground: height is the normalized
/// Euclidean distance to the silhouette raised to the power 0.5, zero
/// outside the foreground. Normals come from central differences with the
/// z-component completing unit length.
struct HeightField {
    int width = 0;
    int height = 0;
    std::vector<double> h;        // in [0, 1], 0 on non-foreground pixels
    std::vector<Vec3> normals;    // unit where foreground, zero elsewhere
    std::vector<uint8_t> fg;      // foreground flags
    double radius = 1.0;          // normalization radius in pixels

    double height_at(int x, int y) const { return h[static_cast<size_t>(y) * width + x]; }
};

struct ShadeOptions {
    double t_shadow = 0.25;
    double t_highlight = 0.8;
    double strength = 1.0;  // blend strength in [0, 1]
};

HeightField estimate_heightfield(const BinaryMask& fg);

ShadingMap shade_quantize(const HeightField& hf, const Vec3& light, const ShadeOptions& options);

/// Darkens shadow pixels by (1 - 0.35 * strength) and lightens highlight
/// pixels toward white by 0.35 * strength; unlit and background unchanged.
Raster blend_shading(const Raster& image, const ShadingMap& map, double strength);

IndexedImage encode_shading_map(const ShadingMap& map);

}  // namespace charanim
