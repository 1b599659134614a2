#include "charanim/shade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "charanim/edt.hpp"

namespace charanim {

HeightField estimate_heightfield(const BinaryMask& fg) {
    if (fg.popcount() == 0) throw std::runtime_error("estimate_heightfield: empty foreground");

    HeightField hf;
    hf.width = fg.width;
    hf.height = fg.height;
    hf.fg = fg.values;
    hf.h.assign(fg.values.size(), 0.0);
    hf.normals.assign(fg.values.size(), Vec3::Zero());

    const std::vector<double> sq = squared_distance_transform(fg, true);
    double max_sq = 0;
    for (double d : sq) max_sq = std::max(max_sq, d);
    hf.radius = std::sqrt(max_sq);
    for (size_t i = 0; i < sq.size(); ++i)
        if (fg.values[i]) hf.h[i] = std::sqrt(std::sqrt(sq[i] / max_sq));  // (d/dmax)^0.5

    // Normals of the inflated surface z = h * radius: central differences
    // of the height, z-component from the unit-length constraint (the
    // in-plane part saturates where the slope exceeds 1).
    auto h_at = [&](int x, int y) -> double {
        if (!fg.in_bounds(x, y)) return 0.0;
        return hf.h[static_cast<size_t>(y) * fg.width + x];
    };
    for (int y = 0; y < fg.height; ++y)
        for (int x = 0; x < fg.width; ++x) {
            if (!fg.at(x, y)) continue;
            const double gx = (h_at(x + 1, y) - h_at(x - 1, y)) / 2.0 * hf.radius;
            const double gy = (h_at(x, y + 1) - h_at(x, y - 1)) / 2.0 * hf.radius;
            const double g2 = gx * gx + gy * gy;
            Vec3 n;
            if (g2 >= 1.0) {
                const double g = std::sqrt(g2);
                n = Vec3(-gx / g, -gy / g, 0.0);
            } else {
                n = Vec3(-gx, -gy, std::sqrt(1.0 - g2));
            }
            hf.normals[static_cast<size_t>(y) * fg.width + x] = n;
        }
    return hf;
}

ShadingMap shade_quantize(const HeightField& hf, const Vec3& light, const ShadeOptions& options) {
    if (!(options.t_shadow < options.t_highlight) || options.t_shadow < -1 ||
        options.t_highlight > 1)
        throw std::runtime_error("shade_quantize: invalid thresholds");
    if (!(light.z() > 0))
        throw std::runtime_error("shade_quantize: light must be in front of the character (z > 0)");
    for (int i = 0; i < 3; ++i)
        if (light[i] < 0 || light[i] > 1)
            throw std::runtime_error("shade_quantize: light outside the unit viewport");

    ShadingMap map;
    map.width = hf.width;
    map.height = hf.height;
    map.light = light;
    map.classes.assign(hf.h.size(), ShadeClass::Background);

    // Everything in pixel units so that mirrored masks with mirrored lights
    // produce exactly mirrored maps.
    const double scale = std::max(hf.width, hf.height);
    const Vec3 light_px(light.x() * hf.width, light.y() * hf.height, light.z() * scale);

    for (int y = 0; y < hf.height; ++y)
        for (int x = 0; x < hf.width; ++x) {
            const size_t i = static_cast<size_t>(y) * hf.width + x;
            if (!hf.fg[i]) continue;

            const Vec3& n = hf.normals[i];
            const Vec3 surface(x + 0.5, y + 0.5, hf.h[i] * hf.radius);
            const Vec3 dir = (light_px - surface).normalized();
            const double d = n.dot(dir);
            if (d < options.t_shadow)
                map.classes[i] = ShadeClass::Shadow;
            else if (d >= options.t_highlight)
                map.classes[i] = ShadeClass::Highlight;
            else
                map.classes[i] = ShadeClass::Unlit;
        }
    return map;
}

Raster blend_shading(const Raster& image, const ShadingMap& map, double strength) {
    if (image.width != map.width || image.height != map.height)
        throw std::runtime_error("blend_shading: dimension mismatch");
    if (strength < 0 || strength > 1)
        throw std::runtime_error("blend_shading: strength must be in [0, 1]");

    Raster out = image;
    const double k = 0.35 * strength;
    for (size_t i = 0; i < out.pixels.size(); ++i) {
        Rgba& p = out.pixels[i];
        switch (map.classes[i]) {
            case ShadeClass::Shadow:
                p.r = static_cast<uint8_t>(std::lround(p.r * (1.0 - k)));
                p.g = static_cast<uint8_t>(std::lround(p.g * (1.0 - k)));
                p.b = static_cast<uint8_t>(std::lround(p.b * (1.0 - k)));
                break;
            case ShadeClass::Highlight:
                p.r = static_cast<uint8_t>(std::lround(p.r + (255.0 - p.r) * k));
                p.g = static_cast<uint8_t>(std::lround(p.g + (255.0 - p.g) * k));
                p.b = static_cast<uint8_t>(std::lround(p.b + (255.0 - p.b) * k));
                break;
            default:
                break;
        }
    }
    return out;
}

IndexedImage encode_shading_map(const ShadingMap& map) {
    IndexedImage img;
    img.width = map.width;
    img.height = map.height;
    img.indices.resize(map.classes.size());
    for (size_t i = 0; i < map.classes.size(); ++i)
        img.indices[i] = static_cast<uint8_t>(map.classes[i]);
    img.palette = {Rgba{255, 255, 255, 255}, Rgba{60, 60, 110, 255}, Rgba{160, 160, 160, 255},
                   Rgba{255, 240, 160, 255}};
    return img;
}

}  // namespace charanim
