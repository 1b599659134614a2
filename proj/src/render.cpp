#include "charanim/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace charanim {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Raster render_mesh_frame(const Raster& image, const CharacterMesh& mesh,
                         const std::vector<Vec2>& deformed, int canvas_width, int canvas_height,
                         Rgba background) {
    if (deformed.size() != mesh.vertices.size())
        throw std::runtime_error("render_mesh_frame: position count mismatch");
    Raster out(canvas_width, canvas_height, background);

    for (const auto& t : mesh.triangles) {
        const Vec2 &a = deformed[t[0]], &b = deformed[t[1]], &c = deformed[t[2]];
        const Vec2 &ra = mesh.vertices[t[0]], &rb = mesh.vertices[t[1]], &rc = mesh.vertices[t[2]];
        const double area = cross2(b - a, c - a);
        if (std::abs(area) < 1e-12) continue;

        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x(), b.x(), c.x()}))));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y(), b.y(), c.y()}))));
        const int x1 = std::min(canvas_width - 1,
                                static_cast<int>(std::ceil(std::max({a.x(), b.x(), c.x()}))));
        const int y1 = std::min(canvas_height - 1,
                                static_cast<int>(std::ceil(std::max({a.y(), b.y(), c.y()}))));

        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const Vec2 p(x + 0.5, y + 0.5);
                const double w0 = cross2(b - p, c - p) / area;
                const double w1 = cross2(c - p, a - p) / area;
                const double w2 = 1.0 - w0 - w1;
                const double eps = -1e-9;
                if (w0 < eps || w1 < eps || w2 < eps) continue;
                const Vec2 src = w0 * ra + w1 * rb + w2 * rc;
                const int sx = std::clamp(static_cast<int>(std::floor(src.x())), 0, image.width - 1);
                const int sy = std::clamp(static_cast<int>(std::floor(src.y())), 0, image.height - 1);
                out.at(x, y) = image.at(sx, sy);
            }
    }
    return out;
}

}  // namespace charanim
