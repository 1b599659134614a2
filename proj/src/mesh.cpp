#include "charanim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace charanim {

namespace {

// Incircle test on coordinates pre-scaled to integers; exact in 80-bit
// long double for images up to ~4k pixels. Positive means d is strictly
// inside the circumcircle of ccw triangle (a, b, c).
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const long double adx = 2.0L * (a.x() - d.x()), ady = 2.0L * (a.y() - d.y());
    const long double bdx = 2.0L * (b.x() - d.x()), bdy = 2.0L * (b.y() - d.y());
    const long double cdx = 2.0L * (c.x() - d.x()), cdy = 2.0L * (c.y() - d.y());
    const long double al = adx * adx + ady * ady;
    const long double bl = bdx * bdx + bdy * bdy;
    const long double cl = cdx * cdx + cdy * cdy;
    return adx * (bdy * cl - cdy * bl) - ady * (bdx * cl - cdx * bl) +
           al * (bdx * cdy - cdx * bdy);
}

long double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (static_cast<long double>(b.x()) - a.x()) * (static_cast<long double>(c.y()) - a.y()) -
           (static_cast<long double>(b.y()) - a.y()) * (static_cast<long double>(c.x()) - a.x());
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
    const int n = static_cast<int>(points.size());
    std::vector<std::array<int, 3>> result;
    if (n < 3) return result;

    double lo_x = points[0].x(), hi_x = lo_x, lo_y = points[0].y(), hi_y = lo_y;
    for (const Vec2& p : points) {
        lo_x = std::min(lo_x, p.x());
        hi_x = std::max(hi_x, p.x());
        lo_y = std::min(lo_y, p.y());
        hi_y = std::max(hi_y, p.y());
    }
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
    const double cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;

    // Super-triangle corners carry irrational-looking offsets so they never
    // participate in exact degeneracies with lattice input points.
    std::vector<Vec2> pts = points;
    pts.push_back(Vec2(cx - 17.03711 * span, cy - 9.62241 * span));
    pts.push_back(Vec2(cx + 17.21531 * span, cy - 9.80021 * span));
    pts.push_back(Vec2(cx + 0.08901, cy + 19.72647 * span));

    struct Tri {
        int v[3];
        bool alive = true;
    };
    std::vector<Tri> tris;
    tris.push_back({{n, n + 1, n + 2}, true});
    if (orient(pts[n], pts[n + 1], pts[n + 2]) < 0) std::swap(tris[0].v[1], tris[0].v[2]);

    std::vector<int> bad;
    std::map<std::pair<int, int>, int> edge_count;
    for (int ip = 0; ip < n; ++ip) {
        const Vec2& p = pts[ip];
        bad.clear();
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive) continue;
            if (incircle(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]], p) > 0)
                bad.push_back(t);
        }
        if (bad.empty()) continue;  // duplicate of an existing point

        edge_count.clear();
        for (int t : bad) {
            for (int e = 0; e < 3; ++e) {
                int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
                auto key = std::minmax(a, b);
                edge_count[{key.first, key.second}]++;
            }
            tris[t].alive = false;
        }
        for (int t : bad) {
            for (int e = 0; e < 3; ++e) {
                int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
                auto key = std::minmax(a, b);
                if (edge_count[{key.first, key.second}] == 1)
                    tris.push_back({{a, b, ip}, true});
            }
        }
    }

    for (const Tri& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
        std::array<int, 3> tri{t.v[0], t.v[1], t.v[2]};
        if (orient(pts[tri[0]], pts[tri[1]], pts[tri[2]]) < 0) std::swap(tri[1], tri[2]);
        result.push_back(tri);
    }
    return result;
}

bool mask_contains_point(const BinaryMask& fg, const Vec2& p) {
    // Membership in the union of closed pixel squares [x,x+1]x[y,y+1]:
    // a point on a shared border belongs to every adjacent square.
    const double fx = std::floor(p.x()), fy = std::floor(p.y());
    const bool on_vx = p.x() == fx;
    const bool on_vy = p.y() == fy;
    for (int dy = on_vy ? -1 : 0; dy <= 0; ++dy)
        for (int dx = on_vx ? -1 : 0; dx <= 0; ++dx) {
            const int x = static_cast<int>(fx) + dx, y = static_cast<int>(fy) + dy;
            if (fg.in_bounds(x, y) && fg.at(x, y)) return true;
        }
    return false;
}

void CharacterMesh::rebuild_edges() {
    std::set<std::array<int, 2>> uniq;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            uniq.insert({std::min(a, b), std::max(a, b)});
        }
    edges.assign(uniq.begin(), uniq.end());
}

CharacterMesh triangulate_foreground(const BinaryMask& fg, double target_spacing) {
    if (fg.popcount() == 0)
        throw std::runtime_error("triangulate_foreground: empty foreground");
    if (target_spacing < 1.0)
        throw std::runtime_error("triangulate_foreground: spacing must be >= 1 pixel");

    auto is_fg = [&](int x, int y) { return fg.in_bounds(x, y) && fg.at(x, y) != 0; };

    // Boundary vertices: lattice corners of pixel edges separating
    // foreground from background (the 0.5-isocontour of the mask).
    std::set<std::pair<int, int>> corner_set;
    for (int y = 0; y < fg.height; ++y)
        for (int x = 0; x < fg.width; ++x) {
            if (!is_fg(x, y)) continue;
            if (!is_fg(x - 1, y)) { corner_set.insert({x, y}); corner_set.insert({x, y + 1}); }
            if (!is_fg(x + 1, y)) { corner_set.insert({x + 1, y}); corner_set.insert({x + 1, y + 1}); }
            if (!is_fg(x, y - 1)) { corner_set.insert({x, y}); corner_set.insert({x + 1, y}); }
            if (!is_fg(x, y + 1)) { corner_set.insert({x, y + 1}); corner_set.insert({x + 1, y + 1}); }
        }

    std::vector<Vec2> points;
    points.reserve(corner_set.size());
    for (auto [x, y] : corner_set) points.emplace_back(x, y);

    // Interior vertices: pixel centers on a target_spacing grid, kept clear
    // of the boundary so they do not crowd the contour vertices.
    const int step = std::max(1, static_cast<int>(std::lround(target_spacing)));
    for (int y = step / 2; y < fg.height; y += step)
        for (int x = step / 2; x < fg.width; x += step) {
            if (!is_fg(x, y)) continue;
            if (!is_fg(x - 1, y) || !is_fg(x + 1, y) || !is_fg(x, y - 1) || !is_fg(x, y + 1))
                continue;
            points.emplace_back(x + 0.5, y + 0.5);
        }

    CharacterMesh mesh;
    auto tris = delaunay(points);

    // Keep triangles that lie inside the mask: centroid plus all three edge
    // midpoints must fall in the pixel-square union.
    std::vector<std::array<int, 3>> kept;
    for (const auto& t : tris) {
        const Vec2 &a = points[t[0]], &b = points[t[1]], &c = points[t[2]];
        if (!mask_contains_point(fg, (a + b + c) / 3.0)) continue;
        if (!mask_contains_point(fg, (a + b) / 2.0)) continue;
        if (!mask_contains_point(fg, (b + c) / 2.0)) continue;
        if (!mask_contains_point(fg, (c + a) / 2.0)) continue;
        kept.push_back(t);
    }
    if (kept.empty()) throw std::runtime_error("triangulate_foreground: no triangles survive");

    // Drop unreferenced vertices.
    std::vector<int> remap(points.size(), -1);
    for (const auto& t : kept)
        for (int v : t)
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back(points[v]);
            }
    for (auto& t : kept) mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    mesh.rebuild_edges();
    return mesh;
}

void assign_vertex_labels(CharacterMesh& mesh, const LabelMask& mask,
                          const LabelTaxonomy& taxonomy) {
    const ClassId bg = taxonomy.background_id();
    mesh.vertex_labels.assign(mesh.vertices.size(), bg);

    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec2& v = mesh.vertices[i];
        const int cx = std::clamp(static_cast<int>(std::floor(v.x())), 0, mask.width - 1);
        const int cy = std::clamp(static_cast<int>(std::floor(v.y())), 0, mask.height - 1);

        double best = std::numeric_limits<double>::infinity();
        ClassId best_label = bg;
        // Expanding square rings; once a candidate exists, rings beyond
        // ceil(sqrt(best)) + 1 cannot improve it.
        const int max_r = std::max(mask.width, mask.height);
        for (int r = 0; r <= max_r; ++r) {
            if (best < std::numeric_limits<double>::infinity() &&
                static_cast<double>(r - 1) * (r - 1) > best)
                break;
            for (int y = cy - r; y <= cy + r; ++y) {
                for (int x = cx - r; x <= cx + r; ++x) {
                    if (std::max(std::abs(x - cx), std::abs(y - cy)) != r) continue;
                    if (!mask.in_bounds(x, y)) continue;
                    const ClassId l = mask.at(x, y);
                    if (l == bg) continue;
                    const double dx = (x + 0.5) - v.x(), dy = (y + 0.5) - v.y();
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < best || (d2 == best && l < best_label)) {
                        best = d2;
                        best_label = l;
                    }
                }
            }
        }
        if (best_label == bg)
            throw std::runtime_error("assign_vertex_labels: mask has no foreground pixels");
        mesh.vertex_labels[i] = best_label;
    }
}

void dump_mesh(const CharacterMesh& mesh, const std::string& obj_path,
               const std::string& label_path) {
    std::ofstream obj(obj_path);
    if (!obj) throw std::runtime_error("cannot write " + obj_path);
    for (const Vec2& v : mesh.vertices) obj << "v " << v.x() << " " << v.y() << " 0\n";
    for (const auto& t : mesh.triangles)
        obj << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";

    std::ofstream lab(label_path);
    if (!lab) throw std::runtime_error("cannot write " + label_path);
    for (ClassId l : mesh.vertex_labels) lab << static_cast<int>(l) << "\n";
}

}  // namespace charanim
