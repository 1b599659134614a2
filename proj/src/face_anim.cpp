#include "charanim/face_anim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "charanim/edt.hpp"

namespace charanim {

namespace {

std::vector<std::vector<std::pair<int, int>>> class_components(const LabelMask& mask,
                                                               ClassId cls) {
    std::vector<std::vector<std::pair<int, int>>> components;
    std::vector<bool> seen(mask.labels.size(), false);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(x, y) != cls || seen[y * mask.width + x]) continue;
            components.emplace_back();
            auto& comp = components.back();
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[y * mask.width + x] = true;
            while (!queue.empty()) {
                auto [px, py] = queue.front();
                queue.pop_front();
                comp.push_back({px, py});
                static constexpr int dx[] = {1, -1, 0, 0};
                static constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = px + dx[k], ny = py + dy[k];
                    if (!mask.in_bounds(nx, ny) || mask.at(nx, ny) != cls) continue;
                    if (seen[ny * mask.width + nx]) continue;
                    seen[ny * mask.width + nx] = true;
                    queue.push_back({nx, ny});
                }
            }
        }
    return components;
}

bool is_contour(const LabelMask& mask, ClassId cls, int x, int y) {
    static constexpr int dx[] = {1, -1, 0, 0};
    static constexpr int dy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (!mask.in_bounds(nx, ny) || mask.at(nx, ny) != cls) return true;
    }
    return false;
}

}  // namespace

int count_instances(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                    const std::string& region) {
    return static_cast<int>(class_components(mask, taxonomy.require(region)).size());
}

SalientPoints extract_salient_points(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                                     const std::string& region, int instance) {
    const ClassId cls = taxonomy.require(region);
    auto components = class_components(mask, cls);
    if (components.empty())
        throw std::runtime_error("extract_salient_points: no '" + region + "' pixels in mask");
    if (instance < 0 || instance >= static_cast<int>(components.size()))
        throw std::runtime_error("extract_salient_points: instance " + std::to_string(instance) +
                                 " out of range for '" + region + "'");
    const auto& comp = components[instance];

    Vec2 centroid = Vec2::Zero();
    for (auto [x, y] : comp) centroid += Vec2(x, y);
    centroid /= static_cast<double>(comp.size());

    std::vector<std::pair<int, int>> contour;
    for (auto [x, y] : comp)
        if (is_contour(mask, cls, x, y)) contour.push_back({x, y});

    // Extremal pick with the off-axis tie broken toward the centroid, then
    // toward the smaller coordinate.
    auto pick = [&](auto extreme_coord, auto tie_coord, bool maximize, double tie_center) {
        std::pair<int, int> best = contour.front();
        for (auto p : contour) {
            const int ev = extreme_coord(p), bv = extreme_coord(best);
            if ((maximize && ev > bv) || (!maximize && ev < bv)) {
                best = p;
            } else if (ev == bv) {
                const double dt = std::abs(tie_coord(p) - tie_center);
                const double db = std::abs(tie_coord(best) - tie_center);
                if (dt < db || (dt == db && tie_coord(p) < tie_coord(best))) best = p;
            }
        }
        return Vec2(best.first, best.second);
    };
    auto px = [](std::pair<int, int> p) { return p.first; };
    auto py = [](std::pair<int, int> p) { return p.second; };

    SalientPoints sp;
    sp.region = region;
    sp.centroid = centroid;
    sp.pixels = comp;
    sp.top = pick(py, px, false, centroid.x());
    sp.bottom = pick(py, px, true, centroid.x());
    sp.left = pick(px, py, false, centroid.y());
    sp.right = pick(px, py, true, centroid.y());
    return sp;
}

namespace {

double tps_kernel(double r2) { return r2 > 0 ? r2 * std::log(r2) : 0.0; }

}  // namespace

TpsWarp tps_fit(const std::vector<std::pair<Vec2, Vec2>>& correspondences, double lambda) {
    // Collapse exact-duplicate sources; a duplicate with a conflicting
    // target makes the interpolation problem singular.
    std::vector<std::pair<Vec2, Vec2>> cp;
    for (const auto& [src, dst] : correspondences) {
        bool dup = false;
        for (const auto& [s2, d2] : cp) {
            if ((src - s2).norm() == 0) {
                if ((dst - d2).norm() > 0 && lambda == 0)
                    throw std::runtime_error("tps_fit: duplicate source with conflicting target");
                dup = true;
                break;
            }
        }
        if (!dup) cp.push_back({src, dst});
    }
    const int n = static_cast<int>(cp.size());
    if (n < 3) throw std::runtime_error("tps_fit: need at least 3 distinct control points");

    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            system(i, j) = tps_kernel((cp[i].first - cp[j].first).squaredNorm());
        system(i, i) += lambda;
        system(i, n) = system(n, i) = 1.0;
        system(i, n + 1) = system(n + 1, i) = cp[i].first.x();
        system(i, n + 2) = system(n + 2, i) = cp[i].first.y();
        rhs(i, 0) = cp[i].second.x();
        rhs(i, 1) = cp[i].second.y();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
        throw std::runtime_error("tps_fit: singular system (collinear or duplicate sources)");
    Eigen::MatrixXd sol = lu.solve(rhs);

    TpsWarp warp;
    for (int i = 0; i < n; ++i) {
        warp.sources_.push_back(cp[i].first);
        warp.weights_.emplace_back(sol(i, 0), sol(i, 1));
    }
    warp.affine_ << sol(n + 1, 0), sol(n + 2, 0), sol(n, 0),
                    sol(n + 1, 1), sol(n + 2, 1), sol(n, 1);
    return warp;
}

Vec2 TpsWarp::operator()(const Vec2& p) const {
    Vec2 out(affine_(0, 0) * p.x() + affine_(0, 1) * p.y() + affine_(0, 2),
             affine_(1, 0) * p.x() + affine_(1, 1) * p.y() + affine_(1, 2));
    for (size_t i = 0; i < sources_.size(); ++i)
        out += weights_[i] * tps_kernel((p - sources_[i]).squaredNorm());
    return out;
}

double TpsWarp::bending_energy() const {
    // w^T K w per output coordinate; zero exactly when the map is affine.
    double total = 0;
    for (size_t i = 0; i < sources_.size(); ++i)
        for (size_t j = 0; j < sources_.size(); ++j) {
            const double k = tps_kernel((sources_[i] - sources_[j]).squaredNorm());
            total += k * weights_[i].dot(weights_[j]);
        }
    return total;
}

std::string to_string(PresetCategory c) { return c == PresetCategory::Eye ? "eye" : "mouth"; }

PresetCategory parse_preset_category(const std::string& s) {
    if (s == "eye") return PresetCategory::Eye;
    if (s == "mouth") return PresetCategory::Mouth;
    throw std::runtime_error("unknown preset category: " + s);
}

const Preset& PresetLibrary::get(const std::string& name) const {
    auto it = presets.find(name);
    if (it == presets.end()) throw std::runtime_error("no preset named '" + name + "'");
    return it->second;
}

PresetLibrary load_preset_library(const std::string& dir, const LabelTaxonomy& taxonomy) {
    namespace fs = std::filesystem;
    const fs::path manifest_path = fs::path(dir) / "manifest.txt";
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open preset manifest: " + manifest_path.string());

    PresetLibrary lib;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind) || kind[0] == '#') continue;
        if (kind != "preset")
            throw std::runtime_error("unknown manifest record '" + kind + "'");
        std::string name, category, file;
        if (!(ss >> name >> category >> file))
            throw std::runtime_error("bad manifest line: " + line);

        Preset preset;
        preset.name = name;
        preset.category = parse_preset_category(category);
        preset.patch = load_mask((fs::path(dir) / file).string(), taxonomy);
        preset.canonical =
            extract_salient_points(preset.patch, taxonomy, preset.category_class(), 0);

        double coords[8];
        bool have_quad = true;
        for (double& c : coords)
            if (!(ss >> c)) {
                have_quad = false;
                break;
            }
        if (have_quad) {
            const Vec2 quad[4] = {{coords[0], coords[1]},
                                  {coords[2], coords[3]},
                                  {coords[4], coords[5]},
                                  {coords[6], coords[7]}};
            const std::vector<Vec2> computed = preset.canonical.quad();
            if (quad[0].y() != computed[0].y() || quad[1].y() != computed[1].y() ||
                quad[2].x() != computed[2].x() || quad[3].x() != computed[3].x())
                throw std::runtime_error("manifest quadruple for preset '" + name +
                                         "' is not extremal on its patch");
            preset.canonical.top = quad[0];
            preset.canonical.bottom = quad[1];
            preset.canonical.left = quad[2];
            preset.canonical.right = quad[3];
        }
        lib.presets[name] = std::move(preset);
    }
    if (lib.presets.empty())
        throw std::runtime_error("preset manifest is empty: " + manifest_path.string());
    return lib;
}

namespace {

struct WarpedPatch {
    std::vector<std::pair<std::pair<int, int>, ClassId>> pixels;  // (x, y) -> label
};

WarpedPatch warp_preset(const LabelMask& face_mask, const LabelTaxonomy& taxonomy,
                        const Preset& preset, const SalientPoints& target) {
    if (target.region != preset.category_class())
        throw std::runtime_error("apply_preset: preset category '" + preset.category_class() +
                                 "' does not match target region '" + target.region + "'");

    std::vector<std::pair<Vec2, Vec2>> fwd;
    const std::vector<Vec2> src = preset.canonical.quad();
    const std::vector<Vec2> dst = target.quad();
    for (int i = 0; i < 4; ++i) fwd.push_back({src[i], dst[i]});
    // Centroid as fifth control point; keeps the fit well-posed when the
    // four extremes are nearly collinear (a line mouth).
    fwd.push_back({preset.canonical.centroid, target.centroid});

    std::vector<std::pair<Vec2, Vec2>> rev;
    for (const auto& [s, d] : fwd) rev.push_back({d, s});
    const TpsWarp forward = tps_fit(fwd);
    const TpsWarp inverse = tps_fit(rev);

    const ClassId bg = taxonomy.background_id();
    double x0 = 1e30, y0 = 1e30, x1 = -1e30, y1 = -1e30;
    for (int y = 0; y < preset.patch.height; ++y)
        for (int x = 0; x < preset.patch.width; ++x) {
            if (preset.patch.at(x, y) == bg) continue;
            const Vec2 w = forward(Vec2(x + 0.5, y + 0.5));
            x0 = std::min(x0, w.x());
            y0 = std::min(y0, w.y());
            x1 = std::max(x1, w.x());
            y1 = std::max(y1, w.y());
        }

    WarpedPatch out;
    if (x1 < x0) return out;  // empty patch
    const int bx0 = std::max(0, static_cast<int>(std::floor(x0)) - 2);
    const int by0 = std::max(0, static_cast<int>(std::floor(y0)) - 2);
    const int bx1 = std::min(face_mask.width - 1, static_cast<int>(std::ceil(x1)) + 2);
    const int by1 = std::min(face_mask.height - 1, static_cast<int>(std::ceil(y1)) + 2);
    for (int y = by0; y <= by1; ++y)
        for (int x = bx0; x <= bx1; ++x) {
            const Vec2 s = inverse(Vec2(x + 0.5, y + 0.5));
            const int sx = static_cast<int>(std::floor(s.x()));
            const int sy = static_cast<int>(std::floor(s.y()));
            if (!preset.patch.in_bounds(sx, sy)) continue;
            const ClassId label = preset.patch.at(sx, sy);
            if (label != bg) out.pixels.push_back({{x, y}, label});
        }
    return out;
}

}  // namespace

LabelMask apply_preset(const LabelMask& face_mask, const LabelTaxonomy& taxonomy,
                       const Preset& preset, const SalientPoints& target) {
    const WarpedPatch warped = warp_preset(face_mask, taxonomy, preset, target);
    LabelMask out = face_mask;
    const ClassId bg = taxonomy.background_id();
    for (auto [x, y] : target.pixels) out.at(x, y) = bg;
    for (const auto& [p, label] : warped.pixels) out.at(p.first, p.second) = label;
    return out;
}

namespace {

struct ColorMode {
    Rgba color{0, 0, 0, 255};
    bool valid = false;
};

ColorMode mode_color(const Raster& image, const std::vector<std::pair<int, int>>& pixels) {
    std::map<uint32_t, std::pair<int, Eigen::Vector3d>> buckets;  // quantized -> (count, sum)
    for (auto [x, y] : pixels) {
        if (!image.in_bounds(x, y)) continue;
        const Rgba c = image.at(x, y);
        if (c.a == 0) continue;
        const uint32_t key = (c.r >> 5 << 10) | (c.g >> 5 << 5) | (c.b >> 5);
        auto& [count, sum] = buckets[key];
        count++;
        sum += Eigen::Vector3d(c.r, c.g, c.b);
    }
    ColorMode mode;
    int best = 0;
    for (const auto& [key, cs] : buckets)
        if (cs.first > best) {
            best = cs.first;
            const Eigen::Vector3d avg = cs.second / cs.first;
            mode.color = Rgba{static_cast<uint8_t>(avg.x() + 0.5),
                              static_cast<uint8_t>(avg.y() + 0.5),
                              static_cast<uint8_t>(avg.z() + 0.5), 255};
            mode.valid = true;
        }
    return mode;
}

struct RegionGeometry {
    BinaryMask mask;
    std::vector<double> sq_dist;  // to outside the region
    int x0 = 0, y0 = 0;           // bbox offset of mask within the image
};

RegionGeometry region_geometry(int img_w, int img_h,
                               const std::vector<std::pair<int, int>>& pixels) {
    RegionGeometry g;
    int x0 = img_w, y0 = img_h, x1 = -1, y1 = -1;
    for (auto [x, y] : pixels) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
    g.x0 = x0;
    g.y0 = y0;
    g.mask = BinaryMask(x1 - x0 + 1, y1 - y0 + 1);
    for (auto [x, y] : pixels) g.mask.set(x - x0, y - y0, 1);
    g.sq_dist = squared_distance_transform(g.mask, true);
    return g;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// Region area over the area of the region with interior holes filled.
double fill_fraction(const RegionGeometry& g) {
    const int w = g.mask.width, h = g.mask.height;
    std::vector<bool> outside(static_cast<size_t>(w) * h, false);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (g.mask.at(x, y)) continue;
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
                outside[y * w + x] = true;
                queue.push_back({x, y});
            }
        }
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        static constexpr int dx[] = {1, -1, 0, 0};
        static constexpr int dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (g.mask.at(nx, ny) || outside[ny * w + nx]) continue;
            outside[ny * w + nx] = true;
            queue.push_back({nx, ny});
        }
    }
    size_t region = 0, filled = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (g.mask.at(x, y)) region++;
            if (g.mask.at(x, y) || !outside[y * w + x]) filled++;
        }
    return filled ? static_cast<double>(region) / filled : 1.0;
}

}  // namespace

Raster rasterize_preset_style(const Raster& image,
                              const std::vector<std::pair<int, int>>& original_region,
                              const std::vector<std::pair<int, int>>& new_region) {
    if (original_region.empty())
        throw std::runtime_error("rasterize_preset_style: empty original region");
    Raster out(image.width, image.height, Rgba{0, 0, 0, 0});
    if (new_region.empty()) return out;

    Rgba stroke{0, 0, 0, 255};
    double width = 2.0;
    bool filled = false;
    Rgba interior = stroke;

    if (original_region.size() >= 2) {
        const ColorMode mode = mode_color(image, original_region);
        if (mode.valid) stroke = mode.color;

        const RegionGeometry orig = region_geometry(image.width, image.height, original_region);
        std::vector<double> dists;
        for (auto [x, y] : original_region)
            dists.push_back(std::sqrt(orig.sq_dist[(y - orig.y0) * orig.mask.width + (x - orig.x0)]));
        width = std::max(2.0, 2.0 * median_of(dists));

        filled = fill_fraction(orig) > 0.6;
        if (filled) {
            std::vector<std::pair<int, int>> inner;
            for (auto [x, y] : original_region)
                if (std::sqrt(orig.sq_dist[(y - orig.y0) * orig.mask.width + (x - orig.x0)]) >
                    width / 2.0)
                    inner.push_back({x, y});
            const ColorMode inner_mode = mode_color(image, inner);
            interior = inner_mode.valid ? inner_mode.color : stroke;
        }
    }

    const RegionGeometry shape = region_geometry(image.width, image.height, new_region);
    for (auto [x, y] : new_region) {
        if (!out.in_bounds(x, y)) continue;
        const double d = std::sqrt(shape.sq_dist[(y - shape.y0) * shape.mask.width + (x - shape.x0)]);
        if (d <= std::max(1.0, width / 2.0))
            out.at(x, y) = stroke;
        else if (filled)
            out.at(x, y) = interior;
    }
    return out;
}

Raster composite_expression(const Raster& image, const LabelMask& face_mask,
                            const LabelTaxonomy& taxonomy,
                            const std::vector<ExpressionEdit>& edits) {
    if (image.width != face_mask.width || image.height != face_mask.height)
        throw std::runtime_error("composite_expression: image/mask dimension mismatch");
    Raster out = image;
    if (edits.empty()) return out;

    struct PlannedEdit {
        SalientPoints target;
        std::vector<std::pair<int, int>> new_pixels;
    };
    std::vector<PlannedEdit> planned;
    std::vector<std::pair<int, int>> cleared;
    for (const ExpressionEdit& edit : edits) {
        if (!edit.preset) throw std::runtime_error("composite_expression: null preset");
        PlannedEdit p;
        p.target = extract_salient_points(face_mask, taxonomy, edit.preset->category_class(),
                                          edit.instance);
        const WarpedPatch warped = warp_preset(face_mask, taxonomy, *edit.preset, p.target);
        for (const auto& [pix, label] : warped.pixels) p.new_pixels.push_back(pix);
        cleared.insert(cleared.end(), p.target.pixels.begin(), p.target.pixels.end());
        planned.push_back(std::move(p));
    }

    // Flat inpainting stand-in: fill removed pixels with the mode color of
    // a 3-pixel ring around them.
    std::set<std::pair<int, int>> cleared_set(cleared.begin(), cleared.end());
    std::vector<std::pair<int, int>> ring;
    for (auto [x, y] : cleared)
        for (int dy = -3; dy <= 3; ++dy)
            for (int dx = -3; dx <= 3; ++dx) {
                const std::pair<int, int> q{x + dx, y + dy};
                if (!image.in_bounds(q.first, q.second)) continue;
                if (!cleared_set.count(q)) ring.push_back(q);
            }
    const ColorMode bg_mode = mode_color(image, ring);
    const Rgba bg_color = bg_mode.valid ? bg_mode.color : Rgba{255, 255, 255, 255};
    for (auto [x, y] : cleared) out.at(x, y) = bg_color;

    for (size_t i = 0; i < planned.size(); ++i) {
        const Raster patch =
            rasterize_preset_style(image, planned[i].target.pixels, planned[i].new_pixels);
        composite_over(out, patch);
    }
    return out;
}

std::vector<PhonemeInterval> load_phoneme_track(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open phoneme track: " + path);
    std::vector<PhonemeInterval> track;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        PhonemeInterval p;
        std::string first;
        if (!(ss >> first) || first[0] == '#') continue;
        p.start = std::stod(first);
        if (!(ss >> p.end >> p.phoneme))
            throw std::runtime_error("bad phoneme row in " + path + ": " + line);
        track.push_back(p);
    }
    return track;
}

VisemeTable load_viseme_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open viseme table: " + path);
    VisemeTable table;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string phoneme, viseme;
        if (!(ss >> phoneme) || phoneme[0] == '#') continue;
        if (!(ss >> viseme)) throw std::runtime_error("bad viseme table row: " + line);
        if (phoneme == "neutral")
            table.neutral = viseme;
        else
            table.mapping[phoneme] = viseme;
    }
    return table;
}

const std::string& VisemeTrack::at_time(double t) const {
    if (entries.empty()) throw std::runtime_error("empty viseme track");
    for (const VisemeEntry& e : entries)
        if (t >= e.start && t < e.end) return e.viseme;
    return entries.back().viseme;
}

void VisemeTrack::check_invariants() const {
    if (duration == 0) {
        if (!entries.empty()) throw std::runtime_error("zero-duration track with entries");
        return;
    }
    if (entries.empty()) throw std::runtime_error("viseme track does not cover its duration");
    if (entries.front().start != 0.0 || entries.back().end != duration)
        throw std::runtime_error("viseme track does not cover [0, duration]");
    for (size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i].start < entries[i].end))
            throw std::runtime_error("empty viseme entry");
        if (i > 0 && entries[i].start != entries[i - 1].end)
            throw std::runtime_error("gap or overlap in viseme track");
        if (i > 0 && entries[i].viseme == entries[i - 1].viseme)
            throw std::runtime_error("unmerged adjacent identical visemes");
    }
}

VisemeTrack phonemes_to_visemes(const std::vector<PhonemeInterval>& phonemes, double duration,
                                const VisemeTable& table, UnknownPhonemePolicy policy) {
    if (duration < 0) throw std::runtime_error("phonemes_to_visemes: negative duration");
    double t = 0;
    VisemeTrack track;
    track.duration = duration;
    auto push = [&](double start, double end, const std::string& viseme) {
        if (!(start < end)) return;
        if (!track.entries.empty() && track.entries.back().viseme == viseme)
            track.entries.back().end = end;
        else
            track.entries.push_back({start, end, viseme});
    };
    for (const PhonemeInterval& p : phonemes) {
        if (p.start < t)
            throw std::runtime_error("phonemes_to_visemes: overlapping or unsorted intervals");
        if (p.end > duration)
            throw std::runtime_error("phonemes_to_visemes: interval past track duration");
        std::string viseme;
        auto it = table.mapping.find(p.phoneme);
        if (it != table.mapping.end()) {
            viseme = it->second;
        } else if (policy == UnknownPhonemePolicy::Neutral) {
            viseme = table.neutral;
        } else {
            throw std::runtime_error("phonemes_to_visemes: unknown phoneme '" + p.phoneme + "'");
        }
        push(t, p.start, table.neutral);
        push(p.start, p.end, viseme);
        t = std::max(t, p.end);
    }
    push(t, duration, table.neutral);
    track.check_invariants();
    return track;
}

std::vector<Raster> render_viseme_frames(const Raster& image, const LabelMask& face_mask,
                                         const LabelTaxonomy& taxonomy, const VisemeTrack& track,
                                         const PresetLibrary& library, double fps) {
    if (fps <= 0) throw std::runtime_error("render_viseme_frames: fps must be positive");
    const int n_frames = static_cast<int>(std::ceil(track.duration * fps));
    std::vector<Raster> frames;
    frames.reserve(n_frames);
    std::map<std::string, Raster> cache;
    for (int f = 0; f < n_frames; ++f) {
        const std::string& viseme = track.at_time(f / fps);
        auto it = cache.find(viseme);
        if (it == cache.end()) {
            const Preset& preset = library.get(viseme);
            ExpressionEdit edit{&preset, 0};
            it = cache.emplace(viseme,
                               composite_expression(image, face_mask, taxonomy, {edit}))
                     .first;
        }
        frames.push_back(it->second);
    }
    return frames;
}

}  // namespace charanim
