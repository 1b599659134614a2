#pragma once

#include <map>
#include <string>
#include <vector>

#include "charanim/image.hpp"
#include "charanim/mesh.hpp"
#include "charanim/taxonomy.hpp"

namespace charanim {

/// Contour extremes of an eye or mouth region instance. The four points are
/// contour pixels with minimal y / maximal y / minimal x / maximal x;
/// coordinate ties are broken toward the component centroid.
struct SalientPoints {
    std::string region;  // class name
    Vec2 top, bottom, left, right;
    Vec2 centroid = Vec2::Zero();
    std::vector<std::pair<int, int>> pixels;  // the region instance

    std::vector<Vec2> quad() const { return {top, bottom, left, right}; }
};

SalientPoints extract_salient_points(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                                     const std::string& region, int instance);

/// Number of connected components of the given class.
int count_instances(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                    const std::string& region);

/// Thin-plate spline warp with Bookstein kernel U(r) = r^2 log(r^2).
class TpsWarp {
public:
    Vec2 operator()(const Vec2& p) const;

    const Eigen::Matrix<double, 2, 3>& affine() const { return affine_; }
    const std::vector<Vec2>& kernel_weights() const { return weights_; }
    double bending_energy() const;

private:
    friend TpsWarp tps_fit(const std::vector<std::pair<Vec2, Vec2>>&, double);
    std::vector<Vec2> sources_;
    std::vector<Vec2> weights_;
    Eigen::Matrix<double, 2, 3> affine_ = Eigen::Matrix<double, 2, 3>::Zero();
};

/// Fits the standard TPS system; exact interpolation at lambda = 0.
/// Throws on fewer than 3 points or a collinear/duplicate source set.
TpsWarp tps_fit(const std::vector<std::pair<Vec2, Vec2>>& correspondences, double lambda = 0.0);

enum class PresetCategory { Eye, Mouth };

std::string to_string(PresetCategory c);
PresetCategory parse_preset_category(const std::string& s);

/// Canonical labeled shape for one eye or mouth expression/viseme.
struct Preset {
    std::string name;
    PresetCategory category = PresetCategory::Mouth;
    LabelMask patch;
    SalientPoints canonical;

    std::string category_class() const {
        return category == PresetCategory::Eye ? "eye" : "mouth";
    }
};

struct PresetLibrary {
    std::map<std::string, Preset> presets;

    const Preset& get(const std::string& name) const;
};

PresetLibrary load_preset_library(const std::string& dir, const LabelTaxonomy& taxonomy);

/// Warps the preset patch onto the target region and swaps it into the
/// mask: the original region instance is cleared to background, the warped
/// preset labels written in (nearest-pixel resampling of the inverse warp).
LabelMask apply_preset(const LabelMask& face_mask, const LabelTaxonomy& taxonomy,
                       const Preset& preset, const SalientPoints& target);

/// Deterministic stroke-style rendering of a relabeled region: stroke color
/// and width estimated from how the original region was drawn.
Raster rasterize_preset_style(const Raster& image,
                              const std::vector<std::pair<int, int>>& original_region,
                              const std::vector<std::pair<int, int>>& new_region);

struct ExpressionEdit {
    const Preset* preset = nullptr;
    int instance = 0;
};

/// Full expression replacement: removes the original eye/mouth pixels
/// (flat background fill sampled from a ring around them) and composites
/// the stylized warped presets on top.
Raster composite_expression(const Raster& image, const LabelMask& face_mask,
                            const LabelTaxonomy& taxonomy,
                            const std::vector<ExpressionEdit>& edits);

struct PhonemeInterval {
    double start = 0, end = 0;
    std::string phoneme;
};

std::vector<PhonemeInterval> load_phoneme_track(const std::string& path);

struct VisemeEntry {
    double start = 0, end = 0;
    std::string viseme;
};

/// Non-overlapping, sorted, gap-free cover of [0, duration].
struct VisemeTrack {
    std::vector<VisemeEntry> entries;
    double duration = 0;

    const std::string& at_time(double t) const;  // half-open [start, end)
    void check_invariants() const;
};

/// Phoneme name -> viseme name; "neutral" names the silence viseme.
struct VisemeTable {
    std::map<std::string, std::string> mapping;
    std::string neutral = "neutral";
};

VisemeTable load_viseme_table(const std::string& path);

enum class UnknownPhonemePolicy { Error, Neutral };

VisemeTrack phonemes_to_visemes(const std::vector<PhonemeInterval>& phonemes, double duration,
                                const VisemeTable& table,
                                UnknownPhonemePolicy policy = UnknownPhonemePolicy::Error);

/// ceil(duration * fps) frames; frame t shows the entry containing t / fps.
std::vector<Raster> render_viseme_frames(const Raster& image, const LabelMask& face_mask,
                                         const LabelTaxonomy& taxonomy, const VisemeTrack& track,
                                         const PresetLibrary& library, double fps);

}  // namespace charanim
