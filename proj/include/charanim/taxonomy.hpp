#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "charanim/image.hpp"

namespace charanim {

using ClassId = uint8_t;

enum class CoarseRegion { Head, Body, Arms, Legs, Background };

CoarseRegion parse_coarse_region(const std::string& name);
std::string to_string(CoarseRegion r);

struct SemanticClass {
    ClassId id = 0;
    std::string name;
    CoarseRegion parent = CoarseRegion::Background;
    double alpha = 100.0;                   // edge-weight scale for this label
    std::set<std::string> connectivity;     // anatomically connectable labels
};

/// Character part taxonomy: the class list, per-class deformability scale,
/// and the symmetric anatomical connectivity relation.
class LabelTaxonomy {
public:
    LabelTaxonomy(std::vector<SemanticClass> classes, ClassId background_id);

    const std::vector<SemanticClass>& classes() const { return classes_; }
    size_t size() const { return classes_.size(); }
    ClassId background_id() const { return background_id_; }

    const SemanticClass& cls(ClassId id) const;
    std::optional<ClassId> find(const std::string& name) const;
    ClassId require(const std::string& name) const;

    double alpha(ClassId id) const { return cls(id).alpha; }
    bool valid_id(int id) const { return id >= 0 && id < static_cast<int>(classes_.size()); }

    /// True if L' may touch L. Same label is always connectable; background
    /// never participates.
    bool connectable(ClassId l, ClassId lp) const;

private:
    std::vector<SemanticClass> classes_;
    ClassId background_id_;
    std::vector<std::vector<bool>> connect_;  // symmetric closure, by id
};

LabelTaxonomy load_taxonomy(const std::string& path);

/// Per-pixel class-id grid aligned to the source drawing.
struct LabelMask {
    int width = 0;
    int height = 0;
    std::vector<ClassId> labels;  // row-major

    LabelMask() = default;
    LabelMask(int w, int h, ClassId fill = 0)
        : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {}

    ClassId& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
    ClassId at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool operator==(const LabelMask&) const = default;
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> values;  // 0 or 1, row-major

    BinaryMask() = default;
    BinaryMask(int w, int h, uint8_t fill = 0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    uint8_t at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, uint8_t v) { values[static_cast<size_t>(y) * width + x] = v; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t popcount() const;
};

struct CropRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel bounds
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    bool operator==(const CropRect&) const = default;
};

LabelMask decode_mask(const IndexedImage& image, const LabelTaxonomy& taxonomy);
IndexedImage encode_mask(const LabelMask& mask, const LabelTaxonomy& taxonomy);
LabelMask load_mask(const std::string& path, const LabelTaxonomy& taxonomy);

BinaryMask foreground_from_labels(const LabelMask& mask, const LabelTaxonomy& taxonomy);

/// Reclassifies as background every pixel on a boundary between two regions
/// whose labels are not anatomically connectable. Dilation is one pixel,
/// 4-connected by default.
LabelMask separate_overlapping_parts(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                                     bool eight_connected = false);

struct FaceCrop {
    Raster image;
    LabelMask mask;
    CropRect rect;
};

FaceCrop crop_face_region(const LabelMask& mask, const Raster& image,
                          const LabelTaxonomy& taxonomy, double padding_fraction);

/// Fixed display palette used when encoding masks whose taxonomy has no
/// palette of its own.
Rgba class_display_color(ClassId id);

}  // namespace charanim
