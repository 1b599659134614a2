#include "charanim/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace charanim {

CoarseRegion parse_coarse_region(const std::string& name) {
    if (name == "head") return CoarseRegion::Head;
    if (name == "body") return CoarseRegion::Body;
    if (name == "arms") return CoarseRegion::Arms;
    if (name == "legs") return CoarseRegion::Legs;
    if (name == "background") return CoarseRegion::Background;
    throw std::runtime_error("unknown coarse region: " + name);
}

std::string to_string(CoarseRegion r) {
    switch (r) {
        case CoarseRegion::Head: return "head";
        case CoarseRegion::Body: return "body";
        case CoarseRegion::Arms: return "arms";
        case CoarseRegion::Legs: return "legs";
        case CoarseRegion::Background: return "background";
    }
    return "?";
}

LabelTaxonomy::LabelTaxonomy(std::vector<SemanticClass> classes, ClassId background_id)
    : classes_(std::move(classes)), background_id_(background_id) {
    if (classes_.empty()) throw std::runtime_error("taxonomy has no classes");
    std::vector<bool> seen(classes_.size(), false);
    for (size_t i = 0; i < classes_.size(); ++i) {
        const SemanticClass& c = classes_[i];
        if (c.id != i)
            throw std::runtime_error("class ids must be contiguous from 0, got id " +
                                     std::to_string(c.id) + " for class '" + c.name +
                                     "' at position " + std::to_string(i));
        if (seen[c.id]) throw std::runtime_error("duplicate class id for '" + c.name + "'");
        seen[c.id] = true;
        if (c.alpha <= 0)
            throw std::runtime_error("non-positive alpha for class '" + c.name + "'");
        if (c.id != background_id_ && c.parent == CoarseRegion::Background)
            throw std::runtime_error("non-background class '" + c.name +
                                     "' must have a body-part parent");
    }
    if (!valid_id(background_id_) || classes_[background_id_].parent != CoarseRegion::Background)
        throw std::runtime_error("taxonomy is missing a background class");
    for (size_t i = 0; i < classes_.size(); ++i)
        for (size_t j = i + 1; j < classes_.size(); ++j)
            if (classes_[i].name == classes_[j].name)
                throw std::runtime_error("duplicate class name '" + classes_[i].name + "'");

    // Symmetric closure of the declared connectivity.
    connect_.assign(classes_.size(), std::vector<bool>(classes_.size(), false));
    for (const SemanticClass& c : classes_) {
        for (const std::string& other : c.connectivity) {
            auto id = find(other);
            if (!id)
                throw std::runtime_error("class '" + c.name +
                                         "' declares connection to unknown class '" + other + "'");
            connect_[c.id][*id] = true;
            connect_[*id][c.id] = true;
        }
    }
}

const SemanticClass& LabelTaxonomy::cls(ClassId id) const {
    if (!valid_id(id)) throw std::runtime_error("invalid class id " + std::to_string(id));
    return classes_[id];
}

std::optional<ClassId> LabelTaxonomy::find(const std::string& name) const {
    for (const SemanticClass& c : classes_)
        if (c.name == name) return c.id;
    return std::nullopt;
}

ClassId LabelTaxonomy::require(const std::string& name) const {
    auto id = find(name);
    if (!id) throw std::runtime_error("unknown class name: " + name);
    return *id;
}

bool LabelTaxonomy::connectable(ClassId l, ClassId lp) const {
    if (l == background_id_ || lp == background_id_) return false;
    if (l == lp) return true;
    return connect_[l][lp];
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

LabelTaxonomy load_taxonomy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open taxonomy file: " + path);

    std::vector<SemanticClass> classes;
    std::optional<ClassId> background;
    SemanticClass cur;
    bool have_cur = false;
    bool cur_has_id = false;

    auto flush = [&] {
        if (!have_cur) return;
        if (!cur_has_id)
            throw std::runtime_error("class '" + cur.name + "' has no id in " + path);
        for (const SemanticClass& c : classes)
            if (c.id == cur.id)
                throw std::runtime_error("duplicate class id " + std::to_string(cur.id) +
                                         " for '" + cur.name + "' in " + path);
        if (cur.parent == CoarseRegion::Background) {
            if (background)
                throw std::runtime_error("more than one background class in " + path);
            background = cur.id;
        }
        classes.push_back(cur);
        cur = SemanticClass{};
        have_cur = false;
        cur_has_id = false;
    };

    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("bad taxonomy line: " + line);
        std::string key = trim(line.substr(0, colon));
        std::string value = trim(line.substr(colon + 1));
        if (key == "class") {
            flush();
            have_cur = true;
            cur.name = value;
        } else if (!have_cur) {
            throw std::runtime_error("taxonomy key '" + key + "' before any class record");
        } else if (key == "id") {
            cur.id = static_cast<ClassId>(std::stoi(value));
            cur_has_id = true;
        } else if (key == "parent") {
            cur.parent = parse_coarse_region(value);
        } else if (key == "alpha") {
            cur.alpha = std::stod(value);
            if (cur.alpha <= 0)
                throw std::runtime_error("non-positive alpha for class '" + cur.name + "'");
        } else if (key == "connects_to") {
            for (const std::string& n : split(value, ',')) cur.connectivity.insert(n);
        } else {
            throw std::runtime_error("unknown taxonomy key '" + key + "'");
        }
    }
    flush();

    if (!background) throw std::runtime_error("taxonomy has no background class: " + path);
    std::sort(classes.begin(), classes.end(),
              [](const SemanticClass& a, const SemanticClass& b) { return a.id < b.id; });
    return LabelTaxonomy(std::move(classes), *background);
}

LabelMask decode_mask(const IndexedImage& image, const LabelTaxonomy& taxonomy) {
    LabelMask mask(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            uint8_t idx = image.at(x, y);
            if (!taxonomy.valid_id(idx))
                throw std::runtime_error("mask index " + std::to_string(idx) +
                                         " out of taxonomy range at pixel (" + std::to_string(x) +
                                         "," + std::to_string(y) + ")");
            mask.at(x, y) = idx;
        }
    return mask;
}

Rgba class_display_color(ClassId id) {
    if (id == 0) return Rgba{255, 255, 255, 255};
    // Golden-angle hue walk gives well-separated, stable colors per id.
    const double h = std::fmod(id * 137.50776405, 360.0);
    const double s = 0.65, v = (id % 2) ? 0.9 : 0.65;
    const double c = v * s;
    const double m = v - c;
    const double hp = h / 60.0;
    const double xv = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp)) {
        case 0: r = c, g = xv; break;
        case 1: r = xv, g = c; break;
        case 2: g = c, b = xv; break;
        case 3: g = xv, b = c; break;
        case 4: r = xv, b = c; break;
        default: r = c, b = xv; break;
    }
    auto u8 = [&](double f) { return static_cast<uint8_t>((f + m) * 255.0 + 0.5); };
    return Rgba{u8(r), u8(g), u8(b), 255};
}

IndexedImage encode_mask(const LabelMask& mask, const LabelTaxonomy& taxonomy) {
    IndexedImage img;
    img.width = mask.width;
    img.height = mask.height;
    img.indices = mask.labels;
    img.palette.resize(taxonomy.size());
    for (size_t i = 0; i < taxonomy.size(); ++i)
        img.palette[i] = class_display_color(static_cast<ClassId>(i));
    return img;
}

LabelMask load_mask(const std::string& path, const LabelTaxonomy& taxonomy) {
    return decode_mask(read_indexed_png(path), taxonomy);
}

size_t BinaryMask::popcount() const {
    size_t n = 0;
    for (uint8_t v : values) n += v != 0;
    return n;
}

BinaryMask foreground_from_labels(const LabelMask& mask, const LabelTaxonomy& taxonomy) {
    BinaryMask fg(mask.width, mask.height);
    const ClassId bg = taxonomy.background_id();
    for (size_t i = 0; i < mask.labels.size(); ++i) fg.values[i] = mask.labels[i] != bg;
    return fg;
}

LabelMask separate_overlapping_parts(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                                     bool eight_connected) {
    LabelMask out = mask;
    const ClassId bg = taxonomy.background_id();

    static constexpr int dx4[] = {1, -1, 0, 0};
    static constexpr int dy4[] = {0, 0, 1, -1};
    static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int* dx = eight_connected ? dx8 : dx4;
    const int* dy = eight_connected ? dy8 : dy4;
    const int nn = eight_connected ? 8 : 4;

    // The expanded region E_L of label L reaches exactly the neighbors of
    // L-pixels, so it suffices to scan each pixel's neighborhood once: a
    // pixel p with label L' is overlapped by E_L whenever some neighbor
    // carries L. Reclassify p when that L is not connectable to L'.
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const ClassId lp = mask.at(x, y);
            if (lp == bg) continue;
            for (int k = 0; k < nn; ++k) {
                const int nx = x + dx[k], ny = y + dy[k];
                if (!mask.in_bounds(nx, ny)) continue;
                const ClassId l = mask.at(nx, ny);
                if (l == bg || l == lp) continue;
                if (!taxonomy.connectable(l, lp)) {
                    out.at(x, y) = bg;
                    break;
                }
            }
        }
    }
    return out;
}

FaceCrop crop_face_region(const LabelMask& mask, const Raster& image,
                          const LabelTaxonomy& taxonomy, double padding_fraction) {
    if (mask.width != image.width || mask.height != image.height)
        throw std::runtime_error("crop_face_region: mask/image dimension mismatch");
    int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            const ClassId l = mask.at(x, y);
            if (l == taxonomy.background_id()) continue;
            if (taxonomy.cls(l).parent != CoarseRegion::Head) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    if (x1 < 0) throw std::runtime_error("crop_face_region: mask contains no head-region pixels");

    const int pad_x = static_cast<int>(std::lround((x1 - x0 + 1) * padding_fraction));
    const int pad_y = static_cast<int>(std::lround((y1 - y0 + 1) * padding_fraction));
    CropRect rect;
    rect.x0 = std::max(0, x0 - pad_x);
    rect.y0 = std::max(0, y0 - pad_y);
    rect.x1 = std::min(mask.width - 1, x1 + pad_x);
    rect.y1 = std::min(mask.height - 1, y1 + pad_y);

    FaceCrop crop;
    crop.rect = rect;
    crop.image = Raster(rect.width(), rect.height());
    crop.mask = LabelMask(rect.width(), rect.height());
    for (int y = rect.y0; y <= rect.y1; ++y)
        for (int x = rect.x0; x <= rect.x1; ++x) {
            crop.image.at(x - rect.x0, y - rect.y0) = image.at(x, y);
            crop.mask.at(x - rect.x0, y - rect.y0) = mask.at(x, y);
        }
    return crop;
}

}  // namespace charanim
