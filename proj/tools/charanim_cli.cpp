// Command-line front end: validate / animate / face / shade / metrics /
// segstats over a project config bundle.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "charanim/deform.hpp"
#include "charanim/face_anim.hpp"
#include "charanim/image.hpp"
#include "charanim/mesh.hpp"
#include "charanim/metrics.hpp"
#include "charanim/project.hpp"
#include "charanim/render.hpp"
#include "charanim/retarget.hpp"
#include "charanim/shade.hpp"
#include "charanim/taxonomy.hpp"

namespace ca = charanim;
namespace fs = std::filesystem;

namespace {

std::string frame_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d.png", i);
    return buf;
}

std::string light_tag(const ca::Vec3& l) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f_%.3f_%.3f", l.x(), l.y(), l.z());
    return buf;
}

struct LoadedCharacter {
    ca::LabelTaxonomy taxonomy;
    ca::Raster image;
    ca::LabelMask mask;  // after part separation
};

LoadedCharacter load_character(const ca::ProjectConfig& cfg) {
    ca::LabelTaxonomy taxonomy = ca::load_taxonomy(cfg.taxonomy);
    ca::Raster image = ca::read_png(cfg.image);
    ca::LabelMask mask = ca::load_mask(cfg.mask, taxonomy);
    if (mask.width != image.width || mask.height != image.height)
        throw std::runtime_error("mask and image dimensions differ");
    mask = ca::separate_overlapping_parts(mask, taxonomy, cfg.eight_connected);
    return {std::move(taxonomy), std::move(image), std::move(mask)};
}

std::vector<ca::FootAnalysis> analyze_feet(const ca::LabelMask& mask,
                                           const ca::LabelTaxonomy& taxonomy, const ca::Rig& rig) {
    std::vector<ca::FootAnalysis> feet;
    for (ca::Side side : {ca::Side::Left, ca::Side::Right}) {
        const std::string suffix = side == ca::Side::Left ? "_l" : "_r";
        if (rig.has("knee" + suffix) && rig.has("ankle" + suffix) && rig.has("hip" + suffix))
            feet.push_back(ca::detect_foot_orientation(mask, taxonomy, rig, side));
    }
    return feet;
}

int cmd_validate(const ca::ProjectConfig& cfg) {
    std::vector<std::string> errors;
    auto check = [&](const std::string& what, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            errors.push_back(what + ": " + e.what());
        }
    };

    std::optional<ca::LabelTaxonomy> taxonomy;
    std::optional<ca::LabelMask> mask;
    std::optional<ca::Raster> image;
    check("taxonomy", [&] { taxonomy.emplace(ca::load_taxonomy(cfg.taxonomy)); });
    check("image", [&] { image.emplace(ca::read_png(cfg.image)); });
    if (taxonomy) check("mask", [&] { mask.emplace(ca::load_mask(cfg.mask, *taxonomy)); });
    if (mask && image && (mask->width != image->width || mask->height != image->height))
        errors.push_back("mask: dimensions differ from image");

    std::optional<ca::Rig> rig;
    if (!cfg.rig.empty()) {
        check("rig", [&] { rig.emplace(ca::load_rig(cfg.rig)); });
        if (rig && mask && taxonomy) {
            const ca::BinaryMask fg = ca::foreground_from_labels(*mask, *taxonomy);
            for (const auto& [name, pos] : rig->joints)
                if (!ca::mask_contains_point(fg, pos))
                    errors.push_back("rig: joint '" + name + "' outside the foreground");
        }
    }
    if (!cfg.motion.empty())
        check("motion", [&] {
            const ca::MotionClip clip = ca::load_motion_clip(cfg.motion);
            if (clip.frames.empty()) throw std::runtime_error("clip has no frames");
            if (rig)
                for (const auto& [name, pos] : rig->joints)
                    for (size_t f = 0; f < clip.frames.size(); ++f)
                        if (!clip.frames[f].count(name))
                            throw std::runtime_error("frame " + std::to_string(f) +
                                                     " missing joint '" + name + "'");
        });
    if (!cfg.presets.empty() && taxonomy)
        check("presets", [&] { ca::load_preset_library(cfg.presets, *taxonomy); });
    std::optional<ca::VisemeTable> table;
    if (!cfg.visemes.empty())
        check("visemes", [&] { table.emplace(ca::load_viseme_table(cfg.visemes)); });
    if (!cfg.phonemes.empty())
        check("phonemes", [&] {
            const auto track = ca::load_phoneme_track(cfg.phonemes);
            if (table) {
                double duration = 0;
                for (const auto& p : track) duration = std::max(duration, p.end);
                ca::phonemes_to_visemes(track, duration, *table, cfg.unknown_phoneme);
            }
        });

    const std::string dir = ca::prepare_run_dir(cfg, "validate");
    std::ofstream report(fs::path(dir) / "report.csv");
    report << "status,detail\n";
    for (const std::string& e : errors) {
        std::string quoted = e;
        std::replace(quoted.begin(), quoted.end(), ',', ';');
        report << "error," << quoted << "\n";
    }
    if (errors.empty()) report << "ok,\n";

    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    std::cout << (errors.empty() ? "validate: ok" : "validate: failed") << " ("
              << errors.size() << " errors)\n";
    return errors.empty() ? 0 : 1;
}

int cmd_animate(const ca::ProjectConfig& cfg) {
    const LoadedCharacter c = load_character(cfg);
    const ca::BinaryMask fg = ca::foreground_from_labels(c.mask, c.taxonomy);

    ca::CharacterMesh mesh = ca::triangulate_foreground(fg, cfg.mesh_spacing);
    ca::assign_vertex_labels(mesh, c.mask, c.taxonomy);
    const ca::EdgeWeights weights = ca::compute_edge_weights(mesh, c.taxonomy);

    const ca::Rig rig = ca::load_rig(cfg.rig);
    const ca::MotionClip clip = ca::load_motion_clip(cfg.motion);
    const std::vector<ca::FootAnalysis> feet = analyze_feet(c.mask, c.taxonomy, rig);

    ca::AnimateOptions options;
    options.arap.tolerance = cfg.arap_tolerance;
    options.arap.max_iterations = cfg.arap_max_iterations;
    const ca::Animation anim = ca::animate(mesh, weights, rig, clip, feet, options);

    const std::string dir = ca::prepare_run_dir(cfg, "animate");
    std::ofstream manifest(fs::path(dir) / "manifest.csv");
    manifest << "frame,file,energy,iterations\n";
    for (size_t i = 0; i < anim.frames.size(); ++i) {
        const std::string name = frame_name(static_cast<int>(i));
        ca::Raster frame = ca::render_mesh_frame(c.image, mesh, anim.frames[i], c.image.width,
                                                 c.image.height);
        ca::write_png((fs::path(dir) / name).string(), frame);
        char energy[32];
        std::snprintf(energy, sizeof(energy), "%.9g", anim.stats[i].energy);
        manifest << i << "," << name << "," << energy << "," << anim.stats[i].iterations << "\n";
    }
    std::cout << "animate: " << anim.frames.size() << " frames -> " << dir << "\n";
    return 0;
}

int cmd_face(const ca::ProjectConfig& cfg) {
    const LoadedCharacter c = load_character(cfg);
    const ca::FaceCrop crop =
        ca::crop_face_region(c.mask, c.image, c.taxonomy, cfg.face_padding);
    const ca::PresetLibrary library = ca::load_preset_library(cfg.presets, c.taxonomy);
    const ca::VisemeTable table = ca::load_viseme_table(cfg.visemes);

    const std::vector<ca::PhonemeInterval> phonemes = ca::load_phoneme_track(cfg.phonemes);
    double duration = 0;
    for (const auto& p : phonemes) duration = std::max(duration, p.end);
    const ca::VisemeTrack track =
        ca::phonemes_to_visemes(phonemes, duration, table, cfg.unknown_phoneme);

    const std::string dir = ca::prepare_run_dir(cfg, "face");
    {
        std::ofstream out(fs::path(dir) / "viseme_track.txt");
        for (const auto& e : track.entries) {
            char line[128];
            std::snprintf(line, sizeof(line), "%.6f %.6f %s\n", e.start, e.end,
                          e.viseme.c_str());
            out << line;
        }
    }

    const std::vector<ca::Raster> faces =
        ca::render_viseme_frames(crop.image, crop.mask, c.taxonomy, track, library, cfg.fps);
    for (size_t i = 0; i < faces.size(); ++i) {
        ca::Raster frame = c.image;
        for (int y = 0; y < faces[i].height; ++y)
            for (int x = 0; x < faces[i].width; ++x)
                frame.at(crop.rect.x0 + x, crop.rect.y0 + y) = faces[i].at(x, y);
        ca::write_png((fs::path(dir) / frame_name(static_cast<int>(i))).string(), frame);
    }
    std::cout << "face: " << faces.size() << " frames -> " << dir << "\n";
    return 0;
}

int cmd_shade(const ca::ProjectConfig& cfg) {
    const LoadedCharacter c = load_character(cfg);
    const ca::BinaryMask fg = ca::foreground_from_labels(c.mask, c.taxonomy);
    const ca::HeightField hf = ca::estimate_heightfield(fg);

    ca::ShadeOptions options;
    options.t_shadow = cfg.t_shadow;
    options.t_highlight = cfg.t_highlight;
    options.strength = cfg.shade_strength;

    const std::string dir = ca::prepare_run_dir(cfg, "shade");
    for (const ca::Vec3& light : cfg.lights) {
        const ca::ShadingMap map = ca::shade_quantize(hf, light, options);
        const std::string tag = light_tag(light);
        ca::write_indexed_png((fs::path(dir) / ("map_" + tag + ".png")).string(),
                              ca::encode_shading_map(map));
        ca::write_png((fs::path(dir) / ("shaded_" + tag + ".png")).string(),
                      ca::blend_shading(c.image, map, cfg.shade_strength));
    }
    std::cout << "shade: " << cfg.lights.size() << " lights -> " << dir << "\n";
    return 0;
}

int cmd_metrics(const std::string& gt_path, const std::string& pred_path,
                const std::string& taxonomy_path, bool per_class) {
    const ca::LabelTaxonomy taxonomy = ca::load_taxonomy(taxonomy_path);
    const ca::LabelMask gt = ca::load_mask(gt_path, taxonomy);
    const ca::LabelMask pred = ca::load_mask(pred_path, taxonomy);
    const ca::ConfusionMatrix cm = ca::confusion(gt, pred, taxonomy.size());
    const ca::SegScores s = ca::scores(cm);

    std::printf("pixel_acc %.6f\n", s.pixel_acc);
    std::printf("mean_acc %.6f\n", s.mean_acc);
    std::printf("mean_iou %.6f\n", s.mean_iou);
    if (per_class) {
        std::printf("class_id,name,gt_pixels,pred_pixels,recall,iou\n");
        for (const ca::ClassScore& cs : ca::per_class_scores(cm))
            std::printf("%zu,%s,%llu,%llu,%.6f,%.6f\n", cs.class_id,
                        taxonomy.cls(static_cast<ca::ClassId>(cs.class_id)).name.c_str(),
                        static_cast<unsigned long long>(cs.gt_pixels),
                        static_cast<unsigned long long>(cs.pred_pixels), cs.recall, cs.iou);
    }
    return 0;
}

int cmd_segstats(const ca::ProjectConfig& cfg) {
    const LoadedCharacter c = load_character(cfg);

    // Pixel tally and connected-component count (4-connectivity) per class.
    std::vector<uint64_t> pixels(c.taxonomy.size(), 0);
    std::vector<int> components(c.taxonomy.size(), 0);
    std::vector<uint8_t> seen(c.mask.labels.size(), 0);
    for (int y = 0; y < c.mask.height; ++y)
        for (int x = 0; x < c.mask.width; ++x) {
            const ca::ClassId cls = c.mask.at(x, y);
            pixels[cls]++;
            if (seen[y * c.mask.width + x]) continue;
            components[cls]++;
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[y * c.mask.width + x] = 1;
            while (!queue.empty()) {
                auto [px, py] = queue.front();
                queue.pop_front();
                static constexpr int dx[] = {1, -1, 0, 0};
                static constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = px + dx[k], ny = py + dy[k];
                    if (!c.mask.in_bounds(nx, ny) || c.mask.at(nx, ny) != cls) continue;
                    if (seen[ny * c.mask.width + nx]) continue;
                    seen[ny * c.mask.width + nx] = 1;
                    queue.push_back({nx, ny});
                }
            }
        }

    const double total = static_cast<double>(c.mask.labels.size());
    const std::string dir = ca::prepare_run_dir(cfg, "segstats");
    std::ofstream csv(fs::path(dir) / "segstats.csv");
    csv << "class_id,name,pixels,fraction,components\n";
    std::printf("class_id,name,pixels,fraction,components\n");
    for (size_t id = 0; id < c.taxonomy.size(); ++id) {
        char line[160];
        std::snprintf(line, sizeof(line), "%zu,%s,%llu,%.6f,%d\n", id,
                      c.taxonomy.cls(static_cast<ca::ClassId>(id)).name.c_str(),
                      static_cast<unsigned long long>(pixels[id]), pixels[id] / total,
                      components[id]);
        csv << line;
        std::printf("%s", line);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Childlike figure drawing animation pipelines"};
    app.require_subcommand(1);

    std::string config_path;
    std::string gt_path, pred_path, taxonomy_path;
    bool per_class = false;
    std::string output_override;
    std::vector<std::string> light_args;
    double strength_override = -1;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "project config file")->required();
        sub->add_option("-o,--output", output_override, "override output directory");
    };

    CLI::App* validate = app.add_subcommand("validate", "check project consistency");
    add_config(validate);
    CLI::App* animate = app.add_subcommand("animate", "retarget the motion clip onto the drawing");
    add_config(animate);
    CLI::App* face = app.add_subcommand("face", "render lip-sync frames from the phoneme track");
    add_config(face);
    CLI::App* shade = app.add_subcommand("shade", "three-level toon shading per light");
    add_config(shade);
    shade->add_option("--light", light_args, "light position x,y,z (repeatable)");
    shade->add_option("--strength", strength_override, "blend strength in [0,1]");
    CLI::App* segstats = app.add_subcommand("segstats", "per-class pixel and part statistics");
    add_config(segstats);

    CLI::App* metrics = app.add_subcommand("metrics", "segmentation scores of pred vs ground truth");
    metrics->add_option("gt", gt_path, "ground-truth mask PNG")->required();
    metrics->add_option("pred", pred_path, "predicted mask PNG")->required();
    metrics->add_option("-t,--taxonomy", taxonomy_path, "taxonomy file")->required();
    metrics->add_flag("--per-class", per_class, "also print the per-class CSV table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (metrics->parsed()) return cmd_metrics(gt_path, pred_path, taxonomy_path, per_class);

        ca::ProjectConfig cfg = ca::load_project_config(config_path);
        if (!output_override.empty()) cfg.output = output_override;
        if (shade->parsed()) {
            if (!light_args.empty()) {
                cfg.lights.clear();
                for (const std::string& arg : light_args) {
                    std::string v = arg;
                    std::replace(v.begin(), v.end(), ',', ' ');
                    std::istringstream ss(v);
                    ca::Vec3 light;
                    if (!(ss >> light.x() >> light.y() >> light.z()))
                        throw std::runtime_error("--light needs three coordinates: " + arg);
                    cfg.lights.push_back(light);
                }
            }
            if (strength_override >= 0) cfg.shade_strength = strength_override;
        }

        if (validate->parsed()) return cmd_validate(cfg);
        if (animate->parsed()) return cmd_animate(cfg);
        if (face->parsed()) return cmd_face(cfg);
        if (shade->parsed()) return cmd_shade(cfg);
        if (segstats->parsed()) return cmd_segstats(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
