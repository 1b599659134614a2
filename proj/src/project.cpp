#include "charanim/project.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace charanim {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad number for " + key + ": '" + value + "'");
    }
    if (pos != value.size())
        throw std::runtime_error("config: bad number for " + key + ": '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::runtime_error("config: bad boolean for " + key + ": '" + value + "'");
}

Vec3 parse_light(const std::string& value) {
    std::string v = value;
    for (char& c : v)
        if (c == ',') c = ' ';
    std::istringstream ss(v);
    Vec3 light;
    if (!(ss >> light.x() >> light.y() >> light.z()))
        throw std::runtime_error("config: light needs three coordinates: '" + value + "'");
    std::string rest;
    if (ss >> rest) throw std::runtime_error("config: light has trailing data: '" + value + "'");
    return light;
}

}  // namespace

ProjectConfig load_project_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);

    ProjectConfig cfg;
    cfg.config_path = path;
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        return (base / std::filesystem::path(p)).lexically_normal().string();
    };

    bool lights_cleared = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key=value at " + path + ":" +
                                     std::to_string(line_no));
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "image") cfg.image = resolve(value);
        else if (key == "mask") cfg.mask = resolve(value);
        else if (key == "taxonomy") cfg.taxonomy = resolve(value);
        else if (key == "rig") cfg.rig = resolve(value);
        else if (key == "motion") cfg.motion = resolve(value);
        else if (key == "presets") cfg.presets = resolve(value);
        else if (key == "phonemes") cfg.phonemes = resolve(value);
        else if (key == "visemes") cfg.visemes = resolve(value);
        else if (key == "output") cfg.output = resolve(value);
        else if (key == "mesh_spacing") cfg.mesh_spacing = parse_double(key, value);
        else if (key == "arap_tolerance") cfg.arap_tolerance = parse_double(key, value);
        else if (key == "arap_max_iterations")
            cfg.arap_max_iterations = static_cast<int>(parse_double(key, value));
        else if (key == "t_shadow") cfg.t_shadow = parse_double(key, value);
        else if (key == "t_highlight") cfg.t_highlight = parse_double(key, value);
        else if (key == "shade_strength") cfg.shade_strength = parse_double(key, value);
        else if (key == "fps") cfg.fps = parse_double(key, value);
        else if (key == "face_padding") cfg.face_padding = parse_double(key, value);
        else if (key == "eight_connected") cfg.eight_connected = parse_bool(key, value);
        else if (key == "unknown_phoneme") {
            if (value == "error") cfg.unknown_phoneme = UnknownPhonemePolicy::Error;
            else if (value == "neutral") cfg.unknown_phoneme = UnknownPhonemePolicy::Neutral;
            else throw std::runtime_error("config: unknown_phoneme must be error or neutral");
        } else if (key == "light") {
            if (!lights_cleared) {
                cfg.lights.clear();
                lights_cleared = true;
            }
            cfg.lights.push_back(parse_light(value));
        } else {
            throw std::runtime_error("config: unknown key '" + key + "' at " + path + ":" +
                                     std::to_string(line_no));
        }
    }

    if (cfg.mesh_spacing < 1) throw std::runtime_error("config: mesh_spacing must be >= 1");
    if (cfg.arap_tolerance <= 0) throw std::runtime_error("config: arap_tolerance must be > 0");
    if (cfg.arap_max_iterations < 1)
        throw std::runtime_error("config: arap_max_iterations must be >= 1");
    if (cfg.fps <= 0) throw std::runtime_error("config: fps must be > 0");
    if (!(cfg.t_shadow < cfg.t_highlight))
        throw std::runtime_error("config: t_shadow must be below t_highlight");
    if (cfg.t_shadow < -1 || cfg.t_highlight > 1)
        throw std::runtime_error("config: shading thresholds must lie in [-1, 1]");
    if (cfg.shade_strength < 0 || cfg.shade_strength > 1)
        throw std::runtime_error("config: shade_strength must be in [0, 1]");
    if (cfg.face_padding < 0) throw std::runtime_error("config: face_padding must be >= 0");
    if (cfg.lights.empty()) throw std::runtime_error("config: at least one light required");
    return cfg;
}

std::string prepare_run_dir(const ProjectConfig& config, const std::string& run_name) {
    if (config.output.empty()) throw std::runtime_error("config: output directory not set");
    const std::filesystem::path dir = std::filesystem::path(config.output) / run_name;
    std::filesystem::create_directories(dir);
    std::filesystem::copy_file(config.config_path, dir / "config.txt",
                               std::filesystem::copy_options::overwrite_existing);
    return dir.string();
}

}  // namespace charanim
