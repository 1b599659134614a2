#pragma once

#include <string>
#include <vector>

#include "charanim/face_anim.hpp"
#include "charanim/shade.hpp"

namespace charanim {

/// Experiment bundle: every input path and tunable for one character, loaded
/// from a key=value text file. Relative paths resolve against the file's
/// directory.
struct ProjectConfig {
    std::string config_path;  // the file this was loaded from

    std::string image;      // character drawing PNG
    std::string mask;       // indexed label mask PNG
    std::string taxonomy;   // class list
    std::string rig;        // joint/bone file (optional unless animating)
    std::string motion;     // motion clip (optional unless animating)
    std::string presets;    // preset library dir (optional unless face mode)
    std::string phonemes;   // phoneme track (optional unless face mode)
    std::string visemes;    // phoneme -> viseme table
    std::string output;     // run output root

    double mesh_spacing = 10.0;
    double arap_tolerance = 1e-4;
    int arap_max_iterations = 100;
    double t_shadow = 0.25;
    double t_highlight = 0.8;
    double shade_strength = 1.0;
    double fps = 12.0;            // facial animation frame rate
    double face_padding = 0.25;   // face crop padding fraction

    bool eight_connected = false;
    UnknownPhonemePolicy unknown_phoneme = UnknownPhonemePolicy::Error;

    std::vector<Vec3> lights = {Vec3(0.75, 0.25, 1.0)};
};

ProjectConfig load_project_config(const std::string& path);

/// Creates output_root/run_name, copies the config file into it, and
/// returns the directory path.
std::string prepare_run_dir(const ProjectConfig& config, const std::string& run_name);

}  // namespace charanim
