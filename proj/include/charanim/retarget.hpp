#pragma once

#include <map>
#include <string>
#include <vector>

#include "charanim/deform.hpp"
#include "charanim/mesh.hpp"

namespace charanim {

enum class Side { Left, Right };
enum class Facing { LeftFacing, RightFacing };

std::string to_string(Side s);

/// Named 2D joints on the character plus the bone tree connecting them.
struct Rig {
    std::map<std::string, Vec2> joints;
    std::vector<std::pair<std::string, std::string>> bones;  // (parent, child)

    const Vec2& joint(const std::string& name) const;
    bool has(const std::string& name) const { return joints.count(name) > 0; }
};

struct MotionClip {
    double fps = 24.0;
    std::vector<std::map<std::string, Vec2>> frames;
};

Rig load_rig(const std::string& path);
MotionClip load_motion_clip(const std::string& path);

struct FootAnalysis {
    Side side = Side::Left;
    Facing facing = Facing::RightFacing;
    Vec2 center_of_mass = Vec2::Zero();
    Vec2 reference = Vec2::Zero();  // knee -> ankle
    Vec2 knee = Vec2::Zero();       // anchor of the reference line
};

/// Classifies the drawn foot on one side. The center of mass is the mean of
/// the foot-region pixel coordinates; the foot is right-facing when it lies
/// to the viewer's right of the knee-to-ankle vector (cross < 0 in y-down
/// coordinates, exact zero counts as right-facing).
FootAnalysis detect_foot_orientation(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                                     const Rig& rig, Side side);

/// Which way the leg bends in a pose: side of the knee relative to the
/// hip-to-ankle vector, same sign convention as detect_foot_orientation.
Facing leg_bend_direction(const std::map<std::string, Vec2>& frame, Side side);

/// When the drawn foot faces against the leg's bend, reflects the mesh
/// below the knee-ankle midpoint about the knee-to-ankle line. Topology and
/// labels are untouched; applying the correction twice restores the input.
CharacterMesh correct_foot_orientation(const CharacterMesh& mesh, const FootAnalysis& analysis,
                                       Facing bend);

struct AnimateOptions {
    ArapOptions arap;
};

struct FrameStats {
    double energy = 0;
    int iterations = 0;
};

struct Animation {
    std::vector<std::vector<Vec2>> frames;
    std::vector<FrameStats> stats;
};

/// Finds the mesh vertex nearest each rig joint; one handle per joint.
std::vector<int> handle_vertices(const CharacterMesh& mesh, const Rig& rig,
                                 std::vector<std::string>* joint_order = nullptr);

/// Retargets the clip onto the mesh: per frame, checks each analyzed foot
/// against the leg's bend direction, applies the cut/mirror correction when
/// they disagree, then solves ARAP with joints as hard handles.
Animation animate(const CharacterMesh& mesh, const EdgeWeights& weights, const Rig& rig,
                  const MotionClip& clip, const std::vector<FootAnalysis>& feet,
                  const AnimateOptions& options = {});

}  // namespace charanim
