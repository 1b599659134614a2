#include "charanim/retarget.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace charanim {

std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

const Vec2& Rig::joint(const std::string& name) const {
    auto it = joints.find(name);
    if (it == joints.end()) throw std::runtime_error("rig has no joint named '" + name + "'");
    return it->second;
}

Rig load_rig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rig file: " + path);
    Rig rig;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind) || kind[0] == '#') continue;
        if (kind == "joint") {
            std::string name;
            double x, y;
            if (!(ss >> name >> x >> y))
                throw std::runtime_error("bad joint line in " + path + ": " + line);
            if (rig.joints.count(name))
                throw std::runtime_error("duplicate joint '" + name + "' in " + path);
            rig.joints[name] = Vec2(x, y);
        } else if (kind == "bone") {
            std::string parent, child;
            if (!(ss >> parent >> child))
                throw std::runtime_error("bad bone line in " + path + ": " + line);
            rig.bones.emplace_back(parent, child);
        } else {
            throw std::runtime_error("unknown rig record '" + kind + "' in " + path);
        }
    }
    if (rig.joints.empty()) throw std::runtime_error("rig file has no joints: " + path);
    for (const auto& [parent, child] : rig.bones) {
        rig.joint(parent);
        rig.joint(child);
    }
    // Bones, when present, must form a forest over the joints they mention.
    if (!rig.bones.empty()) {
        std::map<std::string, std::string> up;
        auto find = [&](std::string j) {
            for (auto it = up.find(j); it != up.end(); it = up.find(j)) j = it->second;
            return j;
        };
        for (const auto& [parent, child] : rig.bones) {
            const std::string rp = find(parent), rc = find(child);
            if (rp == rc) throw std::runtime_error("rig bones contain a cycle in " + path);
            up[rp] = rc;
        }
    }
    return rig;
}

MotionClip load_motion_clip(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open motion clip: " + path);
    MotionClip clip;
    std::vector<std::string> names;
    std::string line;
    bool have_fps = false;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first) || first[0] == '#') continue;
        if (first == "fps") {
            if (!(ss >> clip.fps) || clip.fps <= 0)
                throw std::runtime_error("bad fps in " + path);
            have_fps = true;
        } else if (first == "joints") {
            std::string name;
            while (ss >> name) names.push_back(name);
        } else {
            if (names.empty()) throw std::runtime_error("motion clip has no joint header: " + path);
            std::map<std::string, Vec2> frame;
            std::istringstream row(line);
            for (const std::string& name : names) {
                double x, y;
                if (!(row >> x >> y))
                    throw std::runtime_error("short motion row in " + path + ": " + line);
                if (!std::isfinite(x) || !std::isfinite(y))
                    throw std::runtime_error("non-finite joint position in " + path);
                frame[name] = Vec2(x, y);
            }
            double extra;
            if (row >> extra) throw std::runtime_error("long motion row in " + path + ": " + line);
            clip.frames.push_back(std::move(frame));
        }
    }
    if (!have_fps) throw std::runtime_error("motion clip missing fps header: " + path);
    return clip;
}

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Facing facing_from_cross(double c) {
    // cross <= 0 is the viewer's right in y-down image coordinates; the
    // exact-zero tie goes right by convention.
    return c <= 0 ? Facing::RightFacing : Facing::LeftFacing;
}

}  // namespace

FootAnalysis detect_foot_orientation(const LabelMask& mask, const LabelTaxonomy& taxonomy,
                                     const Rig& rig, Side side) {
    const std::string suffix = side == Side::Left ? "_l" : "_r";
    const Vec2 knee = rig.joint("knee" + suffix);
    const Vec2 ankle = rig.joint("ankle" + suffix);
    if ((ankle - knee).norm() == 0)
        throw std::runtime_error("detect_foot_orientation: knee and ankle coincide (" +
                                 to_string(side) + ")");

    const ClassId foot = taxonomy.require("foot");

    // The foot class is unsided; take the connected component nearest the
    // side's ankle joint.
    std::vector<int> component(mask.labels.size(), -1);
    int n_components = 0;
    std::vector<double> best_dist;
    std::vector<Vec2> sum;
    std::vector<int> count;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(x, y) != foot || component[y * mask.width + x] >= 0) continue;
            const int c = n_components++;
            best_dist.push_back(std::numeric_limits<double>::infinity());
            sum.emplace_back(0, 0);
            count.push_back(0);
            std::deque<std::pair<int, int>> queue{{x, y}};
            component[y * mask.width + x] = c;
            while (!queue.empty()) {
                auto [px, py] = queue.front();
                queue.pop_front();
                sum[c] += Vec2(px, py);
                count[c]++;
                best_dist[c] = std::min(best_dist[c], (Vec2(px, py) - ankle).norm());
                static constexpr int dx[] = {1, -1, 0, 0};
                static constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = px + dx[k], ny = py + dy[k];
                    if (!mask.in_bounds(nx, ny) || mask.at(nx, ny) != foot) continue;
                    if (component[ny * mask.width + nx] >= 0) continue;
                    component[ny * mask.width + nx] = c;
                    queue.push_back({nx, ny});
                }
            }
        }
    }
    if (n_components == 0)
        throw std::runtime_error("detect_foot_orientation: no foot pixels in mask");
    int chosen = 0;
    for (int c = 1; c < n_components; ++c)
        if (best_dist[c] < best_dist[chosen]) chosen = c;

    FootAnalysis analysis;
    analysis.side = side;
    analysis.knee = knee;
    analysis.reference = ankle - knee;
    analysis.center_of_mass = sum[chosen] / count[chosen];
    analysis.facing =
        facing_from_cross(cross2(analysis.reference, analysis.center_of_mass - knee));
    return analysis;
}

Facing leg_bend_direction(const std::map<std::string, Vec2>& frame, Side side) {
    const std::string suffix = side == Side::Left ? "_l" : "_r";
    auto get = [&](const std::string& name) {
        auto it = frame.find(name + suffix);
        if (it == frame.end())
            throw std::runtime_error("leg_bend_direction: frame missing joint " + name + suffix);
        return it->second;
    };
    const Vec2 hip = get("hip"), knee = get("knee"), ankle = get("ankle");
    if ((ankle - hip).norm() == 0)
        throw std::runtime_error("leg_bend_direction: hip and ankle coincide");
    return facing_from_cross(cross2(ankle - hip, knee - hip));
}

CharacterMesh correct_foot_orientation(const CharacterMesh& mesh, const FootAnalysis& analysis,
                                       Facing bend) {
    if (analysis.facing == bend) return mesh;
    if (analysis.reference.norm() == 0)
        throw std::runtime_error("correct_foot_orientation: zero reference vector");

    const Vec2 dir = analysis.reference.normalized();
    const Vec2 mid = analysis.knee + analysis.reference * 0.5;

    CharacterMesh out = mesh;
    bool any = false;
    for (Vec2& v : out.vertices) {
        // Lower portion: beyond the midpoint toward the ankle.
        if ((v - mid).dot(dir) <= 0) continue;
        const Vec2 d = v - analysis.knee;
        v = analysis.knee + 2.0 * d.dot(dir) * dir - d;
        any = true;
    }
    if (!any)
        throw std::runtime_error("correct_foot_orientation: cut leaves an empty lower portion");
    return out;
}

std::vector<int> handle_vertices(const CharacterMesh& mesh, const Rig& rig,
                                 std::vector<std::string>* joint_order) {
    std::vector<int> handles;
    for (const auto& [name, pos] : rig.joints) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t v = 0; v < mesh.vertices.size(); ++v) {
            const double d = (mesh.vertices[v] - pos).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(v);
            }
        }
        handles.push_back(best);
        if (joint_order) joint_order->push_back(name);
    }
    return handles;
}

Animation animate(const CharacterMesh& mesh, const EdgeWeights& weights, const Rig& rig,
                  const MotionClip& clip, const std::vector<FootAnalysis>& feet,
                  const AnimateOptions& options) {
    std::vector<std::string> joint_order;
    const std::vector<int> handles = handle_vertices(mesh, rig, &joint_order);
    const ArapSystem system(mesh, weights, handles, options.arap);

    Animation anim;
    anim.frames.reserve(clip.frames.size());
    for (const auto& frame : clip.frames) {
        CharacterMesh rest = mesh;
        for (const FootAnalysis& foot : feet) {
            const Facing bend = leg_bend_direction(frame, foot.side);
            rest = correct_foot_orientation(rest, foot, bend);
        }

        // Offset retargeting: each handle vertex follows its joint's motion
        // relative to the rig rest pose, so a rest-pose frame reproduces the
        // rest mesh exactly even though handle vertices only approximate the
        // joint positions.
        std::vector<Vec2> targets;
        targets.reserve(joint_order.size());
        for (size_t k = 0; k < joint_order.size(); ++k) {
            const std::string& name = joint_order[k];
            auto it = frame.find(name);
            if (it == frame.end())
                throw std::runtime_error("animate: frame missing joint '" + name + "'");
            targets.push_back(rest.vertices[handles[k]] + (it->second - rig.joint(name)));
        }

        ArapResult r = system.solve(targets, &rest.vertices);
        anim.stats.push_back({r.energy, r.iterations});
        anim.frames.push_back(std::move(r.positions));
    }
    return anim;
}

}  // namespace charanim
