#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "charanim/taxonomy.hpp"

namespace charanim {

using Vec2 = Eigen::Vector2d;

/// Triangulated character foreground. Positions are in pixel units, image
/// coordinates (y-down); triangles are stored with positive signed area
/// under cross(b-a, c-a) = (b-a).x*(c-a).y - (b-a).y*(c-a).x.
struct CharacterMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> edges;  // unique, lo < hi
    std::vector<ClassId> vertex_labels;     // empty until assigned

    size_t vertex_count() const { return vertices.size(); }
    size_t triangle_count() const { return triangles.size(); }

    void rebuild_edges();
};

/// Delaunay triangulation of a point set (exposed for tests). Returns
/// triangles with positive signed area; degenerate inputs (fewer than 3
/// non-collinear points) yield an empty list.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

/// Meshes the foreground: boundary vertices on the 0.5-isocontour of the
/// mask (lattice corners of the pixel-square union), interior vertices on a
/// grid of target_spacing, triangles kept where they lie inside the mask.
CharacterMesh triangulate_foreground(const BinaryMask& fg, double target_spacing);

/// Labels each vertex with the class of the nearest foreground pixel
/// (pixel centers; squared-distance ties go to the smaller class id).
void assign_vertex_labels(CharacterMesh& mesh, const LabelMask& mask,
                          const LabelTaxonomy& taxonomy);

/// True if point p lies in the union of closed foreground pixel squares.
bool mask_contains_point(const BinaryMask& fg, const Vec2& p);

void dump_mesh(const CharacterMesh& mesh, const std::string& obj_path,
               const std::string& label_path);

}  // namespace charanim
