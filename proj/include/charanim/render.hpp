#pragma once

#include "charanim/image.hpp"
#include "charanim/mesh.hpp"

namespace charanim {

/// Rasterizes the deformed mesh with the source drawing as texture: each
/// triangle maps its deformed footprint back to its rest-pose location in
/// the image (nearest-neighbor sampling).
Raster render_mesh_frame(const Raster& image, const CharacterMesh& mesh,
                         const std::vector<Vec2>& deformed, int canvas_width, int canvas_height,
                         Rgba background = {255, 255, 255, 255});

}  // namespace charanim
