#pragma once

#include <vector>

#include "charanim/taxonomy.hpp"

namespace charanim {

/// Exact squared Euclidean distance from each pixel to the nearest zero
/// pixel of the mask, measured between pixel centers. When pad_border is
/// set the image is treated as surrounded by a one-pixel ring of zeros.
std::vector<double> squared_distance_transform(const BinaryMask& mask, bool pad_border = true);

}  // namespace charanim
