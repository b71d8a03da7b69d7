#pragma once

#include "sitr/image.hpp"
#include "sitr/sim/render.hpp"

namespace sitr::eval {

// Frequency-domain least-squares integration of a per-pixel normal field
// into a height map (mm). The field is converted to gradients
// g = (-n_x/n_z, -n_y/n_z), n_z clamped below at 0.1, mirror-padded to kill
// periodic-boundary artifacts, integrated, and returned zero-mean.
sim::HeightMap reconstruct_height(const Image& normals, double pixel_pitch_mm);

}  // namespace sitr::eval
