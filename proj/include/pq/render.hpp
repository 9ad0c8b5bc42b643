#pragma once

#include <string>
#include <vector>

#include "pq/quadric.hpp"

namespace pq {

struct RenderOptions {
  double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
  int grid = 192;      // marching-squares resolution
  int size_px = 480;   // output square size
};

// One closed conic curve per 3x3 quadric, drawn in the affine chart
// (x, y, 1); quadrics on larger spaces are sliced with a 3-column frame
// first. Output bytes are deterministic for fixed input.
std::string render_svg(const std::vector<Quadric>& conics, const RenderOptions& opt = {});

// Slice a quadric on R^d to the projective plane spanned by a d x 3 frame.
Quadric slice_to_plane(const Quadric& q, const Mat& frame);

}  // namespace pq
