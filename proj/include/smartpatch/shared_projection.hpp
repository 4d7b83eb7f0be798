#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "smartpatch/patches.hpp"

namespace smartpatch {

struct SharedProjection {
  std::vector<BezierPatch> patches;
  std::size_t control_point_groups = 0;  // distinct control points across the set
  std::size_t fixed_groups = 0;          // groups that contain a corner of some patch
  std::array<std::size_t, 3> constraint_rank{};  // per coordinate
  bool consistent = false;                        // every patch compliant afterwards
};

/// Projects a set of patches onto the constraint set jointly. Control points
/// with bit-identical positions are one unknown, so shared edges stay shared;
/// any point that is a corner of some patch is held fixed. Among all
/// displacements that satisfy the constraints this one has minimal
/// sum of squares over the distinct points. When the tied system is
/// inconsistent the least-squares residual is left and `consistent` is false.
SharedProjection bs_project_shared(std::span<const BezierPatch> patches,
                                   double tol = 1e-9);

}  // namespace smartpatch
