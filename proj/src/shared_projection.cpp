#include "smartpatch/shared_projection.hpp"

#include <map>
#include <tuple>

#include <Eigen/Dense>

#include "smartpatch/constraints.hpp"

namespace smartpatch {

namespace {

using Key = std::tuple<double, double, double>;

Key key_of(Point3 p) {
  // +0.0 folds negative zero into positive zero.
  return {p.x + 0.0, p.y + 0.0, p.z + 0.0};
}

}  // namespace

SharedProjection bs_project_shared(std::span<const BezierPatch> patches, double tol) {
  SharedProjection out;
  out.patches.assign(patches.begin(), patches.end());
  if (patches.empty()) {
    out.consistent = true;
    return out;
  }

  std::map<Key, std::size_t> group_of;
  std::vector<std::array<std::size_t, 16>> slot_group(patches.size());
  std::vector<Point3> group_point;
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (std::size_t k = 0; k < 16; ++k) {
      const Point3 q = patches[p].control_point(k / 4, k % 4);
      auto [it, inserted] = group_of.try_emplace(key_of(q), group_point.size());
      if (inserted) group_point.push_back(q);
      slot_group[p][k] = it->second;
    }
  out.control_point_groups = group_point.size();

  std::vector<bool> fixed(group_point.size(), false);
  for (const auto& slots : slot_group)
    for (std::size_t k : kCornerIndices) fixed[slots[k]] = true;
  std::vector<std::ptrdiff_t> unknown(group_point.size(), -1);
  std::ptrdiff_t n_unknown = 0;
  for (std::size_t g = 0; g < group_point.size(); ++g) {
    if (fixed[g]) {
      ++out.fixed_groups;
    } else {
      unknown[g] = n_unknown++;
    }
  }

  // Five independent constraint rows per patch.
  const ConstraintSystem& sys = constraint_system();
  const MatRC rows = sys.rref.to_double();
  const std::size_t n_rows = 5 * patches.size();

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rows), n_unknown);
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t k = 0; k < 16; ++k) {
        const std::ptrdiff_t u = unknown[slot_group[p][k]];
        if (u >= 0) a(static_cast<Eigen::Index>(5 * p + r), u) += rows(r, k);
      }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  if (n_unknown > 0) cod.compute(a);

  for (std::size_t c = 0; c < 3; ++c) {
    out.constraint_rank[c] = n_unknown > 0 ? static_cast<std::size_t>(cod.rank()) : 0;
    if (n_unknown == 0) continue;
    Eigen::VectorXd residual(static_cast<Eigen::Index>(n_rows));
    for (std::size_t p = 0; p < patches.size(); ++p)
      for (std::size_t r = 0; r < 5; ++r) {
        double s = 0.0;
        for (std::size_t k = 0; k < 16; ++k) s += rows(r, k) * group_point[slot_group[p][k]][c];
        residual(static_cast<Eigen::Index>(5 * p + r)) = s;
      }
    const Eigen::VectorXd delta = cod.solve(-residual);
    for (std::size_t p = 0; p < patches.size(); ++p) {
      ScalarGrid& g = out.patches[p].coord(c);
      for (std::size_t k = 0; k < 16; ++k) {
        const std::ptrdiff_t u = unknown[slot_group[p][k]];
        if (u >= 0) g.values()[k] = group_point[slot_group[p][k]][c] + delta(u);
      }
    }
  }

  out.consistent = true;
  for (const BezierPatch& patch : out.patches)
    for (std::size_t c = 0; c < 3; ++c)
      if (!bs_residuals(patch.coord(c), tol).compliant) out.consistent = false;
  return out;
}

}  // namespace smartpatch
