#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "smartpatch/tessellation.hpp"

using namespace smartpatch;

namespace {

BezierPatch bilinear_patch(Point3 p00, Point3 p03, Point3 p30, Point3 p33) {
  return {oracle::bilinear_grid(p00.x, p03.x, p30.x, p33.x), oracle::bilinear_grid(p00.y, p03.y, p30.y, p33.y),
          oracle::bilinear_grid(p00.z, p03.z, p30.z, p33.z)};
}

BezierPatch unit_square() { return bilinear_patch({0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}); }

// Cubic subdivision of a grid at u = 1/2 by de Casteljau along each column.
std::array<ScalarGrid, 2> split_u(const ScalarGrid& g) {
  ScalarGrid lo, hi;
  for (std::size_t j = 0; j < 4; ++j) {
    const double p0 = g(0, j), p1 = g(1, j), p2 = g(2, j), p3 = g(3, j);
    const double a = (p0 + p1) / 2, b = (p1 + p2) / 2, c = (p2 + p3) / 2;
    const double d = (a + b) / 2, e = (b + c) / 2, m = (d + e) / 2;
    lo(0, j) = p0, lo(1, j) = a, lo(2, j) = d, lo(3, j) = m;
    hi(0, j) = m, hi(1, j) = e, hi(2, j) = c, hi(3, j) = p3;
  }
  return {lo, hi};
}

}  // namespace

TEST(Pattern, ParseAndPrint) {
  for (auto p : {TessPattern::MainDiag, TessPattern::AntiDiag, TessPattern::Alternating, TessPattern::ZigZag})
    EXPECT_EQ(parse_pattern(to_string(p)), p);
  EXPECT_FALSE(parse_pattern("spiral").has_value());
}

TEST(SampleGrid, ZeroThrows) { EXPECT_THROW(sample_grid(unit_square(), 0), std::invalid_argument); }

TEST(SampleGrid, OneGivesCorners) {
  std::mt19937_64 rng(30);
  const BezierPatch p = oracle::random_patch(rng);
  const SampleGrid s = sample_grid(p, 1);
  ASSERT_EQ(s.points.size(), 4u);
  EXPECT_EQ(s.at(0, 0), p.control_point(0, 0));
  EXPECT_EQ(s.at(0, 1), p.control_point(0, 3));
  EXPECT_EQ(s.at(1, 0), p.control_point(3, 0));
  EXPECT_EQ(s.at(1, 1), p.control_point(3, 3));
}

TEST(SampleGrid, ConstantPatch) {
  const BezierPatch p{ScalarGrid::constant(1), ScalarGrid::constant(2), ScalarGrid::constant(3)};
  for (const Point3& q : sample_grid(p, 5).points) EXPECT_LE(distance(q, {1, 2, 3}), 1e-14);
}

TEST(Tessellate, Counts) {
  const TriangleMesh one = tessellate(unit_square(), 1, TessPattern::MainDiag);
  EXPECT_EQ(one.vertices.size(), 4u);
  EXPECT_EQ(one.triangles.size(), 2u);
  for (auto p : {TessPattern::MainDiag, TessPattern::AntiDiag, TessPattern::Alternating, TessPattern::ZigZag}) {
    const TriangleMesh m = tessellate(unit_square(), 4, p);
    EXPECT_EQ(m.vertices.size(), 25u);
    EXPECT_EQ(m.triangles.size(), 32u);
  }
  EXPECT_THROW(tessellate(unit_square(), 0, TessPattern::MainDiag), std::invalid_argument);
}

TEST(Tessellate, SingleCellDiagonals) {
  // vertex index = i * 2 + j with i along u
  const TriangleMesh m = tessellate(unit_square(), 1, TessPattern::MainDiag);
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  EXPECT_TRUE(edges.count({0, 3}));
  EXPECT_FALSE(edges.count({1, 2}));
  const TriangleMesh a = tessellate(unit_square(), 1, TessPattern::AntiDiag);
  edges.clear();
  for (const auto& t : a.triangles)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  EXPECT_TRUE(edges.count({1, 2}));
  EXPECT_FALSE(edges.count({0, 3}));
}

TEST(TessellateProperty, WatertightAndOriented) {
  std::mt19937_64 rng(31);
  for (auto p : {TessPattern::MainDiag, TessPattern::AntiDiag, TessPattern::Alternating, TessPattern::ZigZag})
    for (std::size_t n : {1u, 2u, 3u, 7u, 16u}) {
      const BezierPatch patch = oracle::random_patch(rng);
      const TriangleMesh m = tessellate(patch, n, p, true);
      EXPECT_NO_THROW(m.validate());
      const EdgeUsage u = edge_usage(m);
      EXPECT_EQ(u.bad_edges, 0u);
      EXPECT_EQ(u.boundary_edges, 4 * n);
      EXPECT_EQ(u.interior_edges, 3 * n * n - 2 * n);
      // CCW in (u, v): each triangle's parameter-space area is positive
      for (const auto& t : m.triangles) {
        auto uv = [&](std::uint32_t k) { return std::array<double, 2>{double(k / (n + 1)), double(k % (n + 1))}; };
        const auto a = uv(t[0]), b = uv(t[1]), c = uv(t[2]);
        EXPECT_GT((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]), 0.0);
      }
    }
}

TEST(Tessellate, PlanarAreaExact) {
  const BezierPatch p = bilinear_patch({0, 0, 0}, {0, 2, 0}, {3, 0, 0}, {3, 2, 0});
  EXPECT_NEAR(triangulated_area(tessellate(p, 5, TessPattern::Alternating)), 6.0, 1e-12);
}

TEST(Tessellate, FaceNormalsFollowSurfaceNormal) {
  const TriangleMesh m = tessellate(unit_square(), 3, TessPattern::ZigZag, true);
  for (const Point3& nrm : *m.normals) EXPECT_LE(distance(nrm, {0, 0, 1}), 1e-12);
  for (const auto& t : m.triangles) {
    const Point3 f = cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
    EXPECT_GT(f.z, 0.0);
  }
}

TEST(Merge, OffsetsIndices) {
  const TriangleMesh a = tessellate(unit_square(), 1, TessPattern::MainDiag);
  const std::array<TriangleMesh, 2> both{a, a};
  const TriangleMesh m = merge(both);
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(m.triangles[2][0], a.triangles[0][0] + 4);
  EXPECT_NO_THROW(m.validate());
}

TEST(Normal, Plane) {
  const auto n = surface_normal(unit_square(), 0.3, 0.8);
  ASSERT_TRUE(n.has_value());
  EXPECT_NEAR(std::abs(n->z), 1.0, 1e-15);
}

TEST(Normal, SaddleAtOrigin) {
  // z = u v over the unit square
  const BezierPatch p = bilinear_patch({0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1});
  const auto n = surface_normal(p, 0, 0);
  ASSERT_TRUE(n.has_value());
  EXPECT_LE(distance(*n, {0, 0, 1}), 1e-15);
}

TEST(Normal, Degenerate) {
  // u = 0 edge collapsed to a point
  BezierPatch p = unit_square();
  for (std::size_t j = 0; j < 4; ++j) p.y(0, j) = 0.0;
  EXPECT_FALSE(surface_normal(p, 0.0, 0.5).has_value());
  EXPECT_TRUE(surface_normal(p, 0.5, 0.5).has_value());
  EXPECT_NO_THROW(tessellate(p, 4, TessPattern::MainDiag, true).validate());
}

TEST(NormalProperty, MatchesFiniteDifferences) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> t(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const BezierPatch p = oracle::random_patch(rng);
    const double u = t(rng), v = t(rng);
    const auto n = surface_normal(p, u, v);
    ASSERT_TRUE(n.has_value());
    const auto [fu, fv] = oracle::fd_partials(p, u, v, 1e-5);
    const Point3 c = cross(fu, fv);
    EXPECT_LE(distance(*n, (1.0 / norm(c)) * c), 1e-6);
  }
}

TEST(Edges, ParseAndControlPoints) {
  EXPECT_EQ(parse_edge("V1"), Edge::V1);
  EXPECT_FALSE(parse_edge("W0").has_value());
  std::mt19937_64 rng(33);
  const BezierPatch p = oracle::random_patch(rng);
  const auto fwd = edge_control_points(p, {Edge::U1, false});
  const auto rev = edge_control_points(p, {Edge::U1, true});
  EXPECT_EQ(fwd[0], p.control_point(3, 0));
  EXPECT_EQ(rev[0], p.control_point(3, 3));
  EXPECT_EQ(edge_param({Edge::V0, true}, 0.25), (std::array<double, 2>{0.75, 0.0}));
}

TEST(Continuity, SelfComparison) {
  std::mt19937_64 rng(34);
  const BezierPatch p = oracle::random_patch(rng);
  for (Edge e : {Edge::U0, Edge::U1, Edge::V0, Edge::V1}) {
    const ContinuityReport r = continuity_report(p, {e, false}, p, {e, false}, 10);
    EXPECT_EQ(r.c0_max_gap, 0.0);
    EXPECT_EQ(r.c1_max_mismatch, 0.0);
    EXPECT_EQ(r.g1_max_angle, 0.0);
    EXPECT_EQ(r.samples, 11u);
  }
  EXPECT_THROW(continuity_report(p, {}, p, {}, 1), std::invalid_argument);
}

TEST(Continuity, SubdividedBilinearHalves) {
  const BezierPatch whole = bilinear_patch({0, 0, 0}, {0, 1, 0.5}, {2, 0, 1}, {2, 1, -1});
  const auto xs = split_u(whole.x), ys = split_u(whole.y), zs = split_u(whole.z);
  const BezierPatch lo{xs[0], ys[0], zs[0]}, hi{xs[1], ys[1], zs[1]};
  const ContinuityReport r = continuity_report(lo, {Edge::U1, false}, hi, {Edge::U0, false}, 20);
  EXPECT_LE(r.c0_max_gap, 1e-12);
  EXPECT_LE(r.g1_max_angle, 1e-9);
}

TEST(Continuity, ReversedTraversal) {
  std::mt19937_64 rng(35);
  const BezierPatch a = oracle::random_patch(rng);
  BezierPatch b = oracle::random_patch(rng);
  // b's V0 edge runs along a's U1 edge backwards
  for (std::size_t k = 0; k < 4; ++k) {
    const Point3 q = a.control_point(3, 3 - k);
    b.x(k, 0) = q.x;
    b.y(k, 0) = q.y;
    b.z(k, 0) = q.z;
  }
  const ContinuityReport r = continuity_report(a, {Edge::U1, false}, b, {Edge::V0, true}, 16);
  EXPECT_LE(r.c0_max_gap, 1e-12 * a.scale());
}

TEST(Continuity, CornerOnlyContact) {
  std::mt19937_64 rng(36);
  const BezierPatch a = oracle::random_patch(rng);
  BezierPatch b = oracle::random_patch(rng);
  for (std::size_t j : {0u, 3u}) {
    b.x(0, j) = a.x(3, j);
    b.y(0, j) = a.y(3, j);
    b.z(0, j) = a.z(3, j);
  }
  const ContinuityReport r = continuity_report(a, {Edge::U1, false}, b, {Edge::U0, false}, 8);
  EXPECT_GT(r.c0_max_gap, 0.0);
}

TEST(Continuity, DegenerateNormalsCounted) {
  BezierPatch p = unit_square();
  for (std::size_t j = 0; j < 4; ++j) p.y(0, j) = 0.0;
  const ContinuityReport r = continuity_report(p, {Edge::U0, false}, p, {Edge::U0, false}, 4);
  EXPECT_EQ(r.degenerate_normals, 5u);
  EXPECT_EQ(r.g1_max_angle, 0.0);
}
