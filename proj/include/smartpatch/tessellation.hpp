#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smartpatch/patches.hpp"

namespace smartpatch {

/// Which diagonal splits each quad cell of the sampled u-v grid.
enum class TessPattern {
  MainDiag,     // every cell along the v = u direction
  AntiDiag,     // every cell along the v = 1 - u direction
  Alternating,  // checkerboard of the two
  ZigZag,       // rows alternate
};

const char* to_string(TessPattern p);
std::optional<TessPattern> parse_pattern(std::string_view name);  // main|anti|alt|zigzag

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::optional<std::vector<Point3>> normals;

  /// Throws std::invalid_argument when an index is out of range, a triangle
  /// repeats an index, or a normal is not unit length.
  void validate() const;
};

/// (n+1) x (n+1) samples at (i/n, j/n), stored row-major with i along u.
struct SampleGrid {
  std::size_t n = 0;
  std::vector<Point3> points;

  const Point3& at(std::size_t i, std::size_t j) const { return points[i * (n + 1) + j]; }
};

SampleGrid sample_grid(const BezierPatch& patch, std::size_t n);

/// Triangulates the (n+1)^2 samples into 2n^2 triangles, wound counter-clockwise
/// in (u, v) so the face normals follow Pu x Pv.
TriangleMesh tessellate(const BezierPatch& patch, std::size_t n, TessPattern pattern,
                        bool with_normals = false);

/// Concatenates meshes in order; indices are offset, vertices are not welded.
TriangleMesh merge(std::span<const TriangleMesh> meshes);

/// Unit normal Pu x Pv / |Pu x Pv|, or nullopt when the partials are
/// (near-)parallel: |Pu x Pv| <= 1e-12 * scale^2.
std::optional<Point3> surface_normal(const BezierPatch& patch, double u, double v);

struct EdgeUsage {
  std::size_t interior_edges = 0;  // used by exactly two triangles
  std::size_t boundary_edges = 0;  // used by exactly one triangle
  std::size_t bad_edges = 0;       // anything else
};

/// Counts undirected index edges by the number of triangles using them.
EdgeUsage edge_usage(const TriangleMesh& mesh);

double triangulated_area(const TriangleMesh& mesh);

// --- continuity ------------------------------------------------------------

enum class Edge { U0, U1, V0, V1 };

struct EdgeId {
  Edge edge = Edge::U0;
  bool reversed = false;

  friend bool operator==(const EdgeId&, const EdgeId&) = default;
};

const char* to_string(Edge e);
std::optional<Edge> parse_edge(std::string_view name);

/// Surface parameters of the point at edge parameter t in [0, 1].
std::array<double, 2> edge_param(EdgeId e, double t);

/// The four control points defining an edge, in traversal order.
std::array<Point3, 4> edge_control_points(const BezierPatch& p, EdgeId e);

struct ContinuityReport {
  double c0_max_gap = 0.0;
  double c1_max_mismatch = 0.0;
  double g1_max_angle = 0.0;
  std::size_t samples = 0;
  std::size_t degenerate_normals = 0;  // samples skipped for the G1 measure
};

/// Compares patch a along edge ea with patch b along edge eb at n + 1 matched
/// samples. The C1 measure is the norm of the difference of the partial
/// derivatives across each edge (d/du for U edges, d/dv for V edges) taken in
/// each patch's own parameterization; the G1 measure is the angle between the
/// unit normals. `tol` is the normal-degeneracy threshold relative to scale.
/// Throws std::invalid_argument when n < 2.
ContinuityReport continuity_report(const BezierPatch& a, EdgeId ea, const BezierPatch& b,
                                   EdgeId eb, std::size_t n, double tol = 1e-12);

}  // namespace smartpatch
