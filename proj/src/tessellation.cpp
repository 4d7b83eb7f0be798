#include "smartpatch/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace smartpatch {

const char* to_string(TessPattern p) {
  switch (p) {
    case TessPattern::MainDiag: return "main";
    case TessPattern::AntiDiag: return "anti";
    case TessPattern::Alternating: return "alt";
    case TessPattern::ZigZag: return "zigzag";
  }
  return "?";
}

std::optional<TessPattern> parse_pattern(std::string_view name) {
  if (name == "main") return TessPattern::MainDiag;
  if (name == "anti") return TessPattern::AntiDiag;
  if (name == "alt") return TessPattern::Alternating;
  if (name == "zigzag") return TessPattern::ZigZag;
  return std::nullopt;
}

void TriangleMesh::validate() const {
  const std::size_t nv = vertices.size();
  for (const auto& t : triangles) {
    for (std::uint32_t i : t)
      if (i >= nv) throw std::invalid_argument("mesh: triangle index out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw std::invalid_argument("mesh: degenerate triangle");
  }
  if (normals) {
    if (normals->size() != nv) throw std::invalid_argument("mesh: normal count mismatch");
    for (const Point3& n : *normals)
      if (std::abs(norm(n) - 1.0) > 1e-9) throw std::invalid_argument("mesh: normal not unit");
  }
}

SampleGrid sample_grid(const BezierPatch& patch, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_grid: n must be at least 1");
  SampleGrid s;
  s.n = n;
  s.points.reserve((n + 1) * (n + 1));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) {
      // Exact endpoints so the corners reproduce the control points.
      const double u = i == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n);
      const double v = j == n ? 1.0 : static_cast<double>(j) / static_cast<double>(n);
      s.points.push_back(eval_patch(patch, u, v));
    }
  return s;
}

namespace {

bool split_main(TessPattern p, std::size_t i, std::size_t j) {
  switch (p) {
    case TessPattern::MainDiag: return true;
    case TessPattern::AntiDiag: return false;
    case TessPattern::Alternating: return (i + j) % 2 == 0;
    case TessPattern::ZigZag: return i % 2 == 0;
  }
  return true;
}

// Normal for mesh output; at collapsed corners the limit from inside the
// domain is used.
Point3 mesh_normal(const BezierPatch& patch, double u, double v) {
  if (auto nrm = surface_normal(patch, u, v)) return *nrm;
  for (double h : {1e-6, 1e-4, 1e-2}) {
    const double uu = u + (0.5 - u) * h * 2.0;
    const double vv = v + (0.5 - v) * h * 2.0;
    if (auto nrm = surface_normal(patch, uu, vv)) return *nrm;
  }
  return {0.0, 0.0, 1.0};
}

}  // namespace

TriangleMesh tessellate(const BezierPatch& patch, std::size_t n, TessPattern pattern,
                        bool with_normals) {
  if (n == 0) throw std::invalid_argument("tessellate: n must be at least 1");
  TriangleMesh mesh;
  mesh.vertices = sample_grid(patch, n).points;
  const auto idx = [n](std::size_t i, std::size_t j) {
    return static_cast<std::uint32_t>(i * (n + 1) + j);
  };
  mesh.triangles.reserve(2 * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1),
                          d = idx(i, j + 1);
      if (split_main(pattern, i, j)) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  if (with_normals) {
    std::vector<Point3> normals;
    normals.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j)
        normals.push_back(mesh_normal(patch, static_cast<double>(i) / static_cast<double>(n),
                                      static_cast<double>(j) / static_cast<double>(n)));
    mesh.normals = std::move(normals);
  }
  return mesh;
}

TriangleMesh merge(std::span<const TriangleMesh> meshes) {
  TriangleMesh out;
  const bool all_normals =
      !meshes.empty() &&
      std::all_of(meshes.begin(), meshes.end(), [](const TriangleMesh& m) { return m.normals.has_value(); });
  if (all_normals) out.normals.emplace();
  for (const TriangleMesh& m : meshes) {
    const auto offset = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const auto& t : m.triangles)
      out.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    if (all_normals) out.normals->insert(out.normals->end(), m.normals->begin(), m.normals->end());
  }
  return out;
}

std::optional<Point3> surface_normal(const BezierPatch& patch, double u, double v) {
  const Point3 pu = eval_partial_u(patch, u, v);
  const Point3 pv = eval_partial_v(patch, u, v);
  const Point3 c = cross(pu, pv);
  const double len = norm(c);
  const double scale = patch.scale();
  if (!(len > 1e-12 * scale * scale)) return std::nullopt;
  return (1.0 / len) * c;
}

EdgeUsage edge_usage(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> count;
  for (const auto& t : mesh.triangles)
    for (std::size_t k = 0; k < 3; ++k) {
      std::uint32_t a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  EdgeUsage usage;
  for (const auto& [edge, c] : count) {
    if (c == 2) ++usage.interior_edges;
    else if (c == 1) ++usage.boundary_edges;
    else ++usage.bad_edges;
  }
  return usage;
}

double triangulated_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    const Point3& a = mesh.vertices[t[0]];
    area += 0.5 * norm(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
  }
  return area;
}

// ---------------------------------------------------------------------------

const char* to_string(Edge e) {
  switch (e) {
    case Edge::U0: return "U0";
    case Edge::U1: return "U1";
    case Edge::V0: return "V0";
    case Edge::V1: return "V1";
  }
  return "?";
}

std::optional<Edge> parse_edge(std::string_view name) {
  if (name == "U0") return Edge::U0;
  if (name == "U1") return Edge::U1;
  if (name == "V0") return Edge::V0;
  if (name == "V1") return Edge::V1;
  return std::nullopt;
}

std::array<double, 2> edge_param(EdgeId e, double t) {
  const double s = e.reversed ? 1.0 - t : t;
  switch (e.edge) {
    case Edge::U0: return {0.0, s};
    case Edge::U1: return {1.0, s};
    case Edge::V0: return {s, 0.0};
    case Edge::V1: return {s, 1.0};
  }
  return {0.0, 0.0};
}

std::array<Point3, 4> edge_control_points(const BezierPatch& p, EdgeId e) {
  std::array<Point3, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t s = e.reversed ? 3 - k : k;
    switch (e.edge) {
      case Edge::U0: out[k] = p.control_point(0, s); break;
      case Edge::U1: out[k] = p.control_point(3, s); break;
      case Edge::V0: out[k] = p.control_point(s, 0); break;
      case Edge::V1: out[k] = p.control_point(s, 3); break;
    }
  }
  return out;
}

namespace {

Point3 cross_partial(const BezierPatch& p, Edge e, double u, double v) {
  return (e == Edge::U0 || e == Edge::U1) ? eval_partial_u(p, u, v) : eval_partial_v(p, u, v);
}

}  // namespace

ContinuityReport continuity_report(const BezierPatch& a, EdgeId ea, const BezierPatch& b,
                                   EdgeId eb, std::size_t n, double tol) {
  if (n < 2) throw std::invalid_argument("continuity_report: n must be at least 2");
  ContinuityReport rep;
  rep.samples = n + 1;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = k == n ? 1.0 : static_cast<double>(k) / static_cast<double>(n);
    const auto [ua, va] = edge_param(ea, t);
    const auto [ub, vb] = edge_param(eb, t);
    rep.c0_max_gap = std::max(rep.c0_max_gap, distance(eval_patch(a, ua, va), eval_patch(b, ub, vb)));
    rep.c1_max_mismatch =
        std::max(rep.c1_max_mismatch,
                 norm(cross_partial(a, ea.edge, ua, va) - cross_partial(b, eb.edge, ub, vb)));

    const Point3 ca = cross(eval_partial_u(a, ua, va), eval_partial_v(a, ua, va));
    const Point3 cb = cross(eval_partial_u(b, ub, vb), eval_partial_v(b, ub, vb));
    const double la = norm(ca), lb = norm(cb);
    if (!(la > tol * a.scale() * a.scale()) || !(lb > tol * b.scale() * b.scale())) {
      ++rep.degenerate_normals;
      continue;
    }
    const double cosine = std::clamp(dot(ca, cb) / (la * lb), -1.0, 1.0);
    // atan2 keeps resolution near zero angle where acos loses digits.
    const double angle = std::atan2(norm(cross(ca, cb)) / (la * lb), cosine);
    rep.g1_max_angle = std::max(rep.g1_max_angle, std::clamp(angle, 0.0, std::numbers::pi));
  }
  return rep;
}

}  // namespace smartpatch
