#include "smartpatch/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "smartpatch/io.hpp"
#include "smartpatch/shared_projection.hpp"

namespace smartpatch {

using nlohmann::json;

namespace {

// Failure inside a pipeline stage; keeps the exit code of the cause.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what, int code)
      : std::runtime_error("stage " + stage + ": " + what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

constexpr const char* kCoordNames[3] = {"x", "y", "z"};

PatchSet load_input(const CliConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("--in is required");
  return load_any(read_text_file(cfg.input), cfg.input.stem().string());
}

std::vector<BezierPatch> as_bezier(const PatchSet& set) {
  if (set.form == PatchForm::Bezier) return set.patches;
  std::vector<BezierPatch> out;
  out.reserve(set.patches.size());
  for (const BezierPatch& raw : set.patches)
    out.push_back(hermite_to_bezier(HermitePatch{HermiteGrid(raw.x), HermiteGrid(raw.y), HermiteGrid(raw.z)}));
  return out;
}

std::vector<Adjacency> adjacency_for(const PatchSet& set, const std::vector<BezierPatch>& patches) {
  return set.adjacency.empty() ? infer_adjacency(patches) : set.adjacency;
}

json residual_json(const ConstraintReport& rep) {
  json j;
  for (const DiagonalResidual& d : rep.per_diagonal)
    j[to_string(d.kind)] = {{"a6", d.leading[0]}, {"a5", d.leading[1]}, {"a4", d.leading[2]}};
  j["max_residual"] = rep.max_residual;
  j["compliant"] = rep.compliant;
  return j;
}

struct SetResiduals {
  json per_patch = json::array();
  double max_residual = 0.0;
  std::size_t compliant_patches = 0;
};

SetResiduals residuals_of(const std::vector<BezierPatch>& patches, double tol) {
  SetResiduals out;
  for (std::size_t p = 0; p < patches.size(); ++p) {
    json pj;
    pj["patch"] = p;
    bool ok = true;
    double worst = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const ConstraintReport rep = bs_residuals(patches[p].coord(c), tol);
      pj[kCoordNames[c]] = residual_json(rep);
      ok = ok && rep.compliant;
      worst = std::max(worst, rep.max_residual);
    }
    pj["max_residual"] = worst;
    pj["compliant"] = ok;
    out.max_residual = std::max(out.max_residual, worst);
    if (ok) ++out.compliant_patches;
    out.per_patch.push_back(pj);
  }
  return out;
}

json continuity_json(const std::vector<BezierPatch>& patches, const std::vector<Adjacency>& adjacency,
                     std::size_t n) {
  json arr = json::array();
  for (const Adjacency& adj : adjacency) {
    const ContinuityReport r =
        continuity_report(patches[adj.a], adj.edge_a, patches[adj.b], adj.edge_b, n);
    arr.push_back({{"a", adj.a},
                   {"edge_a", to_string(adj.edge_a.edge)},
                   {"reversed_a", adj.edge_a.reversed},
                   {"b", adj.b},
                   {"edge_b", to_string(adj.edge_b.edge)},
                   {"reversed_b", adj.edge_b.reversed},
                   {"c0_max_gap", r.c0_max_gap},
                   {"c1_max_mismatch", r.c1_max_mismatch},
                   {"g1_max_angle", r.g1_max_angle},
                   {"samples", r.samples},
                   {"degenerate_normals", r.degenerate_normals}});
  }
  return arr;
}

// Shared edges whose control points differ bitwise between the two sides.
std::size_t split_edges(const std::vector<BezierPatch>& patches, const std::vector<Adjacency>& adjacency) {
  std::size_t count = 0;
  for (const Adjacency& a : adjacency)
    if (edge_control_points(patches[a.a], a.edge_a) != edge_control_points(patches[a.b], a.edge_b)) ++count;
  return count;
}

double set_scale(const std::vector<BezierPatch>& patches) {
  double s = 1.0;
  for (const BezierPatch& p : patches) s = std::max(s, p.scale());
  return s;
}

// Sampled gaps carry evaluation rounding; changes below this are noise.
constexpr double kC0NoiseRelative = 1e-12;

double max_field(const json& arr, const char* key) {
  double m = 0.0;
  for (const json& e : arr) m = std::max(m, e[key].get<double>());
  return m;
}

// --- lambda ----------------------------------------------------------------

CommandResult cmd_lambda(const CliConfig& cfg) {
  const ConstraintSystem sys = build_lambda();
  const MatRC ref = reference_lambda();
  std::vector<std::string> mismatches;
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      if (sys.lambda(r, c) != ref(r, c)) {
        std::ostringstream os;
        os << "(" << r << "," << c << "): derived " << sys.lambda(r, c) << ", table " << ref(r, c);
        mismatches.push_back(os.str());
      }
  const bool ok = sys.rank == 5 && mismatches.empty();

  std::vector<std::string> reduced_names;
  for (std::size_t idx : kInteriorIndices) {
    reduced_names.push_back("x" + std::to_string(idx / 4) + std::to_string(idx % 4));
  }
  std::vector<std::string> free_names, pivot_names;
  for (std::size_t f : sys.free_cols) free_names.push_back(reduced_names[f]);
  for (std::size_t p : sys.reduced_pivots) pivot_names.push_back(reduced_names[p]);

  CommandResult res;
  res.exit_code = ok ? exit_code::kOk : exit_code::kInternalError;
  if (cfg.json) {
    json j;
    json rows = json::array();
    for (std::size_t r = 0; r < 6; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < 16; ++c) row.push_back(static_cast<long long>(sys.lambda(r, c)));
      rows.push_back(row);
    }
    j["lambda"] = rows;
    j["rank"] = sys.rank;
    j["pivot_cols"] = sys.pivot_cols;
    j["reduced_pivots"] = pivot_names;
    j["free_parameters"] = free_names;
    j["inner_identity"] = {{"equation", sys.inner_identity.equation},
                           {"x22_sign", sys.inner_identity.inner_sign},
                           {"corner_coefficient", to_string(sys.inner_identity.corner_coefficient)},
                           {"plus_x22_holds", sys.inner_identity.plus_variant_in_row_space},
                           {"minus_x22_holds", sys.inner_identity.minus_variant_in_row_space}};
    j["matches_reference"] = mismatches.empty();
    j["mismatches"] = mismatches;
    res.report = j.dump(2) + "\n";
    return res;
  }

  std::ostringstream os;
  os << "constraint matrix (rows 0-2: v = u, rows 3-5: v = 1 - u; columns x00 .. x33)\n";
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 16; ++c) os << (c ? " " : "") << static_cast<long long>(sys.lambda(r, c));
    os << "\n";
  }
  os << "rank = " << sys.rank << "\n";
  os << "pivot columns:";
  for (std::size_t p : sys.pivot_cols) os << " " << p;
  os << "\nreduced system pivots:";
  for (const auto& s : pivot_names) os << " " << s;
  os << "\nfree parameters:";
  for (const auto& s : free_names) os << " " << s;
  os << "\ninner-point identity: " << sys.inner_identity.equation << "\n";
  os << "  +x22 form in row space: " << (sys.inner_identity.plus_variant_in_row_space ? "yes" : "no")
     << "; -x22 form in row space: " << (sys.inner_identity.minus_variant_in_row_space ? "yes" : "no")
     << "\n";
  os << "reference table: " << (mismatches.empty() ? "match (96/96 entries)" : "MISMATCH") << "\n";
  for (const auto& m : mismatches) os << "  " << m << "\n";
  res.report = os.str();
  return res;
}

// --- validate --------------------------------------------------------------

CommandResult cmd_validate(const CliConfig& cfg) {
  const PatchSet set = load_input(cfg);
  const std::vector<BezierPatch> patches = as_bezier(set);
  const SetResiduals rs = residuals_of(patches, cfg.tolerance);
  const bool all_ok = rs.compliant_patches == patches.size();

  json hs = json::array();
  if (set.form == PatchForm::Hermite) {
    for (std::size_t p = 0; p < set.patches.size(); ++p)
      for (std::size_t c = 0; c < 3; ++c) {
        const HsReport h = hs_validate(HermiteGrid(set.patches[p].coord(c)), cfg.tolerance);
        json e = {{"patch", p},
                  {"coord", kCoordNames[c]},
                  {"phi", h.phi},
                  {"twist_sum_residuals", h.twist_sum_residuals},
                  {"tangent_residual", h.tangent_residual},
                  {"split_residuals", h.split_residuals},
                  {"degenerate_phi", h.degenerate_phi},
                  {"compliant", h.compliant},
                  {"bs_equivalent", h.bs_equivalent}};
        e["alpha"] = h.alpha ? json(*h.alpha) : json(nullptr);
        e["beta"] = h.beta ? json(*h.beta) : json(nullptr);
        hs.push_back(e);
      }
  }

  CommandResult res;
  res.exit_code = all_ok ? exit_code::kOk : exit_code::kValidationFailure;
  if (cfg.json) {
    json j = {{"name", set.name},
              {"patches", patches.size()},
              {"compliant_patches", rs.compliant_patches},
              {"tolerance", cfg.tolerance},
              {"max_residual", rs.max_residual},
              {"per_patch", rs.per_patch}};
    if (!hs.empty()) j["hermite"] = hs;
    res.report = j.dump(2) + "\n";
    return res;
  }
  std::ostringstream os;
  for (const json& pj : rs.per_patch) {
    os << "patch " << pj["patch"].get<std::size_t>() << ":";
    for (const char* c : kCoordNames) {
      const json& cj = pj[c];
      os << " " << c << "[main " << sci(cj["main"]["a6"]) << " " << sci(cj["main"]["a5"]) << " "
         << sci(cj["main"]["a4"]) << " | anti " << sci(cj["anti"]["a6"]) << " " << sci(cj["anti"]["a5"])
         << " " << sci(cj["anti"]["a4"]) << "]";
    }
    os << " max " << sci(pj["max_residual"]) << (pj["compliant"].get<bool>() ? " ok" : " VIOLATED") << "\n";
  }
  for (const json& e : hs)
    os << "hermite patch " << e["patch"].get<std::size_t>() << " " << e["coord"].get<std::string>()
       << ": phi " << sci(e["phi"]) << " tangent " << sci(e["tangent_residual"])
       << (e["bs_equivalent"].get<bool>() ? " ok" : " VIOLATED") << "\n";
  os << "compliant patches: " << rs.compliant_patches << " / " << patches.size() << " (tol "
     << sci(cfg.tolerance) << ", max residual " << sci(rs.max_residual) << ")\n";
  res.report = os.str();
  return res;
}

// --- repair ----------------------------------------------------------------

struct RepairOutcome {
  std::vector<BezierPatch> repaired;
  json per_patch = json::array();
  double max_displacement = 0.0;
  double max_corner_displacement = 0.0;
  bool corners_exact = true;
  SharedProjection projection;
};

RepairOutcome repair_patches(const std::vector<BezierPatch>& patches, double tol) {
  RepairOutcome out;
  out.projection = bs_project_shared(patches, tol);
  out.repaired = out.projection.patches;
  for (std::size_t p = 0; p < patches.size(); ++p) {
    double disp = 0.0;
    double corner = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const double d = distance(patches[p].control_point(i, j), out.repaired[p].control_point(i, j));
        disp = std::max(disp, d);
        if ((i == 0 || i == 3) && (j == 0 || j == 3)) {
          corner = std::max(corner, d);
          if (!(patches[p].control_point(i, j) == out.repaired[p].control_point(i, j)))
            out.corners_exact = false;
        }
      }
    out.per_patch.push_back({{"patch", p}, {"max_displacement", disp}, {"corner_displacement", corner}});
    out.max_displacement = std::max(out.max_displacement, disp);
    out.max_corner_displacement = std::max(out.max_corner_displacement, corner);
  }
  return out;
}

CommandResult cmd_repair(const CliConfig& cfg) {
  if (cfg.output.empty()) throw UsageError("--out is required");
  const PatchSet set = load_input(cfg);
  const std::vector<BezierPatch> patches = as_bezier(set);
  const std::vector<Adjacency> adjacency = adjacency_for(set, patches);

  const RepairOutcome rep = repair_patches(patches, cfg.tolerance);
  const SetResiduals before = residuals_of(patches, cfg.tolerance);
  const SetResiduals after = residuals_of(rep.repaired, cfg.tolerance);
  const json cont_before = continuity_json(patches, adjacency, std::max<std::size_t>(cfg.n, 2));
  const json cont_after = continuity_json(rep.repaired, adjacency, std::max<std::size_t>(cfg.n, 2));
  double c0_delta = 0.0;
  for (std::size_t k = 0; k < cont_before.size(); ++k)
    c0_delta = std::max(c0_delta, std::abs(cont_after[k]["c0_max_gap"].get<double>() -
                                           cont_before[k]["c0_max_gap"].get<double>()));

  PatchSet out_set;
  out_set.name = set.name;
  out_set.patches = rep.repaired;
  out_set.adjacency = set.adjacency;
  write_text_file(cfg.output, save_patchset(out_set));

  const bool ok = after.compliant_patches == patches.size();
  CommandResult res;
  res.exit_code = ok ? exit_code::kOk : exit_code::kValidationFailure;
  json j = {{"name", set.name},
            {"patches", patches.size()},
            {"output", cfg.output.string()},
            {"max_residual_before", before.max_residual},
            {"max_residual_after", after.max_residual},
            {"compliant_after", after.compliant_patches},
            {"max_displacement", rep.max_displacement},
            {"max_corner_displacement", rep.max_corner_displacement},
            {"corners_bit_exact", rep.corners_exact},
            {"edges_split_after", split_edges(rep.repaired, adjacency)},
            {"shared_control_points", rep.projection.control_point_groups},
            {"fixed_control_points", rep.projection.fixed_groups},
            {"adjacencies", adjacency.size()},
            {"max_c0_gap_before", max_field(cont_before, "c0_max_gap")},
            {"max_c0_gap_after", max_field(cont_after, "c0_max_gap")},
            {"max_c0_gap_change", c0_delta},
            {"per_patch", rep.per_patch}};
  if (cfg.json) {
    res.report = j.dump(2) + "\n";
    return res;
  }
  std::ostringstream os;
  for (const json& pj : rep.per_patch)
    os << "patch " << pj["patch"].get<std::size_t>() << ": max displacement "
       << sci(pj["max_displacement"]) << ", corner displacement " << sci(pj["corner_displacement"]) << "\n";
  os << "residual before " << sci(before.max_residual) << ", after " << sci(after.max_residual) << "\n";
  os << "compliant after repair: " << after.compliant_patches << " / " << patches.size() << "\n";
  os << "corners unchanged: " << (rep.corners_exact ? "yes" : "NO") << "\n";
  os << "shared-edge C0 gap change over " << adjacency.size() << " adjacencies: " << sci(c0_delta) << "\n";
  os << "wrote " << cfg.output.string() << "\n";
  res.report = os.str();
  return res;
}

// --- convert ---------------------------------------------------------------

CommandResult cmd_convert(const CliConfig& cfg) {
  const PatchSet set = load_input(cfg);
  const bool to_hermite = cfg.direction == ConvertDirection::BezierToHermite;
  const PatchForm expected = to_hermite ? PatchForm::Bezier : PatchForm::Hermite;
  if (set.form != expected)
    throw SchemaError(std::string("input holds ") + (set.form == PatchForm::Bezier ? "bezier" : "hermite") +
                      " patches; direction " + (to_hermite ? "b2h" : "h2b") + " needs the other form");
  if (cfg.output.empty() && !cfg.roundtrip) throw UsageError("--out is required unless --roundtrip");

  PatchSet out_set;
  out_set.name = set.name;
  out_set.adjacency = set.adjacency;
  out_set.form = to_hermite ? PatchForm::Hermite : PatchForm::Bezier;
  double roundtrip_error = 0.0;
  for (const BezierPatch& raw : set.patches) {
    BezierPatch converted, back;
    for (std::size_t c = 0; c < 3; ++c) {
      if (to_hermite) {
        converted.coord(c) = bezier_to_hermite(raw.coord(c)).raw();
        back.coord(c) = hermite_to_bezier(HermiteGrid(converted.coord(c)));
      } else {
        converted.coord(c) = hermite_to_bezier(HermiteGrid(raw.coord(c)));
        back.coord(c) = bezier_to_hermite(converted.coord(c)).raw();
      }
      for (std::size_t k = 0; k < 16; ++k)
        roundtrip_error = std::max(roundtrip_error, std::abs(back.coord(c).values()[k] - raw.coord(c).values()[k]));
    }
    out_set.patches.push_back(converted);
  }
  if (!cfg.output.empty()) write_text_file(cfg.output, save_patchset(out_set));

  CommandResult res;
  json j = {{"name", set.name}, {"patches", set.patches.size()}, {"direction", to_hermite ? "b2h" : "h2b"}};
  if (cfg.roundtrip) j["roundtrip_max_error"] = roundtrip_error;
  if (!cfg.output.empty()) j["output"] = cfg.output.string();
  if (cfg.json) {
    res.report = j.dump(2) + "\n";
    return res;
  }
  std::ostringstream os;
  os << "converted " << set.patches.size() << " patches (" << (to_hermite ? "bezier -> hermite" : "hermite -> bezier")
     << ")\n";
  if (cfg.roundtrip) os << "roundtrip max error: " << sci(roundtrip_error) << "\n";
  if (!cfg.output.empty()) os << "wrote " << cfg.output.string() << "\n";
  res.report = os.str();
  return res;
}

// --- tessellate ------------------------------------------------------------

std::vector<TriangleMesh> tessellate_all(const std::vector<BezierPatch>& patches, const CliConfig& cfg) {
  std::vector<TriangleMesh> meshes;
  meshes.reserve(patches.size());
  for (const BezierPatch& p : patches) meshes.push_back(tessellate(p, cfg.n, cfg.pattern, cfg.normals));
  return meshes;
}

CommandResult cmd_tessellate(const CliConfig& cfg) {
  if (cfg.output.empty()) throw UsageError("--out is required");
  const PatchSet set = load_input(cfg);
  const std::vector<BezierPatch> patches = as_bezier(set);
  const std::vector<TriangleMesh> meshes = tessellate_all(patches, cfg);

  std::size_t vertices = 0, triangles = 0;
  for (const TriangleMesh& m : meshes) {
    vertices += m.vertices.size();
    triangles += m.triangles.size();
  }
  std::vector<std::string> files;
  if (cfg.merge) {
    write_text_file(cfg.output, export_obj(merge(meshes)));
    files.push_back(cfg.output.string());
  } else {
    std::filesystem::create_directories(cfg.output);
    for (std::size_t p = 0; p < meshes.size(); ++p) {
      std::ostringstream name;
      name << "patch_" << std::setw(3) << std::setfill('0') << p << ".obj";
      const auto path = cfg.output / name.str();
      write_text_file(path, export_obj(meshes[p]));
      files.push_back(path.string());
    }
  }

  CommandResult res;
  json j = {{"name", set.name},       {"patches", patches.size()}, {"n", cfg.n},
            {"pattern", to_string(cfg.pattern)}, {"vertices", vertices},     {"triangles", triangles},
            {"normals", cfg.normals}, {"merged", cfg.merge},       {"files", files}};
  if (cfg.json) {
    res.report = j.dump(2) + "\n";
    return res;
  }
  std::ostringstream os;
  os << "tessellated " << patches.size() << " patches at n = " << cfg.n << " (" << to_string(cfg.pattern)
     << "): " << vertices << " vertices, " << triangles << " triangles\n";
  for (const auto& f : files) os << "wrote " << f << "\n";
  res.report = os.str();
  return res;
}

// --- continuity ------------------------------------------------------------

CommandResult cmd_continuity(const CliConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("--in is required");
  const std::string text = read_text_file(cfg.input);
  const PatchSet set = load_any(text, cfg.input.stem().string());
  const std::vector<BezierPatch> patches = as_bezier(set);
  // Newell files carry no adjacency records; their shared edges are inferred.
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool newell_input = first == std::string::npos || text[first] != '{';
  std::vector<Adjacency> adjacency = set.adjacency;
  if (adjacency.empty() && newell_input) adjacency = infer_adjacency(patches);
  if (adjacency.empty()) throw SchemaError("input has no adjacency records");
  const std::size_t n = std::max<std::size_t>(cfg.n, 2);
  const json cont = continuity_json(patches, adjacency, n);

  CommandResult res;
  json worst;
  double worst_gap = -1.0;
  for (const json& e : cont)
    if (e["c0_max_gap"].get<double>() > worst_gap) {
      worst_gap = e["c0_max_gap"].get<double>();
      worst = e;
    }
  json j = {{"name", set.name},
            {"adjacencies", cont.size()},
            {"samples", n + 1},
            {"max_c0_gap", max_field(cont, "c0_max_gap")},
            {"max_c1_mismatch", max_field(cont, "c1_max_mismatch")},
            {"max_g1_angle", max_field(cont, "g1_max_angle")},
            {"worst_c0", worst},
            {"per_adjacency", cont}};
  if (cfg.json) {
    res.report = j.dump(2) + "\n";
    return res;
  }
  std::ostringstream os;
  for (const json& e : cont)
    os << "patch " << e["a"].get<std::size_t>() << ":" << e["edge_a"].get<std::string>()
       << (e["reversed_a"].get<bool>() ? "~" : "") << " - patch " << e["b"].get<std::size_t>() << ":"
       << e["edge_b"].get<std::string>() << (e["reversed_b"].get<bool>() ? "~" : "") << "  C0 "
       << sci(e["c0_max_gap"]) << "  C1 " << sci(e["c1_max_mismatch"]) << "  G1 " << sci(e["g1_max_angle"])
       << " rad\n";
  os << "worst: C0 " << sci(j["max_c0_gap"]) << ", C1 " << sci(j["max_c1_mismatch"]) << ", G1 "
     << sci(j["max_g1_angle"]) << " rad over " << cont.size() << " adjacencies\n";
  res.report = os.str();
  return res;
}

// --- teapot ----------------------------------------------------------------

template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const InternalError& e) {
    throw StageError(name, e.what(), exit_code::kInternalError);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), exit_code::kInputError);
  }
}

CommandResult cmd_teapot(const CliConfig& cfg) {
  if (cfg.output.empty()) throw UsageError("--out is required (output directory)");
  const PatchSet set = stage("ingest", [&] { return load_input(cfg); });
  const std::vector<BezierPatch> patches = as_bezier(set);
  const std::vector<Adjacency> adjacency = adjacency_for(set, patches);

  const SetResiduals before = stage("validate", [&] { return residuals_of(patches, cfg.tolerance); });
  const RepairOutcome rep = stage("repair", [&] { return repair_patches(patches, cfg.tolerance); });
  const SetResiduals after = stage("revalidate", [&] { return residuals_of(rep.repaired, cfg.tolerance); });

  const std::size_t n_cont = std::max<std::size_t>(cfg.n, 2);
  const json cont_before = stage("continuity", [&] { return continuity_json(patches, adjacency, n_cont); });
  const json cont_after = stage("continuity", [&] { return continuity_json(rep.repaired, adjacency, n_cont); });
  json deltas = json::array();
  double c0_delta = 0.0;
  for (std::size_t k = 0; k < cont_before.size(); ++k) {
    const double b = cont_before[k]["c0_max_gap"].get<double>();
    const double a = cont_after[k]["c0_max_gap"].get<double>();
    c0_delta = std::max(c0_delta, std::abs(a - b));
    deltas.push_back({{"a", cont_before[k]["a"]},
                      {"b", cont_before[k]["b"]},
                      {"c0_before", b},
                      {"c0_after", a},
                      {"c1_before", cont_before[k]["c1_max_mismatch"]},
                      {"c1_after", cont_after[k]["c1_max_mismatch"]},
                      {"g1_before", cont_before[k]["g1_max_angle"]},
                      {"g1_after", cont_after[k]["g1_max_angle"]}});
  }

  const std::size_t split_before = split_edges(patches, adjacency);
  const std::size_t split_after = split_edges(rep.repaired, adjacency);
  const double c0_noise = kC0NoiseRelative * set_scale(patches);
  const bool c0_unchanged = split_after <= split_before && c0_delta <= c0_noise;

  const std::vector<TriangleMesh> meshes = stage("tessellate", [&] { return tessellate_all(rep.repaired, cfg); });
  bool watertight = true;
  std::size_t vertices = 0, triangles = 0;
  for (const TriangleMesh& m : meshes) {
    const EdgeUsage u = edge_usage(m);
    const std::size_t n = cfg.n;
    watertight = watertight && u.bad_edges == 0 && u.boundary_edges == 4 * n &&
                 u.interior_edges == 3 * n * n - 2 * n;
    vertices += m.vertices.size();
    triangles += m.triangles.size();
  }

  json report = {{"name", set.name},
                 {"patches", patches.size()},
                 {"tolerance", cfg.tolerance},
                 {"before", {{"max_residual", before.max_residual}, {"compliant_patches", before.compliant_patches}}},
                 {"after", {{"max_residual", after.max_residual}, {"compliant_patches", after.compliant_patches}}},
                 {"max_displacement", rep.max_displacement},
                 {"max_corner_displacement", rep.max_corner_displacement},
                 {"corners_bit_exact", rep.corners_exact},
                 {"adjacencies", adjacency.size()},
                 {"max_c0_gap_before", max_field(cont_before, "c0_max_gap")},
                 {"max_c0_gap_after", max_field(cont_after, "c0_max_gap")},
                 {"max_c0_gap_change", c0_delta},
                 {"c0_noise_bound", c0_noise},
                 {"edges_split_before", split_before},
                 {"edges_split_after", split_after},
                 {"c0_unchanged", c0_unchanged},
                 {"continuity", deltas},
                 {"mesh",
                  {{"n", cfg.n},
                   {"pattern", to_string(cfg.pattern)},
                   {"vertices", vertices},
                   {"triangles", triangles},
                   {"watertight_per_patch", watertight}}},
                 {"per_patch_before", before.per_patch},
                 {"per_patch_after", after.per_patch},
                 {"repair", rep.per_patch}};

  stage("export", [&] {
    std::filesystem::create_directories(cfg.output);
    PatchSet out_set;
    out_set.name = set.name + "_repaired";
    out_set.patches = rep.repaired;
    out_set.adjacency = adjacency;
    write_text_file(cfg.output / "repaired.json", save_patchset(out_set));
    write_text_file(cfg.output / "teapot.obj", export_obj(merge(meshes)));
    write_text_file(cfg.output / "report.json", report.dump(2) + "\n");
    return 0;
  });

  const bool ok = after.compliant_patches == patches.size() && rep.corners_exact && c0_unchanged && watertight;
  CommandResult res;
  res.exit_code = ok ? exit_code::kOk : exit_code::kValidationFailure;
  if (cfg.json) {
    json summary = report;
    summary.erase("per_patch_before");
    summary.erase("per_patch_after");
    summary.erase("repair");
    summary.erase("continuity");
    res.report = summary.dump(2) + "\n";
    return res;
  }
  std::ostringstream os;
  os << "ingested " << patches.size() << " patches, " << adjacency.size() << " shared edges\n";
  os << "before repair: " << before.compliant_patches << " / " << patches.size() << " compliant, max residual "
     << sci(before.max_residual) << "\n";
  os << "after repair:  " << after.compliant_patches << " / " << patches.size() << " compliant, max residual "
     << sci(after.max_residual) << "\n";
  os << "max control-point displacement " << sci(rep.max_displacement) << ", corners "
     << (rep.corners_exact ? "unchanged" : "MOVED") << "\n";
  os << "shared-edge C0 gap: before " << sci(report["max_c0_gap_before"]) << ", after "
     << sci(report["max_c0_gap_after"]) << ", max change " << sci(c0_delta) << " (bound " << sci(c0_noise)
     << "), shared edge control points " << (split_after == 0 ? "identical" : "SPLIT") << "\n";
  os << "mesh: " << vertices << " vertices, " << triangles << " triangles, per-patch watertight "
     << (watertight ? "yes" : "NO") << "\n";
  os << "wrote " << (cfg.output / "repaired.json").string() << ", " << (cfg.output / "teapot.obj").string()
     << ", " << (cfg.output / "report.json").string() << "\n";
  res.report = os.str();
  return res;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  if (name == "lambda") return Command::Lambda;
  if (name == "validate") return Command::Validate;
  if (name == "repair") return Command::Repair;
  if (name == "convert") return Command::Convert;
  if (name == "tessellate") return Command::Tessellate;
  if (name == "continuity") return Command::Continuity;
  if (name == "teapot") return Command::Teapot;
  return std::nullopt;
}

void CliConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (n == 0) throw std::invalid_argument("n must be at least 1");
}

CommandResult run_command(const CliConfig& config) {
  try {
    config.validate();
    switch (config.command) {
      case Command::Lambda: return cmd_lambda(config);
      case Command::Validate: return cmd_validate(config);
      case Command::Repair: return cmd_repair(config);
      case Command::Convert: return cmd_convert(config);
      case Command::Tessellate: return cmd_tessellate(config);
      case Command::Continuity: return cmd_continuity(config);
      case Command::Teapot: return cmd_teapot(config);
    }
    return {exit_code::kInternalError, "unknown command\n"};
  } catch (const StageError& e) {
    return {e.code(), std::string("error: ") + e.what() + "\n"};
  } catch (const InternalError& e) {
    return {exit_code::kInternalError, std::string("internal error: ") + e.what() + "\n"};
  } catch (const std::exception& e) {
    return {exit_code::kInputError, std::string("error: ") + e.what() + "\n"};
  }
}

}  // namespace smartpatch
