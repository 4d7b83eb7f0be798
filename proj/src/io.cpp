#include "smartpatch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace smartpatch {

using nlohmann::json;

namespace {

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

ScalarGrid grid_from_json(const json& j, std::size_t patch, const char* coord) {
  const std::string where = "patch " + std::to_string(patch) + " grid \"" + coord + "\"";
  if (!j.is_array() || j.size() != 4) throw SchemaError(where + ": expected 4 rows");
  ScalarGrid g;
  for (std::size_t i = 0; i < 4; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != 4)
      throw SchemaError(where + ": row " + std::to_string(i) + " must hold 4 numbers");
    for (std::size_t k = 0; k < 4; ++k) {
      if (!row[k].is_number()) throw SchemaError(where + ": non-numeric value");
      const double v = row[k].get<double>();
      if (!std::isfinite(v)) throw SchemaError(where + ": non-finite value");
      g(i, k) = v;
    }
  }
  return g;
}

json grid_to_json(const ScalarGrid& g) {
  json rows = json::array();
  for (std::size_t i = 0; i < 4; ++i) rows.push_back({g(i, 0), g(i, 1), g(i, 2), g(i, 3)});
  return rows;
}

EdgeId edge_from_json(const json& rec, const char* edge_key, const char* rev_key, std::size_t index) {
  const std::string where = "adjacency " + std::to_string(index);
  if (!rec.contains(edge_key) || !rec[edge_key].is_string())
    throw SchemaError(where + ": missing \"" + edge_key + "\"");
  const auto e = parse_edge(rec[edge_key].get<std::string>());
  if (!e) throw SchemaError(where + ": edge must be one of U0, U1, V0, V1");
  bool reversed = false;
  if (rec.contains(rev_key)) {
    if (!rec[rev_key].is_boolean()) throw SchemaError(where + ": \"" + rev_key + "\" must be a boolean");
    reversed = rec[rev_key].get<bool>();
  }
  return {*e, reversed};
}

std::size_t index_from_json(const json& rec, const char* key, std::size_t index) {
  if (!rec.contains(key) || !rec[key].is_number_integer() || rec[key].get<long long>() < 0)
    throw SchemaError("adjacency " + std::to_string(index) + ": \"" + key +
                      "\" must be a non-negative integer");
  return rec[key].get<std::size_t>();
}

std::vector<std::string> split_numbers(std::string_view line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

template <typename T>
T parse_number(const std::string& tok, std::size_t line) {
  T value{};
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line) + ": malformed number \"" + tok + "\"", line);
  return value;
}

}  // namespace

void PatchSet::validate() const {
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (std::size_t c = 0; c < 3; ++c)
      if (!patches[p].coord(c).all_finite())
        throw SchemaError("patch " + std::to_string(p) + ": non-finite value");
  for (std::size_t k = 0; k < adjacency.size(); ++k) {
    const Adjacency& adj = adjacency[k];
    if (adj.a >= patches.size() || adj.b >= patches.size())
      throw SchemaError("adjacency " + std::to_string(k) + ": patch index out of range");
    if (adj.a == adj.b && adj.edge_a.edge == adj.edge_b.edge)
      throw SchemaError("adjacency " + std::to_string(k) + ": edge paired with itself");
  }
}

PatchSet load_patchset(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t line = line_of_byte(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("JSON parse error at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!doc.is_object()) throw SchemaError("top level must be an object");

  PatchSet set;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw SchemaError("\"name\" must be a string");
    set.name = doc["name"].get<std::string>();
  }
  if (doc.contains("form")) {
    const std::string form = doc["form"].is_string() ? doc["form"].get<std::string>() : "";
    if (form == "bezier") set.form = PatchForm::Bezier;
    else if (form == "hermite") set.form = PatchForm::Hermite;
    else throw SchemaError("\"form\" must be \"bezier\" or \"hermite\"");
  }
  if (!doc.contains("patches") || !doc["patches"].is_array())
    throw SchemaError("missing \"patches\" array");
  const json& patches = doc["patches"];
  for (std::size_t p = 0; p < patches.size(); ++p) {
    const json& pj = patches[p];
    if (!pj.is_object()) throw SchemaError("patch " + std::to_string(p) + ": expected an object");
    BezierPatch patch;
    for (const char* coord : {"x", "y", "z"}) {
      if (!pj.contains(coord))
        throw SchemaError("patch " + std::to_string(p) + ": missing grid \"" + coord + "\"");
    }
    patch.x = grid_from_json(pj["x"], p, "x");
    patch.y = grid_from_json(pj["y"], p, "y");
    patch.z = grid_from_json(pj["z"], p, "z");
    set.patches.push_back(patch);
  }
  if (doc.contains("adjacency")) {
    const json& adj = doc["adjacency"];
    if (!adj.is_array()) throw SchemaError("\"adjacency\" must be an array");
    for (std::size_t k = 0; k < adj.size(); ++k) {
      const json& rec = adj[k];
      if (!rec.is_object()) throw SchemaError("adjacency " + std::to_string(k) + ": expected an object");
      set.adjacency.push_back({index_from_json(rec, "a", k), edge_from_json(rec, "edge_a", "reversed_a", k),
                               index_from_json(rec, "b", k), edge_from_json(rec, "edge_b", "reversed_b", k)});
    }
  }
  set.validate();
  return set;
}

std::string save_patchset(const PatchSet& set) {
  json doc;
  doc["name"] = set.name;
  if (set.form == PatchForm::Hermite) doc["form"] = "hermite";
  doc["patches"] = json::array();
  for (const BezierPatch& p : set.patches)
    doc["patches"].push_back({{"x", grid_to_json(p.x)}, {"y", grid_to_json(p.y)}, {"z", grid_to_json(p.z)}});
  if (!set.adjacency.empty()) {
    doc["adjacency"] = json::array();
    for (const Adjacency& a : set.adjacency)
      doc["adjacency"].push_back({{"a", a.a},
                                  {"edge_a", to_string(a.edge_a.edge)},
                                  {"reversed_a", a.edge_a.reversed},
                                  {"b", a.b},
                                  {"edge_b", to_string(a.edge_b.edge)},
                                  {"reversed_b", a.edge_b.reversed}});
  }
  return doc.dump(1) + "\n";
}

PatchSet load_newell(std::string_view text, std::string name) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find('\n', start), text.size());
      ++line_no;
      auto tokens = split_numbers(text.substr(start, end - start));
      if (!tokens.empty()) lines.emplace_back(line_no, std::move(tokens));
      if (end == text.size()) break;
      start = end + 1;
    }
  }
  std::size_t cursor = 0;
  auto expect_line = [&](const char* what) -> const std::pair<std::size_t, std::vector<std::string>>& {
    if (cursor >= lines.size())
      throw ParseError(std::string("unexpected end of input: expected ") + what,
                       lines.empty() ? 0 : lines.back().first);
    return lines[cursor++];
  };
  auto single_count = [&](const char* what) {
    const auto& [line, tokens] = expect_line(what);
    if (tokens.size() != 1)
      throw ParseError("line " + std::to_string(line) + ": expected a single " + what, line);
    return std::pair{parse_number<std::size_t>(tokens[0], line), line};
  };

  const auto [n_patches, patch_count_line] = single_count("patch count");
  std::vector<std::pair<std::size_t, std::array<std::size_t, 16>>> index_rows;
  for (std::size_t p = 0; p < n_patches; ++p) {
    const auto& [line, tokens] = expect_line("patch index line");
    if (tokens.size() != 16)
      throw ParseError("line " + std::to_string(line) + ": expected 16 vertex indices, found " +
                           std::to_string(tokens.size()),
                       line);
    std::array<std::size_t, 16> idx{};
    for (std::size_t k = 0; k < 16; ++k) idx[k] = parse_number<std::size_t>(tokens[k], line);
    index_rows.emplace_back(line, idx);
  }
  const auto [n_vertices, vertex_count_line] = single_count("vertex count");
  std::vector<Point3> vertices;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const auto& [line, tokens] = expect_line("vertex line");
    if (tokens.size() != 3)
      throw ParseError("line " + std::to_string(line) + ": expected 3 coordinates", line);
    Point3 q{parse_number<double>(tokens[0], line), parse_number<double>(tokens[1], line),
             parse_number<double>(tokens[2], line)};
    if (!std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(q.z))
      throw ParseError("line " + std::to_string(line) + ": non-finite coordinate", line);
    vertices.push_back(q);
  }
  if (cursor != lines.size())
    throw ParseError("line " + std::to_string(lines[cursor].first) +
                         ": trailing data after the declared vertex count",
                     lines[cursor].first);

  PatchSet set;
  set.name = std::move(name);
  for (const auto& [line, idx] : index_rows) {
    BezierPatch patch;
    for (std::size_t k = 0; k < 16; ++k) {
      if (idx[k] == 0 || idx[k] > vertices.size())
        throw ParseError("line " + std::to_string(line) + ": vertex index " + std::to_string(idx[k]) +
                             " out of range 1.." + std::to_string(vertices.size()),
                         line);
      const Point3& q = vertices[idx[k] - 1];
      patch.x.values()[k] = q.x;
      patch.y.values()[k] = q.y;
      patch.z.values()[k] = q.z;
    }
    set.patches.push_back(patch);
  }
  return set;
}

PatchSet load_any(std::string_view text, std::string name) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return load_patchset(text);
  return load_newell(text, std::move(name));
}

std::vector<Adjacency> infer_adjacency(const std::vector<BezierPatch>& patches) {
  constexpr std::array<Edge, 4> edges{Edge::U0, Edge::U1, Edge::V0, Edge::V1};
  struct Slot {
    std::size_t patch;
    Edge edge;
    std::array<Point3, 4> pts;
  };
  std::vector<Slot> slots;
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (Edge e : edges) {
      auto pts = edge_control_points(patches[p], {e, false});
      const bool collapsed = std::all_of(pts.begin(), pts.end(), [&](const Point3& q) { return q == pts[0]; });
      if (!collapsed) slots.push_back({p, e, pts});
    }

  std::vector<Adjacency> out;
  for (std::size_t i = 0; i < slots.size(); ++i)
    for (std::size_t j = i + 1; j < slots.size(); ++j) {
      const Slot& s = slots[i];
      const Slot& t = slots[j];
      const bool forward = std::equal(s.pts.begin(), s.pts.end(), t.pts.begin());
      const bool backward = std::equal(s.pts.begin(), s.pts.end(), t.pts.rbegin());
      if (forward || backward)
        out.push_back({s.patch, {s.edge, false}, t.patch, {t.edge, !forward}});
    }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v + 0.0);
  return std::string(buf, ptr);
}

std::string export_obj(const TriangleMesh& mesh) {
  std::string out;
  for (const Point3& p : mesh.vertices)
    out += "v " + format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
  if (mesh.normals)
    for (const Point3& n : *mesh.normals)
      out += "vn " + format_double(n.x) + " " + format_double(n.y) + " " + format_double(n.z) + "\n";
  for (const auto& t : mesh.triangles) {
    out += "f";
    for (std::uint32_t i : t) {
      const std::string k = std::to_string(i + 1);
      out += " " + (mesh.normals ? k + "//" + k : k);
    }
    out += "\n";
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace smartpatch
