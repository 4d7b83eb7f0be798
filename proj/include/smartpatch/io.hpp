#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smartpatch/patches.hpp"
#include "smartpatch/tessellation.hpp"

namespace smartpatch {

/// Malformed input text; `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates the patch-set schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Adjacency {
  std::size_t a = 0;
  EdgeId edge_a;
  std::size_t b = 0;
  EdgeId edge_b;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

/// Control grids are Bezier unless `form` says they hold Hermite coefficients.
enum class PatchForm { Bezier, Hermite };

struct PatchSet {
  std::string name;
  PatchForm form = PatchForm::Bezier;
  std::vector<BezierPatch> patches;  // raw x/y/z grids, interpreted per `form`
  std::vector<Adjacency> adjacency;

  /// Throws SchemaError on out-of-range or self-identical adjacency records
  /// and on non-finite values.
  void validate() const;
};

PatchSet load_patchset(std::string_view json_text);
std::string save_patchset(const PatchSet& set);

/// Newell teapot format: patch count, one line of 16 one-based vertex indices
/// per patch, vertex count, one "x, y, z" line per vertex. Commas and blanks
/// both separate numbers.
PatchSet load_newell(std::string_view text, std::string name = "newell");

/// Either format, chosen by the first non-blank character ('{' means JSON).
PatchSet load_any(std::string_view text, std::string name);

/// Edge pairs whose four boundary control points coincide exactly, in either
/// direction. Edges collapsed to a single point are ignored.
std::vector<Adjacency> infer_adjacency(const std::vector<BezierPatch>& patches);

/// ASCII OBJ with one-based indices and shortest round-trip decimals.
std::string export_obj(const TriangleMesh& mesh);

std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace smartpatch
