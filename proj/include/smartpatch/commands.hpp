#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "smartpatch/constraints.hpp"
#include "smartpatch/tessellation.hpp"

namespace smartpatch {

enum class Command { Lambda, Validate, Repair, Convert, Tessellate, Continuity, Teapot };
enum class ConvertDirection { BezierToHermite, HermiteToBezier };

std::optional<Command> parse_command(std::string_view name);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kInputError = 2;
inline constexpr int kInternalError = 3;
}  // namespace exit_code

struct CliConfig {
  Command command = Command::Lambda;
  std::filesystem::path input;
  std::filesystem::path output;
  double tolerance = kDefaultTolerance;
  std::size_t n = 16;
  TessPattern pattern = TessPattern::MainDiag;
  ConvertDirection direction = ConvertDirection::BezierToHermite;
  bool json = false;
  bool normals = false;
  bool merge = false;
  bool roundtrip = false;

  /// Throws std::invalid_argument when tolerance <= 0 or n == 0.
  void validate() const;
};

struct CommandResult {
  int exit_code = exit_code::kOk;
  std::string report;  // human text, or JSON with --json
};

/// Runs one subcommand. Errors never escape: they become a report and an
/// exit code (2 for input problems, 3 for internal assertion failures).
CommandResult run_command(const CliConfig& config);

}  // namespace smartpatch
