#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "smartpatch/commands.hpp"

int main(int argc, char** argv) {
  using namespace smartpatch;

  CLI::App app{"smartpatch - diagonal-cubic (BS/HS) bicubic patch toolkit"};
  app.require_subcommand(1, 1);

  CliConfig cfg;
  std::string pattern = "main";
  std::string direction = "b2h";

  const std::map<std::string, std::string> descriptions{
      {"lambda", "Derive and certify the constraint matrix"},
      {"validate", "Report diagonal-degree residuals per patch"},
      {"repair", "Project patches onto the constraint set"},
      {"convert", "Convert between Bezier and Hermite coefficient forms"},
      {"tessellate", "Triangulate patches and export OBJ"},
      {"continuity", "Measure C0/C1/G1 continuity across shared edges"},
      {"teapot", "Run the ingest-validate-repair-tessellate pipeline"},
  };
  for (const auto& [name, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--in", cfg.input, "Input patch set (JSON or Newell)");
    sub->add_option("--out", cfg.output, "Output file or directory");
    sub->add_option("--tol", cfg.tolerance, "Relative compliance tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--n", cfg.n, "Tessellation / sampling density")->check(CLI::PositiveNumber);
    sub->add_option("--pattern", pattern, "Cell split pattern")
        ->check(CLI::IsMember({"main", "anti", "alt", "zigzag"}));
    sub->add_option("--direction", direction, "Conversion direction")->check(CLI::IsMember({"b2h", "h2b"}));
    sub->add_flag("--json", cfg.json, "Emit the report as JSON");
    sub->add_flag("--normals", cfg.normals, "Include vertex normals in OBJ output");
    sub->add_flag("--merge", cfg.merge, "Write all patches into one OBJ");
    sub->add_flag("--roundtrip", cfg.roundtrip, "Convert both ways and report the error");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::kInputError;
  }

  cfg.command = *parse_command(app.get_subcommands().front()->get_name());
  cfg.pattern = *parse_pattern(pattern);
  cfg.direction = direction == "h2b" ? ConvertDirection::HermiteToBezier : ConvertDirection::BezierToHermite;

  const CommandResult result = run_command(cfg);
  (result.exit_code == exit_code::kInputError || result.exit_code == exit_code::kInternalError ? std::cerr
                                                                                               : std::cout)
      << result.report;
  return result.exit_code;
}
