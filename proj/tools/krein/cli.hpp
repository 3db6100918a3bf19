#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krein/config.hpp"
#include "krein/disk.hpp"
#include "krein/harness.hpp"
#include "krein/robin.hpp"

namespace krein::cli {

/// Exit codes of the krein tool.
enum Exit : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kSolverFailure = 3,
  kSpectralSingularity = 4,
};

/// boundary_operator section.
///   zero | neumann   B = 0 (neumann skips the Krein formula entirely)
///   scalar           value * I
///   diagonal         diag(diagonal)
///   matrix           rows of complex entries
///   random           entries uniform in [-scale, scale]^2, drawn from --seed
///   modes            disk only: entries {k, j, value}
struct BoundarySpec {
  std::string kind = "zero";
  Complex value;
  std::vector<Complex> diagonal;
  std::vector<std::vector<Complex>> matrix;
  double scale = 1.0;
  std::vector<ModeEntry> entries;
};

/// rhs section for resolve: ones | random | values.
struct RhsSpec {
  std::string kind = "ones";
  std::vector<Complex> values;
};

struct OutputSpec {
  std::string format = "csv";  // csv | json
};

struct CliConfig {
  ModelSpec model;
  BoundarySpec boundary;
  std::vector<Complex> lambdas;
  std::optional<Region> region;
  ScanGrid grid{161, 31};
  RhsSpec rhs;
  OutputSpec output;
  std::optional<SuiteConfig> suite;
};

/// Sections: model, potential, boundary_operator, lambda, region, rhs,
/// output, suite. Unknown keys anywhere throw InvalidArgument.
CliConfig parse_cli_config(std::string_view json);

/// Runs `krein <args...>` (args excludes the program name). Messages go to
/// `out` and `err`; files go to --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krein::cli
