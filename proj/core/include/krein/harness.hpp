#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "krein/config.hpp"
#include "krein/robin.hpp"

namespace krein {

/// One Birman-Schwinger cross-check: eigenvalues of A_B in a region found
/// by robin_eigs, compared against an oracle.
///   zero    B = 0, the expected set is empty
///   random  `draws` complex B with entries uniform in [-scale, scale]^2,
///           oracle: dense eigensolve (fd1d only)
///   scalar  B = beta I for each beta, oracle: disk_robin_reference for
///           modes k <= k_limit (interior disk with V = 0 only). An empty
///           region is replaced by [0.5, max reference + 2] x [-2, 2].
struct BsCase {
  Index model = 0;
  Region region{-40.0, 120.0, -15.0, 15.0};
  ScanGrid grid{161, 31};
  std::string b_kind = "random";
  int draws = 5;
  double scale = 2.0;
  std::vector<double> betas{-1.0, 0.5, 1.0, 3.0};
  int k_limit = 4;

  bool operator==(const BsCase&) const = default;
};

struct SuiteConfig {
  std::vector<ModelSpec> models;
  /// Real spectral parameters. For each model the grid is shifted down, if
  /// needed, so that its largest point sits 1/2 below the model's certified
  /// threshold; spacing is preserved.
  std::vector<double> lambda_grid{-2.0, -3.5, -5.0, -7.0, -10.0, -14.0, -20.0, -30.0, -50.0, -80.0};
  std::vector<BsCase> complex_scan_regions;
  /// Decay study points; those at or above a model's threshold are dropped.
  std::vector<double> decay_lambdas;
  /// Per-check tolerance overrides by check name; "*" overrides every check.
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 20240611;
  /// Worker cap; 0 uses the hardware concurrency.
  unsigned jobs = 0;
  int random_pairs = 100;
  int identity_samples = 20;

  /// fd1d (n = 256) with a complex smooth potential, V = 0 and a singular
  /// L^2 potential |x - 1/2|^-0.45, a B = 0 scan and five random B on the
  /// first, decay points -4 * 10^(j/3), j = 0..9.
  static SuiteConfig defaults();

  /// Throws InvalidArgument: empty model list, bad model index, negative
  /// tolerance, empty region, nonpositive counts.
  void validate() const;

  bool operator==(const SuiteConfig&) const = default;
};

/// Unknown keys are rejected; missing keys keep the defaults() values, with
/// "models" and "complex_scan_regions" replaced wholesale when present.
SuiteConfig parse_suite_config(std::string_view json);
std::string to_json(const SuiteConfig& config);

struct CheckRecord {
  std::string check;
  std::string model;
  std::string parameters;
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  bool operator==(const CheckRecord&) const = default;
};

/// pass is defect <= tolerance; NaN defects fail.
CheckRecord make_record(std::string check, std::string model, std::string parameters, double defect,
                        double tolerance, std::string note = {});

struct DecaySample {
  std::string model;
  double lambda = 0.0;
  double weyl_norm = 0.0;

  bool operator==(const DecaySample&) const = default;
};

struct DecayFit {
  std::string model;
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double log_constant = 0.0;
  double residual = 0.0;

  bool operator==(const DecayFit&) const = default;
};

struct EigenvalueComparison {
  std::string model;
  std::string label;
  std::vector<Complex> found;
  std::vector<Complex> expected;
  double distance = 0.0;

  bool operator==(const EigenvalueComparison&) const = default;
};

struct VerificationReport {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;
  std::vector<DecaySample> decay_samples;
  std::vector<DecayFit> decay_fits;
  std::vector<EigenvalueComparison> eigenvalues;
  /// Build and library metadata; identical across runs of the same binary.
  std::map<std::string, std::string> environment;
  /// Wall-clock seconds per section. Not part of the default JSON.
  std::map<std::string, double> timings;

  std::size_t passed() const;
  std::size_t failed() const;
  bool ok() const { return failed() == 0; }
  void merge(VerificationReport&& other);

  bool operator==(const VerificationReport&) const = default;
};

/// Every triple_core invariant, by the check name the identity suite files
/// it under.
const std::vector<std::string>& core_invariant_checks();

/// Tolerance for `check` on a model of `kind`, after overrides.
double check_tolerance(const SuiteConfig& config, std::string_view check, std::string_view kind);

/// Identity checks for every model. Failures and exceptions become failing
/// records; nothing is thrown after validation.
VerificationReport run_identity_suite(const SuiteConfig& config);

/// weyl_decay_study per model plus per-mode fits on disk models.
VerificationReport run_decay_suite(const SuiteConfig& config);

/// robin_eigs against the oracles of each BsCase, with Krein-vs-dense
/// resolvent residuals for the random fd1d draws.
VerificationReport run_bs_cross_check(const SuiteConfig& config);

/// All three sections merged in the order identity, decay, bs.
VerificationReport run_full_suite(const SuiteConfig& config);

/// JSON report (schema "krein.report", version 1). Non-finite numbers are
/// written as "inf", "-inf", "nan".
std::string to_json(const VerificationReport& report, bool include_timings = false);
VerificationReport report_from_json(std::string_view json);

/// One row per record: check,model,parameters,defect,tolerance,pass,note.
std::string to_csv(const VerificationReport& report);

/// model,lambda,weyl_norm rows followed by one line per fit:
///   exponent=<value>±<stderr>;model=<label>
std::string decay_csv(const VerificationReport& report);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

}  // namespace krein
