#pragma once

#include <string>
#include <vector>

#include "kirchhoff/closed_form.hpp"
#include "kirchhoff/spectral_verifier.hpp"

// Command pipelines and report serialization behind the kirchhoff binary.
// Every command resolves to a CliReport; the binary itself only parses flags
// and picks an exit code.  Serialization is lossless: floating-point values
// are written with 17 significant digits, so parse(serialize(r)) == r holds
// field for field, and a fixed key order makes equal reports equal as bytes.

namespace kirchhoff {

struct RunConfig {
  std::string command;  // constants | verify | kernel | spectrum | shoot | sweep
  KirchhoffParams params;
  double lambda = 1.0;
  Vec3 x0 = {0.0, 0.0, 0.0};
  int n = 256;
  int ell_max = 4;
  int sector = 0;
  int count = 6;            // eigenvalues per sector for `spectrum`
  double tol_kernel = 0.0;  // <= 0 selects the adaptive threshold
  std::string format = "json";
  std::string out_path;  // empty writes to stdout
  bool with_timestamp = true;
};

struct SpectrumRow {
  int sector = 0;
  int index = 0;
  double eigenvalue = 0.0;
  bool kernel_flag = false;
  double alignment = 0.0;  // |cos| against the sector's symmetry mode, 0 if none
};

struct CliReport {
  RunConfig config;
  VerificationReport body;
  std::vector<SpectrumRow> spectrum;  // populated by `spectrum` only
  std::string timestamp;              // empty when suppressed
};

bool operator==(const RunConfig& lhs, const RunConfig& rhs);
bool operator==(const SpectrumRow& lhs, const SpectrumRow& rhs);
bool operator==(const IdentityCheck& lhs, const IdentityCheck& rhs);
bool operator==(const ConvergencePoint& lhs, const ConvergencePoint& rhs);
bool operator==(const VerificationReport& lhs, const VerificationReport& rhs);
bool operator==(const CliReport& lhs, const CliReport& rhs);

/// 17-significant-digit rendering; round-trips every finite double through
/// strtod.
std::string format_g17(double x);

/// ISO 8601 UTC, second resolution.
std::string current_timestamp();

/// Closed-form constants against the shooting fixed point.
CliReport cmd_constants(const RunConfig& config);
/// Pointwise residuals, the radial proof chain, and the kernel scan merged.
CliReport cmd_verify(const RunConfig& config);
/// Kernel scan of sectors 0..l_max.
CliReport cmd_kernel(const RunConfig& config);
/// Lowest eigenvalues of one sector, kernel rows flagged.
CliReport cmd_spectrum(const RunConfig& config);
/// Shooting pipeline: bubble reproduction and coefficient rediscovery.
CliReport cmd_shoot(const RunConfig& config);
/// Kernel scan repeated over grid sizes n/2, 3n/4, n.
CliReport cmd_sweep(const RunConfig& config);

/// Dispatch on config.command.  Throws std::domain_error for configurations
/// that violate a precondition (usage errors); pipeline-level failures come
/// back as a FAIL report, with whatever partial results were computed.
CliReport run_command(const RunConfig& config);

std::string serialize_report(const CliReport& report);
CliReport parse_report(const std::string& text);

/// Plot-ready exports.  spectrum_csv lists one eigenvalue per row;
/// checks_csv lists one check per row.  Both are one-way.
std::string spectrum_csv(const CliReport& report);
std::string checks_csv(const CliReport& report);

}  // namespace kirchhoff
