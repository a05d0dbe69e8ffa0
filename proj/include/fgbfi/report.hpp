#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fgbfi/analysis.hpp"
#include "fgbfi/lyapunov.hpp"
#include "fgbfi/numerics.hpp"
#include "fgbfi/trajectory.hpp"

namespace fgbfi {

/// Hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

/// Everything that determines a command's output. Serialized with sorted keys, so
/// equal inputs give equal fingerprints; no timestamps or paths of the host go in.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> inputs;  // system source, parameters, precision, T, grids ...
  std::map<std::string, std::string> results;  // summary values, not hashed
  std::vector<std::string> artifacts;

  /// First 16 hex digits of the SHA-256 over command + inputs.
  std::string fingerprint() const;
  std::string to_json() const;
};

/// Comment lines ("# key: value") that open every exported table.
void write_header(std::ostream& out, const RunManifest& manifest, std::string_view title);

/// Columns t, x_1..x_n, degree. Times keep their sign (negative for backward runs).
void write_trajectory(std::ostream& out, const RunManifest& manifest,
                      const std::vector<std::string>& labels, std::span<const Sample> samples,
                      int digits);

/// "key: value" lines covering every field of the report.
void write_verification(std::ostream& out, const RunManifest& manifest,
                        const VerificationReport& report, int digits);

/// Table-1 layout: n, t_n, x_1..x_n, rho, plus a summary comment with the even spacing.
void write_returns(std::ostream& out, const RunManifest& manifest,
                   const std::vector<std::string>& labels, std::span<const ReturnEvent> events,
                   int digits);

/// Table-2 layout: step, error; the fitted order goes in a trailing comment.
void write_rk4_table(std::ostream& out, const RunManifest& manifest,
                     std::span<const RK4Comparison> rows, std::optional<double> order);

/// Tables-5/6 layout: group, lambda_1..lambda_n (algorithm order), D_KY.
void write_spectrum(std::ostream& out, const RunManifest& manifest,
                    std::span<const LyapunovResult> results, int digits);

}  // namespace fgbfi
