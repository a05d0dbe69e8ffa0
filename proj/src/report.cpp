#include "fgbfi/report.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "fgbfi/errors.hpp"

namespace fgbfi {

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
  return hex.str();
}

std::string RunManifest::fingerprint() const {
  // std::map keeps keys sorted, so dump() is canonical.
  const nlohmann::json hashed{{"command", command}, {"inputs", inputs}};
  return sha256_hex(hashed.dump()).substr(0, 16);
}

std::string RunManifest::to_json() const {
  nlohmann::json j{{"command", command},
                   {"inputs", inputs},
                   {"results", results},
                   {"artifacts", artifacts},
                   {"fingerprint", fingerprint()}};
  return j.dump(2) + "\n";
}

void write_header(std::ostream& out, const RunManifest& manifest, std::string_view title) {
  out << "# " << title << "\n";
  out << "# fingerprint: " << manifest.fingerprint() << "\n";
  for (const auto& [key, value] : manifest.inputs) out << "# " << key << ": " << value << "\n";
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << "\n";
}

std::vector<std::string> coordinate_columns(const std::vector<std::string>& labels,
                                            std::size_t n) {
  std::vector<std::string> cols;
  for (std::size_t i = 0; i < n; ++i)
    cols.push_back(i < labels.size() && !labels[i].empty() ? labels[i] : "x" + std::to_string(i + 1));
  return cols;
}

std::string join_state(std::span<const Real> x, int digits) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + x[i].to_fixed(digits);
  return s;
}

}  // namespace

void write_trajectory(std::ostream& out, const RunManifest& manifest,
                      const std::vector<std::string>& labels, std::span<const Sample> samples,
                      int digits) {
  write_header(out, manifest, "trajectory");
  const std::size_t n = samples.empty() ? labels.size() : samples.front().state.size();
  std::vector<std::string> head{"t"};
  for (auto& c : coordinate_columns(labels, n)) head.push_back(c);
  head.push_back("degree");
  write_row(out, head);

  std::vector<std::string> row;
  for (const auto& s : samples) {
    row.clear();
    row.push_back(s.time.to_fixed(digits));
    for (const auto& x : s.state) row.push_back(x.to_fixed(digits));
    row.push_back(std::to_string(s.degree));
    write_row(out, row);
  }
}

void write_verification(std::ostream& out, const RunManifest& manifest,
                        const VerificationReport& report, int digits) {
  write_header(out, manifest, "round-trip verification");
  out << "initial: " << join_state(report.initial, digits) << "\n";
  out << "forward_endpoint: " << join_state(report.forward_endpoint, digits) << "\n";
  out << "backward_endpoint: " << join_state(report.backward_endpoint, digits) << "\n";
  out << "deviation:";
  for (const auto& d : report.deviation) out << " " << d.to_scientific(3);
  out << "\n";
  out << "max_deviation: " << report.max_deviation.to_scientific(3) << "\n";
  out << "tolerance: " << report.tolerance.to_scientific(3) << "\n";
  out << "forward_steps: " << report.forward.step_count << "\n";
  out << "forward_degrees: " << report.forward.min_degree << ".." << report.forward.max_degree << "\n";
  out << "backward_steps: " << report.backward.step_count << "\n";
  out << "backward_degrees: " << report.backward.min_degree << ".." << report.backward.max_degree
      << "\n";
  out << "passed: " << (report.passed ? "true" : "false") << "\n";
}

void write_returns(std::ostream& out, const RunManifest& manifest,
                   const std::vector<std::string>& labels, std::span<const ReturnEvent> events,
                   int digits) {
  write_header(out, manifest, "returns to the initial point");
  const std::size_t n = events.empty() ? labels.size() : events.front().state.size();
  std::vector<std::string> head{"n", "t"};
  for (auto& c : coordinate_columns(labels, n)) head.push_back(c);
  head.push_back("rho");
  write_row(out, head);
  for (const auto& e : events) {
    std::vector<std::string> row{std::to_string(e.index), e.time.to_fixed(3)};
    for (const auto& x : e.state) row.push_back(x.to_fixed(digits));
    row.push_back(e.rho.to_fixed(6));
    write_row(out, row);
  }
  if (auto spacing = even_return_spacing(events)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", *spacing);
    out << "# even-index spacing: " << buf << "\n";
  }
}

void write_rk4_table(std::ostream& out, const RunManifest& manifest,
                     std::span<const RK4Comparison> rows, std::optional<double> order) {
  write_header(out, manifest, "RK4 error against the power-series endpoint");
  write_row(out, {"step", "error"});
  for (const auto& r : rows) write_row(out, {r.step.to_string(), r.error.to_scientific(6)});
  if (order) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", *order);
    out << "# fitted order: " << buf << "\n";
  }
}

void write_spectrum(std::ostream& out, const RunManifest& manifest,
                    std::span<const LyapunovResult> results, int digits) {
  write_header(out, manifest, "Lyapunov spectrum");
  const std::size_t m = results.empty() ? 0 : results.front().exponents.size();
  std::vector<std::string> head{"group"};
  for (std::size_t i = 0; i < m; ++i) head.push_back("lambda" + std::to_string(i + 1));
  head.push_back("D_KY");
  head.push_back("stabilized");
  write_row(out, head);
  for (const auto& r : results) {
    std::vector<std::string> row{r.group};
    for (const auto& l : r.exponents) row.push_back(l.to_fixed(digits));
    std::string dky;
    try {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f", r.kaplan_yorke());
      dky = buf;
    } catch (const ConfigError&) {
      dky = "degenerate";
    }
    row.push_back(dky);
    row.push_back(r.stabilized() ? "yes" : "no");
    write_row(out, row);
  }
}

}  // namespace fgbfi
