#pragma once

#include "wqg/spectral_basis.hpp"

#include "json.hpp"

#include <string>

namespace wqg {

// Run description. The config file is `key = value` lines with '#' comments; the
// keys are exactly the field names below.
struct SimConfig {
  double a = 0.5;
  std::string domain = "torus";  // torus | rectangle
  double lx = 2.0 * 3.14159265358979323846;
  double ly = 2.0 * 3.14159265358979323846;
  int n = 16;            // Galerkin cutoff; also the mollifier index unless overridden
  double mollifier_n = 0.0;  // > 0 overrides the mollifier index
  int M = 128;           // vertical cells
  double z_max = 0.0;    // 0 selects the top where the slowest mode decays to 1e-8
  std::string grading = "profile";  // nodes uniform in z^{1-a}
  int grid = 0;          // horizontal points per axis; 0 selects spacing <= 1/mollifier_index
  double dt = 0.0;       // 0 selects min(cell / max|V|, 0.1 k_n^{-alpha}) each step
  double T = 1.0;
  std::string F0 = "0";      // expression in x1, x2, z, or file:<snapshot>
  std::string theta0 = "0";  // expression in x1, x2, or file:<snapshot>
  std::string diagnostics_csv = "diagnostics.csv";
  std::string summary_json = "summary.json";
  std::string snapshot;      // final-state snapshot path; empty for none
  double output_interval = 0.0;  // 0 writes every step
  std::string picard = "off";    // off | on
  int picard_max_iters = 8;
  double picard_tol = 1e-10;
  int threads = 0;               // 0 leaves the OpenMP default

  DomainSpec domain_spec() const;
  double mollifier_index() const { return mollifier_n > 0.0 ? mollifier_n : static_cast<double>(n); }
  bool picard_enabled() const { return picard == "on"; }

  void validate() const;
};

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string to_text(const SimConfig& cfg);
void to_json(nlohmann::json& j, const SimConfig& cfg);

}  // namespace wqg
