#pragma once

#include "wqg/boundary_sqg.hpp"
#include "wqg/extension_ops.hpp"
#include "wqg/profile_ode.hpp"
#include "wqg/sim_config.hpp"
#include "wqg/snapshot.hpp"
#include "wqg/transport.hpp"
#include "wqg/zgrid.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wqg {

// Immutable objects shared by every step of a run.
struct SimContext {
  SimConfig cfg;
  BasisPtr basis;
  GridPtr grid;  // collocation and transport grid (with margin on the rectangle)
  std::shared_ptr<const WProfile> profile;
  ZGridPtr zgrid;
  ExtensionPtr extension;
  std::shared_ptr<const Mollifier> mollifier;
  std::shared_ptr<const MollifiedTables> tables;
  double alpha = 0.5;
  double beta = 0.5;

  explicit SimContext(const SimConfig& cfg);
};

struct CoupledState {
  double t = 0.0;
  GriddedField F;
  BoundaryState theta;
  LayeredField psi1;
  LayeredField psi2;
};

// One row of the diagnostics CSV.
struct DiagnosticsRow {
  double t = 0.0;
  double dt = 0.0;
  double F_L2 = 0.0;
  double F_Linf = 0.0;
  double psi_energy = 0.0;          // ||grad_{sqrt(lambda)} (psi1 + psi2)||
  double theta_L2 = 0.0;
  double theta_Halpha = 0.0;
  double ledger_residual = 0.0;
  double layer_mean_drift = 0.0;    // max_j |mean F(z_j)| (torus; 0 on the rectangle)
  double theta_mean = 0.0;          // |mean theta| by grid quadrature (torus)
  double trace_ratio = 0.0;         // ||gamma_0 psi||_{H^beta} / ||grad psi||
  double trace_ratio_kappa = 0.0;   // sqrt(kappa) * trace_ratio, at most 1 in theory
  double gamma_lambda_psi2 = 0.0;   // ||gamma_lambda psi2||_{H^-beta}
  double laplacian_psi1 = 0.0;      // ||Delta_lambda psi1|| over interior nodes
  double gamma_lambda_psi2_rel = 0.0;  // relative to kappa ||gamma_0 psi2||_{H^beta}
  double laplacian_psi1_rel = 0.0;     // max_i laplacian_defect of the psi1 modes
  int picard_iterations = 0;
  double picard_ratio = 0.0;        // largest successive-difference ratio in the step

  static std::string csv_header();
  std::string csv_line() const;
};

struct RunSummary {
  std::string status = "ok";
  int steps = 0;
  double wall_seconds = 0.0;
  DiagnosticsRow initial;
  DiagnosticsRow final;
  double F_Linf_excess = 0.0;       // max_t ||F||_inf(t) - ||F||_inf(0)
  double F_Linf_deficit = 0.0;      // ||F||_inf(0) - min_t ||F||_inf(t)
  double psi_energy_growth = 0.0;   // max_t (E(t) - min_{s<=t} E(s)) / min_{s<=t} E(s)
  double ledger_min = 0.0;
  double ledger_scale = 0.0;
  double max_layer_mean_drift = 0.0;
  double max_theta_mean = 0.0;
  double max_gamma_lambda_psi2 = 0.0;
  double max_laplacian_psi1 = 0.0;
  double max_gamma_lambda_psi2_rel = 0.0;
  double max_laplacian_psi1_rel = 0.0;
  double max_trace_ratio = 0.0;
  double max_trace_ratio_kappa = 0.0;
  double max_picard_ratio = 0.0;
  int dt_halvings = 0;
};

class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg);

  const SimContext& context() const { return *ctx_; }
  const CoupledState& state() const { return state_; }

  // Advances by dt (halving internally on step-size or Picard failures); returns
  // the step actually taken.
  double step(double dt);

  // Default step min(cell / max|V|, 0.1 k_n^{-alpha}) for the current state.
  double default_dt() const;

  DiagnosticsRow diagnostics() const;

  const EnergyLedger& ledger() const { return ledger_; }
  int last_picard_iterations() const { return last_iters_; }
  double last_picard_ratio() const { return last_ratio_; }
  int dt_halvings() const { return halvings_; }

  Snapshot snapshot() const;

 private:
  struct Attempt {
    CoupledState next;
    int iterations = 0;
    double ratio = 0.0;
  };
  Attempt attempt(double dt) const;
  void refresh_stream_functions(CoupledState& s) const;
  SpectralField boundary_source(const LayeredField& psi2) const;

  std::shared_ptr<const SimContext> ctx_;
  CoupledState state_;
  EnergyLedger ledger_;
  int last_iters_ = 0;
  double last_ratio_ = 0.0;
  double last_dt_ = 0.0;
  int halvings_ = 0;
};

// Advances to cfg.T, writing the CSV (one row per output interval), the summary
// JSON and the optional snapshot. The CSV is flushed even when the run fails.
RunSummary run(const SimConfig& cfg);

nlohmann::json summary_json(const SimConfig& cfg, const SimContext& ctx, const RunSummary& s);

}  // namespace wqg
