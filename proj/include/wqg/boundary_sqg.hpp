#pragma once

#include "wqg/spectral_basis.hpp"

#include <vector>

namespace wqg {

// alpha = 1/(2-a), the order of the boundary dissipation Lambda^{2 alpha}.
inline double dissipation_order(double a) { return 1.0 / (2.0 - a); }

struct BoundaryState {
  SpectralField theta;
  double t = 0.0;
  double alpha = 0.5;
};

// Interior forcing seen by the boundary: the transporting velocity v (gridded on
// the product grid) and the source f.
struct BoundaryForcing {
  GridVelocity v;
  SpectralField f;

  static BoundaryForcing none(const GridPtr& grid, const BasisPtr& basis);
  // v = grad_perp h and f = Laplacian h = -k h, for the trace h of the interior stream function.
  static BoundaryForcing from_trace(const GridPtr& grid, const SpectralField& h);
};

// P_n((v + grad_perp (-Laplacian)^{alpha-1} theta) . grad theta), with products
// formed on a grid fine enough that the projection is free of aliasing.
SpectralField nonlinear_term(const SpectralField& theta, const BoundaryForcing& forcing, double alpha, const GridPtr& grid);

// Integrating-factor midpoint step with E(t) = exp(-k^alpha t) and
// N(theta) = -nonlinear_term(theta) + f:
//   theta* = E(dt/2) (theta + dt/2 N(theta))
//   theta' = E(dt) theta + dt E(dt/2) N(theta*)
BoundaryState step_theta(const BoundaryState& state, const BoundaryForcing& forcing, double dt, const GridPtr& grid);

struct LedgerEntry {
  double t = 0.0;
  double theta_l2_sq = 0.0;       // ||theta||^2
  double theta_halpha_sq = 0.0;   // ||theta||^2_{H^alpha}
  double forcing_hmalpha_sq = 0.0;  // ||f||^2_{H^-alpha}
};

LedgerEntry ledger_entry(const BoundaryState& state, const SpectralField& f);

struct LedgerResult {
  double min_residual = 0.0;
  double scale = 0.0;
  std::vector<double> residuals;
};

// Residuals ||theta_0||^2 + int ||f||^2_{H^-alpha} - ||theta(t)||^2 - int ||theta||^2_{H^alpha}
// at each checkpoint, with trapezoidal time integrals. The entries must be in
// increasing time order.
LedgerResult energy_ledger(const std::vector<LedgerEntry>& history);

// Running form of the ledger for long runs.
class EnergyLedger {
 public:
  void add(const LedgerEntry& e);
  double residual() const { return residual_; }
  double min_residual() const { return min_; }
  double scale() const { return scale_; }
  bool empty() const { return !has_; }

 private:
  bool has_ = false;
  LedgerEntry first_;
  LedgerEntry last_;
  double int_f_ = 0.0;
  double int_theta_ = 0.0;
  double residual_ = 0.0;
  double min_ = 0.0;
  double scale_ = 0.0;
};

}  // namespace wqg
