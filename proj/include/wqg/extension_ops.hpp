#pragma once

#include "wqg/profile_ode.hpp"
#include "wqg/spectral_basis.hpp"
#include "wqg/zgrid.hpp"

#include <array>
#include <memory>
#include <vector>

namespace wqg {

// beta = (1-a)/(2-a), the order of the boundary operator k^beta.
inline double extension_order(double a) { return (1.0 - a) / (2.0 - a); }

// Vertical mesh whose top satisfies Z_1(z_max) <= decay for the slowest mode k_min.
ZGridPtr make_extension_zgrid(double a, double k_min, int M, const WProfile& profile, double decay = 1e-8);

// Per-mode harmonic profiles Z_i(z) = W(c k_i^beta z^{1-a}) on a vertical mesh.
//
// The rescaling constant c = (1-a)^{-2(1-a)/(2-a)} makes Z_i solve
// d_z(z^a d_z Z) = k Z exactly. The flux is then z^a Z' = (1-a) c k^beta W'(w), so
// the Dirichlet-to-Neumann symbol is kappa k^beta with
//   kappa = (1-a) c (-W'(0)) = (1-a)^{a/(2-a)} (-W'(0)).
class ExtensionBasis {
 public:
  ExtensionBasis(BasisPtr basis, ZGridPtr zgrid, std::shared_ptr<const WProfile> profile);

  const BasisPtr& basis() const { return basis_; }
  const ZGridPtr& zgrid() const { return zgrid_; }
  const WProfile& profile() const { return *profile_; }
  double a() const { return profile_->a; }
  double beta() const { return extension_order(profile_->a); }
  double scale() const { return c_; }
  double kappa() const { return kappa_; }

  // (M+1) x n table of Z_i(z_j).
  const Eigen::MatrixXd& values() const { return z_; }

  // Measured symbols gamma_lambda(Z_i), i.e. the discrete DtN map on each mode.
  const Eigen::VectorXd& measured_symbol() const { return sigma_; }
  Eigen::VectorXd analytic_symbol() const;

  // Spacing of the vertical mesh in the profile variable w for mode i.
  double w_spacing(int i) const;
  // Modes whose w-spacing is too coarse for the flux extrapolation.
  std::vector<int> under_resolved_modes(double max_spacing = 0.25) const;

  // max_i of laplacian_defect(Z_i).
  double discrete_residual() const;

 private:
  BasisPtr basis_;
  ZGridPtr zgrid_;
  std::shared_ptr<const WProfile> profile_;
  double c_ = 1.0;
  double kappa_ = 1.0;
  Eigen::MatrixXd z_;
  Eigen::VectorXd sigma_;
};

using ExtensionPtr = std::shared_ptr<const ExtensionBasis>;

ExtensionPtr build_extension_basis(BasisPtr basis, ZGridPtr zgrid, std::shared_ptr<const WProfile> profile);

// E_2: u(0) = h, Delta_lambda u = 0; per mode u_i(z) = h_i Z_i(z).
LayeredField dirichlet_extend(const SpectralField& h, const ExtensionBasis& eb);

// E_1: gamma_lambda u = theta, Delta_lambda u = 0. Each mode's Dirichlet datum is
// theta_i divided by the measured symbol of that mode.
LayeredField neumann_extend(const SpectralField& theta, const ExtensionBasis& eb);

// gamma_lambda o E_2.
SpectralField dtn_map(const SpectralField& h, const ExtensionBasis& eb);

// gamma_0: the z = 0 layer.
SpectralField trace_dirichlet(const LayeredField& u);

// gamma_lambda = -lim z^a d_z u. The fluxes -(1-a)(u_{j+1}-u_j)/ds are the exact
// means of -z^a u_z over the three lowest cells. Since d_s(z^a u_z) = s^p g(s) with
// g smooth, the flux is fitted as f0 + b1 s^{p+1} + b2 s^{p+2} and f0 is returned.
SpectralField trace_neumann(const LayeredField& u);

// Weights of the three lowest cell fluxes in that fit.
std::array<double, 3> flux_extrapolation_weights(double p);

// Weighted energy ||grad_{sqrt(lambda)} u||_{L^2}^2 = sum_i [(1-a) int (u_i)_s^2 ds + k_i sum_j q_j u_ij^2].
double weighted_energy(const LayeredField& u);

// ||gamma_0 u||_{H^beta} / ||grad_{sqrt(lambda)} u||; zero when u has no energy.
double trace_ratio(const LayeredField& u);

// Gram matrix of psi_i = k_i^{-beta/2} e_i Z_i under the weighted Dirichlet form,
// with horizontal integrals evaluated by quadrature on the given grid.
Eigen::MatrixXd extension_gram(const ExtensionBasis& eb, const Grid2D& grid);

}  // namespace wqg
