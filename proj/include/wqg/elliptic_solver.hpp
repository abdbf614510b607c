#pragma once

#include "wqg/zgrid.hpp"

#include <Eigen/Dense>

namespace wqg {

// Solves -d_z(z^a d_z psi) + k psi = phi on (0, z_max) with zero weighted flux at
// z = 0 and psi(z_max) = 0, i.e. -Delta_lambda u = f for one horizontal mode.
//
// Galerkin form on the s-mesh with lumped mass: (K + k Q) psi = Q phi, where K is
// the P1 stiffness of (1-a) int psi_s v_s ds and Q = diag(q_j). The zero-flux
// condition is natural; no lambda value at z = 0 is ever formed.
Eigen::VectorXd solve_mode(double k, const Eigen::Ref<const Eigen::VectorXd>& phi, const ZGrid& zgrid);

// Mode-by-mode solve of -Delta_lambda u = f, gamma_lambda u = 0.
LayeredField solve_neumann(const LayeredField& f);

struct GradientEnergy {
  double grad = 0.0;       // ||grad_{sqrt(lambda)} u||
  double grad_grad = 0.0;  // ||grad_bar grad_{sqrt(lambda)} u||
  double laplacian = 0.0;  // ||Delta_lambda u|| over interior nodes 0 < j < M
};

GradientEnergy gradient_energy(const LayeredField& u);

// Discrete Delta_lambda, mode by mode (see weighted_laplacian_mode).
LayeredField weighted_laplacian(const LayeredField& u);

}  // namespace wqg
