#include "wqg/elliptic_solver.hpp"

#include "wqg/errors.hpp"

#include <cmath>
#include <vector>

namespace wqg {

Eigen::VectorXd solve_mode(double k, const Eigen::Ref<const Eigen::VectorXd>& phi, const ZGrid& zg) {
  if (!(k > 0.0)) throw ConfigError("mode eigenvalue must be positive");
  const int m = zg.M();
  if (phi.size() != m + 1) throw MismatchError("right-hand side does not match the vertical mesh");
  if (!phi.allFinite()) throw ConfigError("non-finite right-hand side");
  const double c = zg.stiffness();
  const Eigen::VectorXd& q = zg.weights();
  // Unknowns u_0..u_{M-1}; u_M = 0.
  std::vector<double> diag(static_cast<std::size_t>(m));
  std::vector<double> off(static_cast<std::size_t>(m), -c);
  std::vector<double> rhs(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    diag[static_cast<std::size_t>(j)] = (j == 0 ? c : 2.0 * c) + k * q[j];
    rhs[static_cast<std::size_t>(j)] = q[j] * phi[j];
  }
  // Thomas algorithm; the matrix is symmetric, diagonally dominant and positive.
  for (int j = 1; j < m; ++j) {
    const double piv = diag[static_cast<std::size_t>(j - 1)];
    if (!(std::abs(piv) > 0.0)) throw SolverError("singular tridiagonal system");
    const double l = off[static_cast<std::size_t>(j - 1)] / piv;
    diag[static_cast<std::size_t>(j)] -= l * off[static_cast<std::size_t>(j - 1)];
    rhs[static_cast<std::size_t>(j)] -= l * rhs[static_cast<std::size_t>(j - 1)];
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m + 1);
  if (!(std::abs(diag[static_cast<std::size_t>(m - 1)]) > 0.0)) throw SolverError("singular tridiagonal system");
  u[m - 1] = rhs[static_cast<std::size_t>(m - 1)] / diag[static_cast<std::size_t>(m - 1)];
  for (int j = m - 2; j >= 0; --j) {
    u[j] = (rhs[static_cast<std::size_t>(j)] - off[static_cast<std::size_t>(j)] * u[j + 1]) / diag[static_cast<std::size_t>(j)];
  }
  return u;
}

LayeredField solve_neumann(const LayeredField& f) {
  LayeredField u(f.basis(), f.zgrid());
  const int n = f.modes();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    u.coeffs().col(i) = solve_mode(f.basis()->eigenvalue(i), f.coeffs().col(i), *f.zgrid());
  }
  return u;
}

LayeredField weighted_laplacian(const LayeredField& u) {
  LayeredField out(u.basis(), u.zgrid());
  for (int i = 0; i < u.modes(); ++i) {
    out.coeffs().col(i) = weighted_laplacian_mode(*u.zgrid(), u.basis()->eigenvalue(i), u.coeffs().col(i));
  }
  return out;
}

GradientEnergy gradient_energy(const LayeredField& u) {
  const ZGrid& zg = *u.zgrid();
  const Eigen::VectorXd& q = zg.weights();
  double g = 0.0;
  double gg = 0.0;
  double lap = 0.0;
  for (int i = 0; i < u.modes(); ++i) {
    const double k = u.basis()->eigenvalue(i);
    const auto col = u.coeffs().col(i);
    const double e = stiffness_form(zg, col, col) + k * mass_form(zg, col, col);
    g += e;
    gg += k * e;
    const Eigen::VectorXd r = weighted_laplacian_mode(zg, k, col);
    for (int j = 1; j < zg.M(); ++j) lap += q[j] * r[j] * r[j];
  }
  return {std::sqrt(g), std::sqrt(gg), std::sqrt(lap)};
}

}  // namespace wqg
