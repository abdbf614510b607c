#include "wqg/boundary_sqg.hpp"

#include "wqg/errors.hpp"

#include <algorithm>
#include <cmath>

namespace wqg {

BoundaryForcing BoundaryForcing::none(const GridPtr& grid, const BasisPtr& basis) {
  BoundaryForcing f;
  f.v.u1 = Eigen::VectorXd::Zero(grid->points());
  f.v.u2 = Eigen::VectorXd::Zero(grid->points());
  f.f = SpectralField(basis);
  return f;
}

BoundaryForcing BoundaryForcing::from_trace(const GridPtr& grid, const SpectralField& h) {
  BoundaryForcing f;
  f.v = perp_gradient(grid, h);
  f.f = SpectralField(h.basis(), -h.basis()->eigenvalues().cwiseProduct(h.coeffs()));
  return f;
}

SpectralField nonlinear_term(const SpectralField& theta, const BoundaryForcing& forcing, double alpha, const GridPtr& grid) {
  if (theta.size() != grid->basis()->size()) throw MismatchError("boundary field does not match the grid basis");
  if (forcing.v.u1.size() != grid->points()) throw MismatchError("boundary velocity does not match the grid");
  const Eigen::VectorXd& k = theta.basis()->eigenvalues();
  Eigen::VectorXd induced(theta.size());
  for (int i = 0; i < theta.size(); ++i) induced[i] = std::pow(k[i], alpha - 1.0) * theta.coeffs()[i];
  const Eigen::VectorXd u1 = forcing.v.u1 - grid->d2() * induced;
  const Eigen::VectorXd u2 = forcing.v.u2 + grid->d1() * induced;
  const Eigen::VectorXd t1 = grid->d1() * theta.coeffs();
  const Eigen::VectorXd t2 = grid->d2() * theta.coeffs();
  const Eigen::VectorXd prod = u1.cwiseProduct(t1) + u2.cwiseProduct(t2);
  return project(grid, prod);
}

BoundaryState step_theta(const BoundaryState& state, const BoundaryForcing& forcing, double dt, const GridPtr& grid) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const Eigen::VectorXd& k = state.theta.basis()->eigenvalues();
  const int n = state.theta.size();
  Eigen::VectorXd e_half(n);
  Eigen::VectorXd e_full(n);
  for (int i = 0; i < n; ++i) {
    const double rate = std::pow(k[i], state.alpha);
    e_half[i] = std::exp(-rate * 0.5 * dt);
    e_full[i] = std::exp(-rate * dt);
  }
  auto rhs = [&](const SpectralField& th) {
    SpectralField r = forcing.f;
    r -= nonlinear_term(th, forcing, state.alpha, grid);
    return r;
  };
  const SpectralField n0 = rhs(state.theta);
  SpectralField mid(state.theta.basis(), e_half.cwiseProduct(state.theta.coeffs() + 0.5 * dt * n0.coeffs()));
  const SpectralField n1 = rhs(mid);
  BoundaryState out = state;
  out.theta.coeffs() = e_full.cwiseProduct(state.theta.coeffs()) + dt * e_half.cwiseProduct(n1.coeffs());
  out.t = state.t + dt;
  if (!out.theta.coeffs().allFinite()) throw BlowUpError("boundary state became non-finite");
  return out;
}

LedgerEntry ledger_entry(const BoundaryState& state, const SpectralField& f) {
  LedgerEntry e;
  e.t = state.t;
  const double th = l2_norm(state.theta);
  e.theta_l2_sq = th * th;
  const double ha = sobolev_norm(state.theta, state.alpha);
  e.theta_halpha_sq = ha * ha;
  const double fm = sobolev_norm(f, -state.alpha);
  e.forcing_hmalpha_sq = fm * fm;
  return e;
}

void EnergyLedger::add(const LedgerEntry& e) {
  if (!has_) {
    has_ = true;
    first_ = e;
    last_ = e;
    residual_ = 0.0;
    min_ = 0.0;
    scale_ = e.theta_l2_sq;
    return;
  }
  if (!(e.t >= last_.t)) throw ConfigError("ledger entries must be in time order");
  const double dt = e.t - last_.t;
  int_f_ += 0.5 * dt * (e.forcing_hmalpha_sq + last_.forcing_hmalpha_sq);
  int_theta_ += 0.5 * dt * (e.theta_halpha_sq + last_.theta_halpha_sq);
  residual_ = first_.theta_l2_sq + int_f_ - e.theta_l2_sq - int_theta_;
  min_ = std::min(min_, residual_);
  scale_ = std::max({scale_, first_.theta_l2_sq + int_f_, e.theta_l2_sq + int_theta_});
  last_ = e;
}

LedgerResult energy_ledger(const std::vector<LedgerEntry>& history) {
  LedgerResult out;
  EnergyLedger ledger;
  for (const auto& e : history) {
    ledger.add(e);
    out.residuals.push_back(ledger.residual());
  }
  out.min_residual = ledger.min_residual();
  out.scale = ledger.scale();
  return out;
}

}  // namespace wqg
