#include "wqg/extension_ops.hpp"

#include "wqg/errors.hpp"

#include <array>
#include <cmath>

namespace wqg {

ZGridPtr make_extension_zgrid(double a, double k_min, int M, const WProfile& profile, double decay) {
  if (profile.a != a) throw ConfigError("profile and vertical mesh use different a");
  const double beta = extension_order(a);
  const double c = std::pow(1.0 - a, -2.0 * (1.0 - a) / (2.0 - a));
  const double w_top = profile.decay_point(decay);
  const double s_top = w_top / (c * std::pow(k_min, beta));
  return std::make_shared<const ZGrid>(a, std::pow(s_top, 1.0 / (1.0 - a)), M);
}

ExtensionBasis::ExtensionBasis(BasisPtr basis, ZGridPtr zgrid, std::shared_ptr<const WProfile> profile)
    : basis_(std::move(basis)), zgrid_(std::move(zgrid)), profile_(std::move(profile)) {
  const double a = profile_->a;
  if (a != zgrid_->a()) throw ConfigError("profile and vertical mesh use different a");
  c_ = std::pow(1.0 - a, -2.0 * (1.0 - a) / (2.0 - a));
  kappa_ = (1.0 - a) * c_ * profile_->kappa;
  const int n = basis_->size();
  const int nz = zgrid_->nodes();
  z_.resize(nz, n);
  const double b = beta();
  for (int i = 0; i < n; ++i) {
    const double scale = c_ * std::pow(basis_->eigenvalue(i), b);
    for (int j = 0; j < nz; ++j) z_(j, i) = profile_->value(scale * zgrid_->s(j));
  }
  LayeredField probe(basis_, zgrid_, z_);
  sigma_ = trace_neumann(probe).coeffs();
}

Eigen::VectorXd ExtensionBasis::analytic_symbol() const {
  Eigen::VectorXd s(basis_->size());
  for (int i = 0; i < s.size(); ++i) s[i] = kappa_ * std::pow(basis_->eigenvalue(i), beta());
  return s;
}

double ExtensionBasis::w_spacing(int i) const { return c_ * std::pow(basis_->eigenvalue(i), beta()) * zgrid_->ds(); }

std::vector<int> ExtensionBasis::under_resolved_modes(double max_spacing) const {
  std::vector<int> out;
  for (int i = 0; i < basis_->size(); ++i) {
    if (w_spacing(i) > max_spacing) out.push_back(i);
  }
  return out;
}

double ExtensionBasis::discrete_residual() const {
  double worst = 0.0;
  for (int i = 0; i < basis_->size(); ++i) {
    worst = std::max(worst, laplacian_defect(*zgrid_, basis_->eigenvalue(i), z_.col(i)));
  }
  return worst;
}

ExtensionPtr build_extension_basis(BasisPtr basis, ZGridPtr zgrid, std::shared_ptr<const WProfile> profile) {
  return std::make_shared<const ExtensionBasis>(std::move(basis), std::move(zgrid), std::move(profile));
}

LayeredField dirichlet_extend(const SpectralField& h, const ExtensionBasis& eb) {
  if (h.size() != eb.basis()->size()) throw MismatchError("boundary datum does not match the extension basis");
  Eigen::MatrixXd c = eb.values() * h.coeffs().asDiagonal();
  return LayeredField(eb.basis(), eb.zgrid(), std::move(c));
}

LayeredField neumann_extend(const SpectralField& theta, const ExtensionBasis& eb) {
  if (theta.size() != eb.basis()->size()) throw MismatchError("boundary datum does not match the extension basis");
  Eigen::VectorXd h = theta.coeffs().cwiseQuotient(eb.measured_symbol());
  return dirichlet_extend(SpectralField(eb.basis(), h), eb);
}

SpectralField dtn_map(const SpectralField& h, const ExtensionBasis& eb) { return trace_neumann(dirichlet_extend(h, eb)); }

SpectralField trace_dirichlet(const LayeredField& u) { return u.layer(0); }

std::array<double, 3> flux_extrapolation_weights(double p) {
  // Cell means of 1, s^{p+1}, s^{p+2} over the cells [j, j+1], j = 0, 1, 2 (ds = 1).
  Eigen::Matrix3d m;
  for (int j = 0; j < 3; ++j) {
    m(j, 0) = 1.0;
    for (int c = 1; c < 3; ++c) {
      const double q = p + c;
      m(j, c) = (std::pow(j + 1.0, q + 1.0) - std::pow(static_cast<double>(j), q + 1.0)) / (q + 1.0);
    }
  }
  const Eigen::RowVector3d w = m.inverse().row(0);
  return {w[0], w[1], w[2]};
}

SpectralField trace_neumann(const LayeredField& u) {
  const ZGrid& zg = *u.zgrid();
  if (zg.M() < 3) throw ConfigError("weighted Neumann trace needs at least three cells");
  const double c = zg.stiffness();
  const auto l = flux_extrapolation_weights(zg.p());
  const Eigen::MatrixXd& m = u.coeffs();
  Eigen::VectorXd g(u.modes());
  for (int i = 0; i < u.modes(); ++i) {
    const double f0 = -c * (m(1, i) - m(0, i));
    const double f1 = -c * (m(2, i) - m(1, i));
    const double f2 = -c * (m(3, i) - m(2, i));
    g[i] = l[0] * f0 + l[1] * f1 + l[2] * f2;
  }
  return SpectralField(u.basis(), g);
}

double weighted_energy(const LayeredField& u) {
  const ZGrid& zg = *u.zgrid();
  double sum = 0.0;
  for (int i = 0; i < u.modes(); ++i) {
    const auto col = u.coeffs().col(i);
    sum += stiffness_form(zg, col, col) + u.basis()->eigenvalue(i) * mass_form(zg, col, col);
  }
  return sum;
}

double trace_ratio(const LayeredField& u) {
  const double e = std::sqrt(weighted_energy(u));
  if (e == 0.0) return 0.0;
  return sobolev_norm(trace_dirichlet(u), extension_order(u.zgrid()->a())) / e;
}

Eigen::MatrixXd extension_gram(const ExtensionBasis& eb, const Grid2D& grid) {
  const int n = eb.basis()->size();
  const Eigen::VectorXd& w = grid.omega_weights();
  const Eigen::MatrixXd ee = grid.values().transpose() * w.asDiagonal() * grid.values();
  const Eigen::MatrixXd gg = grid.d1().transpose() * w.asDiagonal() * grid.d1() +
                             grid.d2().transpose() * w.asDiagonal() * grid.d2();
  const ZGrid& zg = *eb.zgrid();
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) scale[i] = std::pow(eb.basis()->eigenvalue(i), -0.5 * eb.beta());
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto zi = eb.values().col(i);
      const auto zj = eb.values().col(j);
      g(i, j) = scale[i] * scale[j] * (ee(i, j) * stiffness_form(zg, zi, zj) + gg(i, j) * mass_form(zg, zi, zj));
    }
  }
  return g;
}

}  // namespace wqg
