#include "wqg/verify.hpp"

#include "wqg/boundary_sqg.hpp"
#include "wqg/elliptic_solver.hpp"
#include "wqg/errors.hpp"
#include "wqg/extension_ops.hpp"
#include "wqg/profile_ode.hpp"
#include "wqg/sim_driver.hpp"
#include "wqg/transport.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace wqg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

CheckResult check(const std::string& module, const std::string& name, double value, double threshold,
                  bool upper = true) {
  CheckResult r;
  r.module = module;
  r.name = name;
  r.pass = std::isfinite(value) && (upper ? value <= threshold : value >= threshold);
  r.detail = "value " + num(value) + (upper ? " <= " : " >= ") + num(threshold);
  return r;
}

BasisPtr torus(int n) {
  DomainSpec d;
  d.n = n;
  return make_basis(d);
}

std::vector<CheckResult> spectral_checks() {
  const std::string m = "spectral_basis";
  std::vector<CheckResult> out;
  for (DomainKind kind : {DomainKind::torus, DomainKind::rectangle}) {
    DomainSpec d;
    d.kind = kind;
    d.n = 24;
    d.ly = 3.0;
    const auto basis = make_basis(d);
    const auto grid = Grid2D::for_basis(basis);
    const Eigen::MatrixXd g =
        grid->values().transpose() * grid->omega_weights().asDiagonal() * grid->values();
    const double err = (g - Eigen::MatrixXd::Identity(basis->size(), basis->size())).cwiseAbs().maxCoeff();
    out.push_back(check(m, "orthonormal on the " + to_string(kind) + " grid", err, 1e-12));
    double order = 0.0;
    for (int i = 1; i < basis->size(); ++i) order = std::max(order, basis->eigenvalue(i - 1) - basis->eigenvalue(i));
    out.push_back(check(m, "eigenvalues ascending on the " + to_string(kind), order, 0.0));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    SpectralField f(basis);
    for (int i = 0; i < f.size(); ++i) f.coeffs()[i] = nd(rng);
    const double div = perp_gradient_divergence(grid, f).cwiseAbs().maxCoeff();
    out.push_back(check(m, "perpendicular gradient is divergence free on the " + to_string(kind), div, 1e-12));
  }
  return out;
}

std::vector<CheckResult> profile_checks() {
  const std::string m = "profile_ode";
  std::vector<CheckResult> out;
  const auto p0 = cached_profile(0.0);
  double err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double w = 0.01 * i;
    err = std::max(err, std::abs(p0->value(w) - std::exp(-w)));
  }
  out.push_back(check(m, "a = 0 profile equals exp(-w)", err, 1e-6));
  for (double a : {-0.5, 0.5}) {
    const auto p = cached_profile(a);
    out.push_back(check(m, "J(W) = -W'(0) at a = " + num(a), kappa_identity_check(*p), 1e-5));
    out.push_back(check(m, "ODE residual at a = " + num(a), p->ode_residual(), p->tol));
    out.push_back(check(m, "shooting and sweep slopes agree at a = " + num(a),
                        std::abs(p->C_a - p->table_slope) / p->kappa, 1e-7));
  }
  return out;
}

std::vector<CheckResult> extension_checks() {
  const std::string m = "extension_ops";
  std::vector<CheckResult> out;
  const auto basis = torus(12);
  for (double a : {0.0, 0.5}) {
    const auto prof = cached_profile(a);
    const auto zg = make_extension_zgrid(a, basis->eigenvalues().minCoeff(), 512, *prof);
    const auto eb = build_extension_basis(basis, zg, prof);
    const Eigen::VectorXd rel =
        (eb->measured_symbol() - eb->analytic_symbol()).cwiseQuotient(eb->analytic_symbol()).cwiseAbs();
    out.push_back(check(m, "measured symbol matches kappa k^beta at a = " + num(a), rel.maxCoeff(), 1e-2));
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    SpectralField th(basis);
    for (int i = 0; i < th.size(); ++i) th.coeffs()[i] = nd(rng);
    const SpectralField back = trace_neumann(neumann_extend(th, *eb));
    out.push_back(check(m, "gamma_lambda E_1 = identity at a = " + num(a),
                        (back.coeffs() - th.coeffs()).cwiseAbs().maxCoeff(), 1e-12));
    const LayeredField u = dirichlet_extend(th, *eb);
    out.push_back(check(m, "sqrt(kappa) trace ratio of a harmonic lift at a = " + num(a),
                        std::abs(std::sqrt(eb->kappa()) * trace_ratio(u) - 1.0), 1e-2));
  }
  return out;
}

std::vector<CheckResult> elliptic_checks() {
  const std::string m = "elliptic_solver";
  std::vector<CheckResult> out;
  const double a = 0.5;
  const double k = 2.0;
  const ZGrid zg(a, std::pow(30.0, 1.0 / (1.0 - a)), 128);
  const double p = zg.p();
  Eigen::VectorXd phi(zg.nodes());
  Eigen::VectorXd exact(zg.nodes());
  for (int j = 0; j < zg.nodes(); ++j) {
    const double s = zg.s(j);
    const double e = std::exp(-s);
    exact[j] = e * (1.0 + s + 0.5 * s * s);
    const double pss = -e * (s - 0.5 * s * s);
    phi[j] = j == 0 ? k * exact[j] + (p == 1.0 ? (1.0 - a) * (1.0 - a) : 0.0)
                    : k * exact[j] - (1.0 - a) * (1.0 - a) * std::pow(s, -p) * pss;
  }
  const Eigen::VectorXd u = solve_mode(k, phi, zg);
  exact[zg.M()] = 0.0;
  const Eigen::VectorXd diff = u - exact;
  const double rel = std::sqrt(mass_form(zg, diff, diff) / mass_form(zg, exact, exact));
  out.push_back(check(m, "manufactured solution relative error", rel, 1e-3));

  const auto basis = torus(10);
  const auto zgp = std::make_shared<const ZGrid>(a, zg.z_max(), 128);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd c(zgp->nodes(), basis->size());
  for (int j = 0; j < c.rows(); ++j) {
    for (int i = 0; i < c.cols(); ++i) c(j, i) = nd(rng) * std::exp(-zgp->s(j));
  }
  const LayeredField f(basis, zgp, c);
  const LayeredField sol = solve_neumann(f);
  const GradientEnergy ge = gradient_energy(sol);
  out.push_back(check(m, "||grad_bar grad u|| <= ||f||", ge.grad_grad / l2_norm(f), 1.0 + 1e-3));
  return out;
}

std::vector<CheckResult> transport_checks() {
  const std::string m = "transport";
  std::vector<CheckResult> out;
  const auto basis = torus(16);
  const auto grid = Grid2D::for_basis(basis, 32);
  const auto zg = std::make_shared<const ZGrid>(0.5, 4.0, 8);
  const Mollifier mol(16.0);
  GriddedField f(grid, zg);
  for (int j = 0; j < zg->nodes(); ++j) {
    for (int iy = 0; iy < grid->n2(); ++iy) {
      for (int ix = 0; ix < grid->n1(); ++ix) {
        f.v(grid->index(ix, iy), j) = std::cos(grid->x1(ix)) * std::sin(2.0 * grid->x2(iy)) * std::exp(-zg->z(j));
      }
    }
  }
  LayeredField psi(basis, zg);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int j = 0; j < psi.layers(); ++j) {
    for (int i = 0; i < psi.modes(); ++i) psi.coeffs()(j, i) = 0.3 * nd(rng) / (1.0 + basis->eigenvalue(i));
  }
  const MollifiedTables tables(grid, zg, mol);
  const VelocityField v = tables.velocity(psi);
  const double dt = 0.5 * std::min(grid->h1(), grid->h2()) / v.max_speed();
  GriddedField g = f;
  for (int s = 0; s < 10; ++s) g = advect(g, v, dt, {true, true});
  const double inf0 = transport_norm(f, INFINITY);
  out.push_back(check(m, "L-infinity bound under advection", transport_norm(g, INFINITY) - inf0, 1e-12));
  const double mass = (layer_means(g) - layer_means(f)).cwiseAbs().maxCoeff();
  out.push_back(check(m, "layer means conserved", mass, 1e-12));
  VelocityField still = v;
  still.u1.setZero();
  still.u2.setZero();
  const GriddedField same = advect(f, still, dt, {true, true});
  out.push_back(check(m, "zero velocity is the identity", (same.v - f.v).cwiseAbs().maxCoeff(), 1e-14));
  return out;
}

std::vector<CheckResult> boundary_checks() {
  const std::string m = "boundary_sqg";
  std::vector<CheckResult> out;
  const auto basis = torus(16);
  const auto grid = Grid2D::for_basis(basis);
  const double alpha = dissipation_order(0.5);
  BoundaryState st{SpectralField::unit(basis, 3), 0.0, alpha};
  const BoundaryForcing none = BoundaryForcing::none(grid, basis);
  for (int s = 0; s < 100; ++s) st = step_theta(st, none, 0.01, grid);
  const double expect = std::exp(-std::pow(basis->eigenvalue(3), alpha) * st.t);
  out.push_back(check(m, "single-mode decay law", std::abs(st.theta.coeffs()[3] - expect) / expect, 1e-4));

  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  SpectralField th(basis);
  SpectralField h(basis);
  for (int i = 0; i < th.size(); ++i) {
    th.coeffs()[i] = nd(rng) / (1.0 + basis->eigenvalue(i));
    h.coeffs()[i] = 0.2 * nd(rng) / (1.0 + basis->eigenvalue(i));
  }
  const BoundaryForcing forced = BoundaryForcing::from_trace(grid, h);
  BoundaryState s2{th, 0.0, alpha};
  EnergyLedger ledger;
  ledger.add(ledger_entry(s2, forced.f));
  for (int s = 0; s < 200; ++s) {
    s2 = step_theta(s2, forced, 0.005, grid);
    ledger.add(ledger_entry(s2, forced.f));
  }
  out.push_back(check(m, "energy ledger residual / scale", ledger.min_residual() / ledger.scale(), -1e-4, false));
  return out;
}

std::vector<CheckResult> driver_checks() {
  const std::string m = "sim_driver";
  std::vector<CheckResult> out;
  SimConfig cfg;
  cfg.n = 8;
  cfg.M = 32;
  cfg.T = 0.2;
  cfg.dt = 0.05;
  cfg.diagnostics_csv.clear();
  cfg.summary_json.clear();
  {
    Simulation sim(cfg);
    while (sim.state().t < cfg.T - 1e-12) sim.step(cfg.dt);
    const auto& s = sim.state();
    const double mag = s.F.v.cwiseAbs().maxCoeff() + s.theta.theta.coeffs().cwiseAbs().maxCoeff() +
                       s.psi1.coeffs().cwiseAbs().maxCoeff() + s.psi2.coeffs().cwiseAbs().maxCoeff();
    out.push_back(check(m, "zero data stays zero", mag, 0.0));
  }
  cfg.theta0 = "cos(x1)";
  {
    Simulation sim(cfg);
    while (sim.state().t < cfg.T - 1e-12) sim.step(cfg.dt);
    out.push_back(check(m, "boundary-only run leaves F at zero", sim.state().F.v.cwiseAbs().maxCoeff(), 0.0));
    const double l2 = l2_norm(sim.state().theta.theta);
    const double expect = std::sqrt(std::acos(-1.0) * 2.0 * std::acos(-1.0)) * std::exp(-sim.state().t);
    out.push_back(check(m, "single-mode boundary decay inside the coupled run", std::abs(l2 - expect) / expect, 1e-4));
  }
  cfg.F0 = "exp(-z)*cos(x1)*sin(x2)";
  cfg.theta0 = "sin(x1+x2)";
  {
    Simulation sim(cfg);
    const double inf0 = transport_norm(sim.state().F, INFINITY);
    while (sim.state().t < cfg.T - 1e-12) sim.step(cfg.dt);
    out.push_back(check(m, "interior maximum principle", transport_norm(sim.state().F, INFINITY) - inf0, 1e-12));
    out.push_back(check(m, "torus layer means", sim.diagnostics().layer_mean_drift, 1e-10));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& verify_modules() {
  static const std::vector<std::string> names = {"spectral_basis", "profile_ode", "extension_ops", "elliptic_solver",
                                                 "transport",      "boundary_sqg", "sim_driver"};
  return names;
}

std::vector<CheckResult> verify_module(const std::string& module) {
  if (module == "spectral_basis") return spectral_checks();
  if (module == "profile_ode") return profile_checks();
  if (module == "extension_ops") return extension_checks();
  if (module == "elliptic_solver") return elliptic_checks();
  if (module == "transport") return transport_checks();
  if (module == "boundary_sqg") return boundary_checks();
  if (module == "sim_driver") return driver_checks();
  throw ConfigError("unknown module '" + module + "'");
}

}  // namespace wqg
