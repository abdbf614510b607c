#include "wqg/errors.hpp"
#include "wqg/extension_ops.hpp"
#include "wqg/profile_ode.hpp"
#include "wqg/sim_driver.hpp"
#include "wqg/verify.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int cmd_simulate(const std::string& path) {
  const wqg::SimConfig cfg = wqg::load_config(path);
  const wqg::RunSummary s = wqg::run(cfg);
  std::printf("status %s, %d steps, t = %.6g, %.2f s\n", s.status.c_str(), s.steps, s.final.t, s.wall_seconds);
  std::printf("||F||_inf %.17g -> %.17g, max excess %.3e\n", s.initial.F_Linf, s.final.F_Linf, s.F_Linf_excess);
  std::printf("stream-function energy %.10g -> %.10g, max growth %.3e\n", s.initial.psi_energy, s.final.psi_energy,
              s.psi_energy_growth);
  std::printf("ledger min %.3e (scale %.3e)\n", s.ledger_min, s.ledger_scale);
  return 0;
}

int cmd_verify(const std::string& module) {
  const auto& names = wqg::verify_modules();
  std::vector<std::string> run = module.empty() ? names : std::vector<std::string>{module};
  int failures = 0;
  for (const auto& m : run) {
    for (const auto& r : wqg::verify_module(m)) {
      std::printf("%s %s: %s (%s)\n", r.pass ? "PASS" : "FAIL", r.module.c_str(), r.name.c_str(), r.detail.c_str());
      failures += r.pass ? 0 : 1;
    }
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}

int cmd_profile(double a, double w_max, const std::string& csv, int points) {
  const wqg::WProfile p = wqg::solve_profile(a, w_max);
  std::printf("a = %.17g  p = %.17g\n", p.a, p.p);
  std::printf("W'(0) = %.15f  kappa = %.15f\n", p.C_a, p.kappa);
  std::printf("backward-sweep slope = %.15f\n", p.table_slope);
  std::printf("|J(W) - kappa| = %.3e  ODE residual = %.3e\n", wqg::kappa_identity_check(p), p.ode_residual());
  std::printf("bounds: exp(-%.6g sqrt(w) - %.6g w^2) <= W <= min(1, w^-%.6g)\n", p.A, p.B, p.delta);
  if (!csv.empty()) {
    std::ofstream o(csv);
    if (!o) throw wqg::ConfigError("cannot write '" + csv + "'");
    o.precision(17);
    o << "w,W,dW\n";
    for (int i = 0; i <= points; ++i) {
      const double w = p.w_max * i / points;
      o << w << "," << p.value(w) << "," << p.derivative(w) << "\n";
    }
  }
  return 0;
}

int cmd_dtn(double a, int n, const std::string& domain, int M) {
  wqg::DomainSpec d;
  d.kind = wqg::domain_kind_from_string(domain);
  d.n = n;
  const auto basis = wqg::make_basis(d);
  const auto prof = wqg::cached_profile(a);
  const auto zg = wqg::make_extension_zgrid(a, basis->eigenvalues().minCoeff(), M, *prof);
  const auto eb = wqg::build_extension_basis(basis, zg, prof);
  const Eigen::VectorXd an = eb->analytic_symbol();
  std::printf("# kappa = %.15f  beta = %.15f  z_max = %.6g  M = %d\n", eb->kappa(), eb->beta(), zg->z_max(), M);
  std::printf("i,m1,m2,k,measured,analytic,rel_err\n");
  for (int i = 0; i < basis->size(); ++i) {
    const auto& md = basis->mode(i);
    const double s = eb->measured_symbol()[i];
    std::printf("%d,%d,%d,%.17g,%.17g,%.17g,%.3e\n", i, md.m1, md.m2, md.k, s, an[i], std::abs(s - an[i]) / an[i]);
  }
  const auto coarse = eb->under_resolved_modes();
  if (!coarse.empty()) std::printf("# %zu modes exceed w-spacing 0.25; raise M\n", coarse.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted quasi-geostrophic model: profiles, extensions and coupled runs"};
  app.require_subcommand(1);

  std::string config;
  auto* sim = app.add_subcommand("simulate", "Run the coupled system from a config file");
  sim->add_option("--config", config, "Config file (key = value lines)")->required();

  std::string module;
  auto* ver = app.add_subcommand("verify", "Run the module property suites");
  ver->add_option("--module", module, "Single module to check")->check(CLI::IsMember(wqg::verify_modules()));

  double pa = 0.0;
  double w_max = 40.0;
  std::string csv;
  int points = 400;
  auto* prof = app.add_subcommand("profile", "Solve the vertical profile for one a");
  prof->add_option("--a", pa, "Weight exponent, a < 1")->required();
  prof->add_option("--w-max", w_max, "Table extent");
  prof->add_option("--csv", csv, "Write w, W, W' samples to this file");
  prof->add_option("--points", points, "Samples in the CSV")->check(CLI::PositiveNumber);

  double da = 0.0;
  int dn = 16;
  std::string domain = "torus";
  int M = 1024;
  auto* dtn = app.add_subcommand("dtn-table", "Tabulate the measured Dirichlet-to-Neumann symbol");
  dtn->add_option("--a", da, "Weight exponent, a < 1")->required();
  dtn->add_option("--n", dn, "Number of modes")->check(CLI::PositiveNumber);
  dtn->add_option("--domain", domain, "torus or rectangle");
  dtn->add_option("--M", M, "Vertical cells")->check(CLI::Range(4, 1 << 20));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config);
    if (ver->parsed()) return cmd_verify(module);
    if (prof->parsed()) return cmd_profile(pa, w_max, csv, points);
    if (dtn->parsed()) return cmd_dtn(da, dn, domain, M);
  } catch (const wqg::ConfigError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const wqg::MismatchError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
