#include "wqg/sim_driver.hpp"

#include "wqg/elliptic_solver.hpp"
#include "wqg/errors.hpp"
#include "wqg/expression.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wqg {

namespace {

constexpr int kMaxHalvings = 8;
constexpr double kMeanTolerance = 1e-10;
constexpr double kDataBound = 1e100;

class PicardDivergence : public SolverError {
 public:
  using SolverError::SolverError;
};

const std::string kFilePrefix = "file:";

bool is_file(const std::string& descriptor) { return descriptor.rfind(kFilePrefix, 0) == 0; }

Snapshot load_matching_snapshot(const std::string& descriptor, const SimContext& ctx) {
  Snapshot s = read_snapshot(descriptor.substr(kFilePrefix.size()));
  const Grid2D& g = *ctx.grid;
  const bool ok = s.kind == static_cast<std::uint32_t>(ctx.basis->domain().kind) && s.a == ctx.cfg.a &&
                  s.n == static_cast<std::uint32_t>(ctx.basis->size()) &&
                  s.M == static_cast<std::uint32_t>(ctx.zgrid->M()) &&
                  s.n1 == static_cast<std::uint32_t>(g.n1()) && s.n2 == static_cast<std::uint32_t>(g.n2()) &&
                  s.margin == g.margin() && std::abs(s.z_max - ctx.zgrid->z_max()) <= 1e-12 * ctx.zgrid->z_max();
  if (!ok) throw ConfigError("snapshot '" + descriptor + "' does not match the configured discretization");
  return s;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json row_json(const DiagnosticsRow& r) {
  return {{"t", r.t},
          {"dt", r.dt},
          {"F_L2", r.F_L2},
          {"F_Linf", r.F_Linf},
          {"psi_energy", r.psi_energy},
          {"theta_L2", r.theta_L2},
          {"theta_Halpha", r.theta_Halpha},
          {"ledger_residual", r.ledger_residual},
          {"layer_mean_drift", r.layer_mean_drift},
          {"theta_mean", r.theta_mean},
          {"trace_ratio", r.trace_ratio},
          {"trace_ratio_kappa", r.trace_ratio_kappa},
          {"gamma_lambda_psi2", r.gamma_lambda_psi2},
          {"laplacian_psi1", r.laplacian_psi1},
          {"gamma_lambda_psi2_rel", r.gamma_lambda_psi2_rel},
          {"laplacian_psi1_rel", r.laplacian_psi1_rel},
          {"picard_iterations", r.picard_iterations},
          {"picard_ratio", r.picard_ratio}};
}

}  // namespace

SimContext::SimContext(const SimConfig& c) : cfg(c) {
  cfg.validate();
  basis = make_basis(cfg.domain_spec());
  mollifier = std::make_shared<const Mollifier>(cfg.mollifier_index());
  int points = cfg.grid;
  if (points == 0) {
    // Spacing at most the mollifier half-width, so the kernel spans several cells.
    const double side = std::max(basis->domain().lx, basis->domain().ly);
    points = static_cast<int>(std::ceil(side * mollifier->n()));
  }
  int margin = 0;
  if (basis->domain().kind == DomainKind::rectangle) {
    const auto coarse = Grid2D::for_basis(basis, points, 0);
    const double h = std::min(coarse->h1(), coarse->h2());
    margin = static_cast<int>(std::ceil(mollifier->width() / h)) + 2;
  }
  grid = Grid2D::for_basis(basis, points, margin);
  profile = cached_profile(cfg.a);
  if (cfg.z_max > 0.0) {
    zgrid = std::make_shared<const ZGrid>(cfg.a, cfg.z_max, cfg.M);
  } else {
    zgrid = make_extension_zgrid(cfg.a, basis->eigenvalues().minCoeff(), cfg.M, *profile);
  }
  extension = build_extension_basis(basis, zgrid, profile);
  tables = std::make_shared<const MollifiedTables>(grid, zgrid, *mollifier);
  alpha = dissipation_order(cfg.a);
  beta = extension_order(cfg.a);
}

std::string DiagnosticsRow::csv_header() {
  return "t,dt,F_L2,F_Linf,psi_energy,theta_L2,theta_Halpha,ledger_residual,layer_mean_drift,theta_mean,"
         "trace_ratio,trace_ratio_kappa,gamma_lambda_psi2,laplacian_psi1,gamma_lambda_psi2_rel,laplacian_psi1_rel,"
         "picard_iterations,picard_ratio";
}

std::string DiagnosticsRow::csv_line() const {
  std::string s;
  for (double v : {t, dt, F_L2, F_Linf, psi_energy, theta_L2, theta_Halpha, ledger_residual, layer_mean_drift,
                   theta_mean, trace_ratio, trace_ratio_kappa, gamma_lambda_psi2, laplacian_psi1, gamma_lambda_psi2_rel,
                   laplacian_psi1_rel}) {
    s += fmt(v);
    s += ',';
  }
  s += std::to_string(picard_iterations);
  s += ',';
  s += fmt(picard_ratio);
  return s;
}

Simulation::Simulation(const SimConfig& cfg) : ctx_(std::make_shared<const SimContext>(cfg)) {
  const SimContext& ctx = *ctx_;
  const Grid2D& g = *ctx.grid;
  const ZGrid& zg = *ctx.zgrid;
  const bool torus = ctx.basis->domain().kind == DomainKind::torus;

  std::optional<Snapshot> snap;
  if (is_file(cfg.F0)) snap = load_matching_snapshot(cfg.F0, ctx);

  state_.F = GriddedField(ctx.grid, ctx.zgrid);
  if (snap) {
    // A snapshot holds an already regularized state and is used verbatim.
    state_.F.v = snap->F_grid;
    state_.t = snap->t;
  } else {
    const Expression f0(cfg.F0);
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(g.points(), zg.nodes());
    for (int j = 0; j < zg.nodes(); ++j) {
      for (int iy = 0; iy < g.n2(); ++iy) {
        for (int ix = 0; ix < g.n1(); ++ix) {
          const int idx = g.index(ix, iy);
          if (!torus && g.omega_weights()[idx] == 0.0) continue;  // zero extension
          raw(idx, j) = f0(g.x1(ix), g.x2(iy), zg.z(j));
        }
      }
    }
    if (!raw.allFinite()) throw ConfigError("initial vorticity F0 is not finite on the grid");
    const double bound = max_abs(raw);
    if (bound > kDataBound) throw ConfigError("initial vorticity F0 is unbounded on the grid");
    if (torus) {
      const Eigen::VectorXd means = layer_means(GriddedField(ctx.grid, ctx.zgrid, raw));
      const double drift = means.cwiseAbs().maxCoeff();
      if (drift > kMeanTolerance * std::max(1.0, bound)) {
        throw ConfigError("torus runs need zero-mean F0 in every layer (max |mean| = " + fmt(drift) + ")");
      }
    }
    state_.F.v = mollify_layers(g, zg, *ctx.mollifier, raw);
  }

  state_.theta.alpha = ctx.alpha;
  state_.theta.t = state_.t;
  if (is_file(cfg.theta0)) {
    const Snapshot s = snap && cfg.theta0 == cfg.F0 ? *snap : load_matching_snapshot(cfg.theta0, ctx);
    state_.theta.theta = SpectralField(ctx.basis, s.theta);
  } else {
    const Expression th0(cfg.theta0);
    Eigen::VectorXd samples(g.points());
    for (int iy = 0; iy < g.n2(); ++iy) {
      for (int ix = 0; ix < g.n1(); ++ix) samples[g.index(ix, iy)] = th0(g.x1(ix), g.x2(iy), 0.0);
    }
    for (int k = 0; k < samples.size(); ++k) {
      if (g.omega_weights()[k] == 0.0) samples[k] = 0.0;
    }
    if (!samples.allFinite() || samples.cwiseAbs().maxCoeff() > kDataBound) {
      throw ConfigError("initial boundary data theta0 is not finite and bounded on the grid");
    }
    state_.theta.theta = project(ctx.grid, samples);
  }

  refresh_stream_functions(state_);
  ledger_.add(ledger_entry(state_.theta, boundary_source(state_.psi2)));
}

void Simulation::refresh_stream_functions(CoupledState& s) const {
  s.psi2 = solve_neumann(project(s.F, ctx_->basis));
  s.psi1 = neumann_extend(s.theta.theta, *ctx_->extension);
}

SpectralField Simulation::boundary_source(const LayeredField& psi2) const {
  SpectralField h = trace_dirichlet(psi2);
  h.coeffs() = -h.coeffs().cwiseProduct(ctx_->basis->eigenvalues());
  return h;
}

double Simulation::default_dt() const {
  const SimContext& ctx = *ctx_;
  const double vmax = ctx.tables->velocity(state_.psi1 + state_.psi2).max_speed();
  const double cell = std::min(ctx.grid->h1(), ctx.grid->h2());
  const double k_n = ctx.basis->eigenvalues().maxCoeff();
  double dt = 0.1 * std::pow(k_n, -ctx.alpha);
  if (vmax > 0.0) dt = std::min(dt, 0.999 * cell / vmax);
  return dt;
}

Simulation::Attempt Simulation::attempt(double dt) const {
  const SimContext& ctx = *ctx_;
  const CoupledState& s = state_;
  const bool picard = ctx.cfg.picard_enabled();
  const int max_iters = picard ? ctx.cfg.picard_max_iters : 1;
  const LayeredField psi0 = s.psi1 + s.psi2;
  const SpectralField h0 = trace_dirichlet(s.psi2);
  AdvectOptions opts;
  opts.require_mollified = true;

  Attempt out;
  LayeredField g1 = s.psi1;
  LayeredField g2 = s.psi2;
  double prev = -1.0;
  double last_ratio = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const LayeredField psi = it == 1 ? psi0 : 0.5 * (psi0 + g1 + g2);
    const VelocityField v = ctx.tables->velocity(psi);
    CoupledState next;
    next.F = advect(s.F, v, dt, opts);
    const SpectralField h = it == 1 ? h0 : 0.5 * (h0 + trace_dirichlet(g2));
    next.theta = step_theta(s.theta, BoundaryForcing::from_trace(ctx.grid, h), dt, ctx.grid);
    next.t = s.t + dt;
    next.theta.t = next.t;
    refresh_stream_functions(next);
    out.iterations = it;
    if (!picard) {
      out.next = std::move(next);
      return out;
    }
    const double diff = std::sqrt(weighted_energy((next.psi1 + next.psi2) - (g1 + g2)));
    const double norm = std::sqrt(weighted_energy(next.psi1 + next.psi2));
    if (prev > 0.0) {
      last_ratio = diff / prev;
      out.ratio = std::max(out.ratio, last_ratio);
    }
    g1 = next.psi1;
    g2 = next.psi2;
    prev = diff;
    out.next = std::move(next);
    if (diff <= ctx.cfg.picard_tol * std::max(norm, std::numeric_limits<double>::min())) return out;
  }
  if (last_ratio >= 1.0) throw PicardDivergence("Picard iteration is not contracting");
  return out;
}

double Simulation::step(double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  double h = dt;
  for (int tries = 0; tries <= kMaxHalvings; ++tries) {
    try {
      Attempt a = attempt(h);
      state_ = std::move(a.next);
      last_iters_ = a.iterations;
      last_ratio_ = a.ratio;
      last_dt_ = h;
      ledger_.add(ledger_entry(state_.theta, boundary_source(state_.psi2)));
      return h;
    } catch (const StepSizeError&) {
    } catch (const PicardDivergence&) {
    }
    h *= 0.5;
    ++halvings_;
  }
  throw SolverError("coupled step rejected after " + std::to_string(kMaxHalvings) + " halvings at t = " +
                    fmt(state_.t));
}

DiagnosticsRow Simulation::diagnostics() const {
  const SimContext& ctx = *ctx_;
  const CoupledState& s = state_;
  DiagnosticsRow r;
  r.t = s.t;
  r.dt = last_dt_;
  r.F_L2 = transport_norm(s.F, 2.0);
  r.F_Linf = transport_norm(s.F, std::numeric_limits<double>::infinity());
  const LayeredField psi = s.psi1 + s.psi2;
  r.psi_energy = std::sqrt(weighted_energy(psi));
  r.theta_L2 = l2_norm(s.theta.theta);
  r.theta_Halpha = sobolev_norm(s.theta.theta, ctx.alpha);
  r.ledger_residual = ledger_.residual();
  if (ctx.basis->domain().kind == DomainKind::torus) {
    r.layer_mean_drift = layer_means(s.F).cwiseAbs().maxCoeff();
    const Eigen::VectorXd th = synthesize(ctx.grid, s.theta.theta);
    r.theta_mean = std::abs(ctx.grid->omega_weights().dot(th)) / ctx.basis->area();
  }
  r.trace_ratio = trace_ratio(psi);
  r.trace_ratio_kappa = std::sqrt(ctx.extension->kappa()) * r.trace_ratio;
  r.gamma_lambda_psi2 = sobolev_norm(trace_neumann(s.psi2), -ctx.beta);
  r.laplacian_psi1 = gradient_energy(s.psi1).laplacian;
  const double flux_scale = ctx.extension->kappa() * sobolev_norm(trace_dirichlet(s.psi2), ctx.beta);
  r.gamma_lambda_psi2_rel = flux_scale > 0.0 ? r.gamma_lambda_psi2 / flux_scale : 0.0;
  for (int i = 0; i < s.psi1.modes(); ++i) {
    r.laplacian_psi1_rel =
        std::max(r.laplacian_psi1_rel, laplacian_defect(*ctx.zgrid, ctx.basis->eigenvalue(i), s.psi1.coeffs().col(i)));
  }
  r.picard_iterations = last_iters_;
  r.picard_ratio = last_ratio_;
  return r;
}

Snapshot Simulation::snapshot() const {
  const SimContext& ctx = *ctx_;
  Snapshot s;
  s.kind = static_cast<std::uint32_t>(ctx.basis->domain().kind);
  s.a = ctx.cfg.a;
  s.n = static_cast<std::uint32_t>(ctx.basis->size());
  s.M = static_cast<std::uint32_t>(ctx.zgrid->M());
  s.lx = ctx.basis->domain().lx;
  s.ly = ctx.basis->domain().ly;
  s.z_max = ctx.zgrid->z_max();
  s.t = state_.t;
  s.n1 = static_cast<std::uint32_t>(ctx.grid->n1());
  s.n2 = static_cast<std::uint32_t>(ctx.grid->n2());
  s.margin = ctx.grid->margin();
  s.theta = state_.theta.theta.coeffs();
  s.F = project(state_.F, ctx.basis).coeffs();
  s.psi1 = state_.psi1.coeffs();
  s.psi2 = state_.psi2.coeffs();
  s.F_grid = state_.F.v;
  return s;
}

nlohmann::json summary_json(const SimConfig& cfg, const SimContext& ctx, const RunSummary& s) {
  nlohmann::json j;
  j["config"] = cfg;
  j["derived"] = {{"kappa_profile", ctx.profile->kappa},
                  {"kappa_extension", ctx.extension->kappa()},
                  {"alpha", ctx.alpha},
                  {"beta", ctx.beta},
                  {"modes", ctx.basis->size()},
                  {"k_min", ctx.basis->eigenvalues().minCoeff()},
                  {"k_max", ctx.basis->eigenvalues().maxCoeff()},
                  {"z_max", ctx.zgrid->z_max()},
                  {"s_max", ctx.zgrid->s_max()},
                  {"grid_n1", ctx.grid->n1()},
                  {"grid_n2", ctx.grid->n2()},
                  {"grid_margin", ctx.grid->margin()},
                  {"mollifier_n", ctx.mollifier->n()}};
  j["status"] = s.status;
  j["steps"] = s.steps;
  j["dt_halvings"] = s.dt_halvings;
  j["wall_seconds"] = s.wall_seconds;
  j["initial"] = row_json(s.initial);
  j["final"] = row_json(s.final);
  j["violations"] = {{"F_Linf_excess", s.F_Linf_excess},
                     {"F_Linf_deficit", s.F_Linf_deficit},
                     {"psi_energy_growth", s.psi_energy_growth},
                     {"ledger_min", s.ledger_min},
                     {"ledger_scale", s.ledger_scale},
                     {"max_layer_mean_drift", s.max_layer_mean_drift},
                     {"max_theta_mean", s.max_theta_mean},
                     {"max_gamma_lambda_psi2", s.max_gamma_lambda_psi2},
                     {"max_laplacian_psi1", s.max_laplacian_psi1},
                     {"max_gamma_lambda_psi2_rel", s.max_gamma_lambda_psi2_rel},
                     {"max_laplacian_psi1_rel", s.max_laplacian_psi1_rel},
                     {"max_trace_ratio", s.max_trace_ratio},
                     {"max_trace_ratio_kappa", s.max_trace_ratio_kappa},
                     {"max_picard_ratio", s.max_picard_ratio}};
  return j;
}

namespace {

void absorb(RunSummary& s, const DiagnosticsRow& r, double& e_min) {
  s.F_Linf_excess = std::max(s.F_Linf_excess, r.F_Linf - s.initial.F_Linf);
  s.F_Linf_deficit = std::max(s.F_Linf_deficit, s.initial.F_Linf - r.F_Linf);
  if (e_min > 0.0) s.psi_energy_growth = std::max(s.psi_energy_growth, (r.psi_energy - e_min) / e_min);
  e_min = std::min(e_min, r.psi_energy);
  s.max_layer_mean_drift = std::max(s.max_layer_mean_drift, r.layer_mean_drift);
  s.max_theta_mean = std::max(s.max_theta_mean, r.theta_mean);
  s.max_gamma_lambda_psi2 = std::max(s.max_gamma_lambda_psi2, r.gamma_lambda_psi2);
  s.max_laplacian_psi1 = std::max(s.max_laplacian_psi1, r.laplacian_psi1);
  s.max_gamma_lambda_psi2_rel = std::max(s.max_gamma_lambda_psi2_rel, r.gamma_lambda_psi2_rel);
  s.max_laplacian_psi1_rel = std::max(s.max_laplacian_psi1_rel, r.laplacian_psi1_rel);
  s.max_trace_ratio = std::max(s.max_trace_ratio, r.trace_ratio);
  s.max_trace_ratio_kappa = std::max(s.max_trace_ratio_kappa, r.trace_ratio_kappa);
  s.max_picard_ratio = std::max(s.max_picard_ratio, r.picard_ratio);
  s.final = r;
}

void write_summary(const SimConfig& cfg, const SimContext& ctx, const RunSummary& s) {
  if (cfg.summary_json.empty()) return;
  std::ofstream o(cfg.summary_json);
  if (!o) throw ConfigError("cannot write summary '" + cfg.summary_json + "'");
  o << summary_json(cfg, ctx, s).dump(2) << "\n";
}

}  // namespace

RunSummary run(const SimConfig& cfg) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  const auto start = std::chrono::steady_clock::now();
  Simulation sim(cfg);
  RunSummary summary;
  std::ofstream csv;
  if (!cfg.diagnostics_csv.empty()) {
    csv.open(cfg.diagnostics_csv);
    if (!csv) throw ConfigError("cannot write diagnostics '" + cfg.diagnostics_csv + "'");
    csv << DiagnosticsRow::csv_header() << "\n";
  }
  auto emit = [&](const DiagnosticsRow& r) {
    if (csv.is_open()) csv << r.csv_line() << "\n" << std::flush;
  };

  summary.initial = sim.diagnostics();
  double e_min = summary.initial.psi_energy;
  absorb(summary, summary.initial, e_min);
  emit(summary.initial);

  const double t0 = sim.state().t;
  const double t_end = t0 + cfg.T;
  const double eps = 1e-12 * std::max(1.0, cfg.T);
  double next_output = t0 + cfg.output_interval;
  try {
    while (sim.state().t < t_end - eps) {
      double dt = cfg.dt > 0.0 ? cfg.dt : sim.default_dt();
      dt = std::min(dt, t_end - sim.state().t);
      sim.step(dt);
      ++summary.steps;
      const DiagnosticsRow r = sim.diagnostics();
      absorb(summary, r, e_min);
      const bool last = sim.state().t >= t_end - eps;
      if (cfg.output_interval <= 0.0 || last || sim.state().t >= next_output - eps) {
        emit(r);
        while (next_output <= sim.state().t + eps && cfg.output_interval > 0.0) next_output += cfg.output_interval;
      }
    }
  } catch (const std::exception& e) {
    summary.status = std::string("error: ") + e.what();
    summary.dt_halvings = sim.dt_halvings();
    summary.ledger_min = sim.ledger().min_residual();
    summary.ledger_scale = sim.ledger().scale();
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_summary(cfg, sim.context(), summary);
    throw;
  }
  summary.dt_halvings = sim.dt_halvings();
  summary.ledger_min = sim.ledger().min_residual();
  summary.ledger_scale = sim.ledger().scale();
  if (!cfg.snapshot.empty()) write_snapshot(cfg.snapshot, sim.snapshot());
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_summary(cfg, sim.context(), summary);
  return summary;
}

}  // namespace wqg
