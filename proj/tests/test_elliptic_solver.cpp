#include "doctest.h"

#include "wqg/elliptic_solver.hpp"
#include "wqg/errors.hpp"
#include "wqg/extension_ops.hpp"

#include <cmath>
#include <random>

using namespace wqg;

namespace {

// psi*(s) = e^{-s}(1 + s + s^2/2) has psi*_s = -e^{-s} s^2/2, so the weighted flux
// vanishes at s = 0 and -Delta_lambda psi* = k psi* - (1-a)^2 s^{-p} psi*_ss.
struct Manufactured {
  double a;
  double k;
  double exact(double s) const { return std::exp(-s) * (1.0 + s + 0.5 * s * s); }
  double source(double s, double p) const {
    const double pss = -std::exp(-s) * (s - 0.5 * s * s);
    if (s == 0.0) return k * exact(0.0) + (p == 1.0 ? (1.0 - a) * (1.0 - a) : 0.0);
    return k * exact(s) - (1.0 - a) * (1.0 - a) * std::pow(s, -p) * pss;
  }
};

double mms_error(double a, double k, int M, double s_max = 30.0) {
  const ZGrid zg(a, std::pow(s_max, 1.0 / (1.0 - a)), M);
  const Manufactured f{a, k};
  Eigen::VectorXd phi(zg.nodes());
  Eigen::VectorXd ex(zg.nodes());
  for (int j = 0; j < zg.nodes(); ++j) {
    phi[j] = f.source(zg.s(j), zg.p());
    ex[j] = f.exact(zg.s(j));
  }
  ex[M] = 0.0;
  const Eigen::VectorXd d = solve_mode(k, phi, zg) - ex;
  return std::sqrt(mass_form(zg, d, d) / mass_form(zg, ex, ex));
}

BasisPtr torus(int n) {
  DomainSpec d;
  d.n = n;
  return make_basis(d);
}

LayeredField random_source(const BasisPtr& b, const ZGridPtr& zg, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.2, 3.0);
  Eigen::MatrixXd c(zg->nodes(), b->size());
  for (int i = 0; i < b->size(); ++i) {
    const double amp = nd(rng);
    const double rate = ud(rng);
    const double phase = nd(rng);
    for (int j = 0; j < zg->nodes(); ++j) c(j, i) = amp * std::exp(-rate * zg->z(j)) * std::cos(phase * zg->s(j));
  }
  return LayeredField(b, zg, c);
}

}  // namespace

TEST_CASE("manufactured solution converges at second order") {
  for (double a : {0.0, 0.5}) {
    CAPTURE(a);
    const double e1 = mms_error(a, 2.0, 256);
    const double e2 = mms_error(a, 2.0, 512);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("manufactured solution for a < 0 converges at the source's regularity") {
  // The source contains s^{-p} psi*_ss ~ s^{1/3}, which caps the lumped quadrature near s = 0.
  const double e1 = mms_error(-0.5, 2.0, 256);
  const double e2 = mms_error(-0.5, 2.0, 512);
  CHECK(e1 < 2e-4);
  CHECK(e1 / e2 > 2.2);
}

TEST_CASE("frozen manufactured-solution error at a = 0.5, M = 128") {
  CHECK(mms_error(0.5, 2.0, 128) == doctest::Approx(5.095e-4).epsilon(1e-3));
}

TEST_CASE("the discrete operator is inverted exactly") {
  const ZGrid zg(0.3, 20.0, 64);
  Eigen::VectorXd phi = Eigen::VectorXd::LinSpaced(zg.nodes(), 1.0, -1.0);
  const Eigen::VectorXd u = solve_mode(3.0, phi, zg);
  const Eigen::VectorXd lap = weighted_laplacian_mode(zg, 3.0, u);
  for (int j = 0; j < zg.M(); ++j) CHECK(lap[j] == doctest::Approx(-phi[j]).epsilon(1e-11));
  CHECK(u[zg.M()] == 0.0);
}

TEST_CASE("Neumann solutions carry no boundary flux") {
  const auto b = torus(16);
  const auto zg = std::make_shared<const ZGrid>(0.5, std::pow(30.0, 2.0), 256);
  const LayeredField f = random_source(b, zg, 8);
  const LayeredField u = solve_neumann(f);
  const double flux = sobolev_norm(trace_neumann(u), -extension_order(0.5));
  const double scale = sobolev_norm(trace_dirichlet(u), extension_order(0.5));
  CHECK(flux < 1e-3 * scale);
}

TEST_CASE("gradient bounds hold on random sources") {
  const auto b = torus(16);
  const double k1 = b->eigenvalues().minCoeff();
  for (double a : {-0.5, 0.5}) {
    const auto zg = std::make_shared<const ZGrid>(a, std::pow(25.0, 1.0 / (1.0 - a)), 128);
    for (unsigned seed = 0; seed < 20; ++seed) {
      const LayeredField f = random_source(b, zg, seed);
      const GradientEnergy ge = gradient_energy(solve_neumann(f));
      const double fn = l2_norm(f);
      CHECK(ge.grad_grad <= fn * (1.0 + 1e-12));
      CHECK(ge.grad <= fn / std::sqrt(k1) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("the two gradient bounds do not add up to one") {
  // A single slowly decaying mode at k = 1 nearly saturates both bounds at once.
  const auto b = torus(1);
  const auto zg = std::make_shared<const ZGrid>(0.0, 400.0, 4096);
  Eigen::MatrixXd c(zg->nodes(), 1);
  for (int j = 0; j < zg->nodes(); ++j) c(j, 0) = std::exp(-0.01 * zg->z(j));
  const LayeredField f(b, zg, c);
  const GradientEnergy ge = gradient_energy(solve_neumann(f));
  CHECK(ge.grad + ge.grad_grad > 1.5 * l2_norm(f));
}

TEST_CASE("invalid inputs are rejected") {
  const ZGrid zg(0.5, 10.0, 16);
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(zg.nodes());
  CHECK_THROWS_AS(solve_mode(0.0, phi, zg), ConfigError);
  CHECK_THROWS_AS(solve_mode(1.0, Eigen::VectorXd::Ones(5), zg), MismatchError);
  phi[3] = std::nan("");
  CHECK_THROWS_AS(solve_mode(1.0, phi, zg), ConfigError);
}
