#include "doctest.h"

#include "wqg/errors.hpp"
#include "wqg/spectral_basis.hpp"

#include <cmath>
#include <random>

using namespace wqg;

namespace {

const double kPi = std::acos(-1.0);

DomainSpec rect(double lx, double ly, int n) {
  DomainSpec d;
  d.kind = DomainKind::rectangle;
  d.lx = lx;
  d.ly = ly;
  d.n = n;
  return d;
}

SpectralField random_field(const BasisPtr& b, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SpectralField f(b);
  for (int i = 0; i < f.size(); ++i) f.coeffs()[i] = nd(rng);
  return f;
}

}  // namespace

TEST_CASE("torus eigenvalues come in the lattice shells") {
  const auto b = make_basis(DomainSpec{});
  REQUIRE(b->size() == 16);
  const double expect[16] = {1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4, 5, 5, 5, 5};
  for (int i = 0; i < 16; ++i) CHECK(b->eigenvalue(i) == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("rectangle eigenvalues are pi^2 (m1^2/lx^2 + m2^2/ly^2)") {
  const auto b = make_basis(rect(2.0, 1.0, 12));
  for (int i = 0; i < b->size(); ++i) {
    const Mode& m = b->mode(i);
    CHECK(m.m1 >= 1);
    CHECK(m.m2 >= 1);
    const double k = kPi * kPi * (m.m1 * m.m1 / 4.0 + m.m2 * m.m2 / 1.0);
    CHECK(m.k == doctest::Approx(k).epsilon(1e-14));
  }
  CHECK(b->eigenvalue(0) == doctest::Approx(kPi * kPi * 1.25));
}

TEST_CASE("grid quadrature makes the basis orthonormal") {
  for (const DomainSpec& d : {DomainSpec{}, rect(kPi, 2.0, 20)}) {
    const auto b = make_basis(d);
    const auto g = Grid2D::for_basis(b);
    const Eigen::MatrixXd gram = g->values().transpose() * g->omega_weights().asDiagonal() * g->values();
    CHECK((gram - Eigen::MatrixXd::Identity(b->size(), b->size())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mode tables agree with pointwise evaluation and finite differences") {
  const auto b = make_basis(rect(3.0, 2.0, 10));
  const auto g = Grid2D::for_basis(b, 0, 2);
  const double h = 1e-6;
  for (int i = 0; i < b->size(); ++i) {
    for (int node : {0, g->points() / 3, g->points() - 1}) {
      const int ix = node % g->n1();
      const int iy = node / g->n1();
      const double x = g->x1(ix);
      const double y = g->x2(iy);
      if (!g->inside_closure(x, y)) {
        CHECK(g->values()(node, i) == 0.0);
        continue;
      }
      CHECK(g->values()(node, i) == doctest::Approx(b->eval(i, x, y)).epsilon(1e-14));
      const double fd = (b->eval(i, x + h, y) - b->eval(i, x - h, y)) / (2.0 * h);
      CHECK(b->grad(i, x, y)[0] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("synthesize then project is the identity") {
  for (const DomainSpec& d : {DomainSpec{}, rect(1.0, 1.5, 15)}) {
    const auto b = make_basis(d);
    const auto g = Grid2D::for_basis(b, 24);
    const SpectralField f = random_field(b, 1);
    const SpectralField back = project(g, synthesize(g, f));
    CHECK((back.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fractional powers compose and match Sobolev norms") {
  const auto b = make_basis(DomainSpec{});
  const SpectralField f = random_field(b, 2);
  const SpectralField g = frac_laplacian(frac_laplacian(f, 0.7), 0.6);
  const SpectralField h = frac_laplacian(f, 1.3);
  CHECK((g.coeffs() - h.coeffs()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(l2_norm(frac_laplacian(f, 0.5)) == doctest::Approx(sobolev_norm(f, 0.5)).epsilon(1e-14));
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(l2_norm(f)));
  CHECK_THROWS_AS(frac_laplacian(f, 5.0), ConfigError);
}

TEST_CASE("perpendicular gradients are divergence free") {
  const auto b = make_basis(DomainSpec{ DomainKind::torus, 2.0 * kPi, 4.0, 30 });
  const auto g = Grid2D::for_basis(b, 32);
  const SpectralField f = random_field(b, 3);
  CHECK(perp_gradient_divergence(g, f).cwiseAbs().maxCoeff() < 1e-12);
  const GridVelocity v = perp_gradient(g, f);
  CHECK(spectral_divergence_periodic(*g, v.u1, v.u2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(domain_kind_from_string("sphere"), ConfigError);
  CHECK(domain_kind_from_string("rectangle") == DomainKind::rectangle);
  CHECK_THROWS_AS(make_basis(rect(-1.0, 1.0, 4)), ConfigError);
  const auto a = make_basis(DomainSpec{});
  const auto c = make_basis(rect(1.0, 1.0, 16));
  CHECK_THROWS_AS(SpectralField(a) + SpectralField(c), MismatchError);
}
