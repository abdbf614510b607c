#include "doctest.h"

#include "wqg/errors.hpp"
#include "wqg/transport.hpp"

#include <cmath>
#include <random>

using namespace wqg;

namespace {

BasisPtr torus(int n) {
  DomainSpec d;
  d.n = n;
  return make_basis(d);
}

BasisPtr rect(int n) {
  DomainSpec d;
  d.kind = DomainKind::rectangle;
  d.lx = 2.0;
  d.ly = 1.5;
  d.n = n;
  return make_basis(d);
}

template <typename F>
GriddedField gridded(const GridPtr& g, const ZGridPtr& zg, F f) {
  GriddedField out(g, zg);
  for (int j = 0; j < zg->nodes(); ++j) {
    for (int iy = 0; iy < g->n2(); ++iy) {
      for (int ix = 0; ix < g->n1(); ++ix) out.v(g->index(ix, iy), j) = f(g->x1(ix), g->x2(iy), zg->z(j));
    }
  }
  return out;
}

LayeredField random_psi(const BasisPtr& b, const ZGridPtr& zg, unsigned seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  LayeredField psi(b, zg);
  for (int i = 0; i < psi.modes(); ++i) {
    const double amp = scale * nd(rng) / (1.0 + b->eigenvalue(i));
    for (int j = 0; j < psi.layers(); ++j) psi.coeffs()(j, i) = amp * std::exp(-0.3 * zg->z(j));
  }
  return psi;
}

VelocityField constant_velocity(const GridPtr& g, const ZGridPtr& zg, double u1, double u2) {
  VelocityField v;
  v.grid = g;
  v.zgrid = zg;
  v.u1 = Eigen::MatrixXd::Constant(g->points(), zg->nodes(), u1);
  v.u2 = Eigen::MatrixXd::Constant(g->points(), zg->nodes(), u2);
  v.provenance = Provenance::mollified;
  return v;
}

}  // namespace

TEST_CASE("mollifier has unit mass and the stated support") {
  const Mollifier m(8.0);
  double sx = 0.0;
  double sz = 0.0;
  for (std::size_t q = 0; q < m.x_offsets().size(); ++q) {
    sx += m.x_weights()[q];
    sz += m.z_weights()[q];
    CHECK(std::abs(m.x_offsets()[q]) < 1.0 / 8.0);
    CHECK(m.z_offsets()[q] > 0.0);
    CHECK(m.z_offsets()[q] < 2.0 / 8.0);
    CHECK(m.x_weights()[q] > 0.0);
  }
  CHECK(sx == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sz == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.symbol(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.symbol(3.0) == doctest::Approx(m.symbol(-3.0)).epsilon(1e-15));
  CHECK(m.symbol(3.0) < 1.0);
  CHECK_THROWS_AS(Mollifier(0.0), ConfigError);
}

TEST_CASE("vertical mollifier averages and vanishes above the mesh") {
  const ZGrid zg(0.5, 9.0, 64);
  const Mollifier m(4.0);
  const Eigen::SparseMatrix<double> vm = m.vertical_matrix(zg);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(zg.nodes());
  const Eigen::VectorXd rows = vm * ones;
  for (int j = 0; j < zg.nodes(); ++j) {
    if (zg.z(j) + 0.5 < zg.z_max()) CHECK(rows[j] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rows[j] <= 1.0 + 1e-14);
  }
  CHECK(rows[zg.M()] == 0.0);
  // Linear profiles in s are averaged exactly.
  Eigen::VectorXd lin(zg.nodes());
  for (int j = 0; j < zg.nodes(); ++j) lin[j] = zg.s(j);
  const Eigen::VectorXd avg = vm * lin;
  double expect = 0.0;
  for (std::size_t q = 0; q < m.z_offsets().size(); ++q) expect += m.z_weights()[q] * std::sqrt(zg.z(10) + m.z_offsets()[q]);
  CHECK(avg[10] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("torus mollified velocity is the raw velocity times the symbol") {
  const auto b = torus(12);
  const auto g = Grid2D::for_basis(b, 16);
  const auto zg = std::make_shared<const ZGrid>(0.5, 100.0, 32);
  const Mollifier m(3.0);
  LayeredField psi(b, zg);
  for (int j = 0; j < psi.layers(); ++j) psi.coeffs()(j, 5) = 1.0;
  const VelocityField mol = MollifiedTables(g, zg, m).velocity(psi);
  const VelocityField raw = perp_gradient(g, psi);
  const Mode& md = b->mode(5);
  const double sym = m.symbol(md.m1) * m.symbol(md.m2);
  for (int j = 0; j < 10; ++j) {
    CHECK((mol.u1.col(j) - sym * raw.u1.col(j)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((mol.u2.col(j) - sym * raw.u2.col(j)).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(mol.provenance == Provenance::mollified);
  CHECK(raw.provenance == Provenance::raw);
}

TEST_CASE("grid convolution agrees with the analytic torus tables") {
  const auto b = torus(16);
  const auto g = Grid2D::for_basis(b, 128);
  const auto zg = std::make_shared<const ZGrid>(0.5, 100.0, 32);
  const Mollifier m(4.0);
  const LayeredField psi = random_psi(b, zg, 2, 1.0);
  const VelocityField a = MollifiedTables(g, zg, m).velocity(psi);
  const VelocityField c = mollify_velocity(perp_gradient(g, psi), m);
  const double scale = a.max_speed();
  CHECK((a.u1 - c.u1).cwiseAbs().maxCoeff() < 1e-5 * scale);
  CHECK((a.u2 - c.u2).cwiseAbs().maxCoeff() < 1e-5 * scale);
}

TEST_CASE("rectangle tables convolve the zero-extended gradient") {
  const auto b = rect(6);
  const Mollifier m(5.0);
  const auto g = Grid2D::for_basis(b, 20, 4);
  const auto zg = std::make_shared<const ZGrid>(0.0, 50.0, 8);
  const MollifiedTables t(g, zg, m);
  for (int i = 0; i < b->size(); ++i) {
    for (int node : {0, g->index(3, 5), g->index(g->n1() / 2, g->n2() / 2), g->index(g->n1() - 3, 4)}) {
      const double x = g->x1(node % g->n1());
      const double y = g->x2(node / g->n1());
      double d1 = 0.0;
      double d2 = 0.0;
      for (std::size_t p = 0; p < m.x_offsets().size(); ++p) {
        for (std::size_t q = 0; q < m.x_offsets().size(); ++q) {
          const double px = x - m.x_offsets()[p];
          const double py = y - m.x_offsets()[q];
          const double w = m.x_weights()[p] * m.x_weights()[q];
          if (px < 0.0 || px > 2.0 || py < 0.0 || py > 1.5) continue;
          d1 += w * b->grad(i, px, py)[0];
          d2 += w * b->grad(i, px, py)[1];
        }
      }
      CHECK(t.d1()(node, i) == doctest::Approx(d1).epsilon(1e-12).scale(1.0));
      CHECK(t.d2()(node, i) == doctest::Approx(d2).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("advection keeps layer bounds and masses") {
  for (const BasisPtr& b : {torus(16), rect(16)}) {
    const auto g = Grid2D::for_basis(b, 40, b->domain().kind == DomainKind::torus ? 0 : 4);
    const auto zg = std::make_shared<const ZGrid>(0.5, 9.0, 12);
    const GriddedField f0 = gridded(g, zg, [&](double x, double y, double z) {
      return g->inside_closure(x, y) ? std::sin(3.0 * x) * std::cos(2.0 * y) * std::exp(-z) + 0.2 * std::cos(x * y) : 0.0;
    });
    const VelocityField v = MollifiedTables(g, zg, Mollifier(16.0)).velocity(random_psi(b, zg, 4, 2.0));
    const double dt = 0.9 * std::min(g->h1(), g->h2()) / v.max_speed();
    GriddedField f = f0;
    for (int s = 0; s < 20; ++s) f = advect(f, v, dt, {true, true});
    for (int j = 0; j < zg->nodes(); ++j) {
      CHECK(f.v.col(j).maxCoeff() <= f0.v.col(j).maxCoeff());
      CHECK(f.v.col(j).minCoeff() >= f0.v.col(j).minCoeff());
    }
    CHECK(transport_norm(f, INFINITY) <= transport_norm(f0, INFINITY));
    CHECK((layer_means(f) - layer_means(f0)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("a whole-cell shift is exact") {
  const auto b = torus(8);
  const auto g = Grid2D::for_basis(b, 24);
  const auto zg = std::make_shared<const ZGrid>(0.0, 5.0, 4);
  const GriddedField f = gridded(g, zg, [](double x, double y, double z) { return std::sin(x) * std::cos(3.0 * y) + z; });
  const double dt = 0.1;
  const GriddedField out = advect(f, constant_velocity(g, zg, g->h1() / dt, 0.0), dt, {true, false});
  for (int iy = 0; iy < g->n2(); ++iy) {
    for (int ix = 0; ix < g->n1(); ++ix) {
      const int src = g->index((ix + g->n1() - 1) % g->n1(), iy);
      CHECK(out.v(g->index(ix, iy), 2) == doctest::Approx(f.v(src, 2)).epsilon(1e-13));
    }
  }
}

TEST_CASE("steady single-mode flow leaves F unchanged") {
  const auto b = torus(16);
  const auto g = Grid2D::for_basis(b, 48);
  const auto zg = std::make_shared<const ZGrid>(0.5, 9.0, 8);
  // psi = sin(x1) g(z) moves fluid along x2 only; F = sin(x1) g(z) does not depend on x2.
  LayeredField psi(b, zg);
  GriddedField f = gridded(g, zg, [](double x, double, double z) { return std::sin(x) * std::exp(-z); });
  const GriddedField f0 = f;
  const SpectralField e = project(g, Eigen::VectorXd(f.v.col(0)));
  for (int j = 0; j < zg->nodes(); ++j) psi.set_layer(j, std::exp(-zg->z(j)) * e);
  const VelocityField v = MollifiedTables(g, zg, Mollifier(16.0)).velocity(psi);
  const double dt = 0.5 * g->h1() / v.max_speed();
  for (int s = 0; s < 10; ++s) f = advect(f, v, dt, {true, true});
  CHECK((f.v - f0.v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("guards") {
  const auto b = torus(8);
  const auto g = Grid2D::for_basis(b, 16);
  const auto zg = std::make_shared<const ZGrid>(0.0, 5.0, 4);
  const GriddedField f(g, zg);
  VelocityField v = constant_velocity(g, zg, 1.0, 0.0);
  CHECK_THROWS_AS(advect(f, v, 2.0 * g->h1(), {}), StepSizeError);
  CHECK_THROWS_AS(advect(f, v, 0.0, {}), ConfigError);
  v.provenance = Provenance::raw;
  CHECK_THROWS_AS(advect(f, v, 0.1, {true, true}), ConfigError);
  CHECK_NOTHROW(advect(f, v, 0.1, {false, true}));
  VelocityField small = constant_velocity(Grid2D::for_basis(b, 8), zg, 1.0, 0.0);
  CHECK_THROWS_AS(advect(f, small, 0.1, {}), MismatchError);
}

TEST_CASE("bicubic interpolation reproduces cubics and clipping bounds the cell") {
  const auto b = rect(4);
  const auto g = Grid2D::for_basis(b, 10, 3);
  Eigen::VectorXd vals(g->points());
  auto cubic = [](double x, double y) { return 1.0 + x - 2.0 * x * x * y + 0.5 * y * y * y; };
  for (int iy = 0; iy < g->n2(); ++iy) {
    for (int ix = 0; ix < g->n1(); ++ix) vals[g->index(ix, iy)] = cubic(g->x1(ix), g->x2(iy));
  }
  for (double x : {0.3, 1.1, 1.7}) {
    for (double y : {0.2, 0.75, 1.3}) {
      CHECK(interpolate(*g, vals.data(), x, y, false) == doctest::Approx(cubic(x, y)).epsilon(1e-12));
    }
  }
  Eigen::VectorXd step = Eigen::VectorXd::Zero(g->points());
  for (int iy = 0; iy < g->n2(); ++iy) {
    for (int ix = g->n1() / 2; ix < g->n1(); ++ix) step[g->index(ix, iy)] = 1.0;
  }
  for (int t = 0; t < 50; ++t) {
    const double x = g->x1(0) + (g->n1() - 1) * g->h1() * t / 50.0;
    const double v = interpolate(*g, step.data(), x, 0.7, true);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("norms and means") {
  const auto b = torus(4);
  const auto g = Grid2D::for_basis(b, 8);
  const auto zg = std::make_shared<const ZGrid>(0.5, 16.0, 16);
  const GriddedField c = gridded(g, zg, [](double, double, double) { return 2.0; });
  const double area = b->area();
  CHECK(transport_norm(c, 2.0) == doctest::Approx(2.0 * std::sqrt(area * zg->weights().sum())));
  CHECK(transport_norm(c, INFINITY) == 2.0);
  CHECK(transport_norm(c, 2.0, NormWeight::w0) < transport_norm(c, 2.0));
  CHECK(layer_means(c).minCoeff() == doctest::Approx(2.0));
  CHECK_THROWS_AS(transport_norm(c, 0.5), ConfigError);
}
