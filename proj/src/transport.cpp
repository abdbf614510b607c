#include "wqg/transport.hpp"

#include "wqg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wqg {

namespace {

double bump(double t) {
  const double u = 1.0 - t * t;
  return u > 0.0 ? u * u * u : 0.0;
}

void cubic_weights(double t, double w[4]) {
  w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Mollifier::Mollifier(double n, int samples) : n_(n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("mollifier index must be positive");
  if (samples < 2) throw ConfigError("mollifier needs at least two samples");
  const double h = 2.0 / (n * samples);
  double sx = 0.0;
  double sz = 0.0;
  for (int q = 0; q < samples; ++q) {
    const double y = -1.0 / n + (q + 0.5) * h;
    xo_.push_back(y);
    xw_.push_back(bump(n * y));
    sx += xw_.back();
    const double zeta = (q + 0.5) * h;
    zo_.push_back(zeta);
    zw_.push_back(bump(n * zeta - 1.0));
    sz += zw_.back();
  }
  for (auto& w : xw_) w /= sx;
  for (auto& w : zw_) w /= sz;
}

double Mollifier::symbol(double omega) const {
  double s = 0.0;
  for (std::size_t q = 0; q < xo_.size(); ++q) s += xw_[q] * std::cos(omega * xo_[q]);
  return s;
}

Eigen::SparseMatrix<double> Mollifier::vertical_matrix(const ZGrid& zg) const {
  std::vector<Eigen::Triplet<double>> trip;
  const int m = zg.M();
  for (int j = 0; j <= m; ++j) {
    for (std::size_t q = 0; q < zo_.size(); ++q) {
      const double z = zg.z(j) + zo_[q];
      if (z >= zg.z_max()) continue;
      const double s = std::pow(z, 1.0 - zg.a()) / zg.ds();
      int l = std::min(static_cast<int>(std::floor(s)), m - 1);
      const double t = s - l;
      trip.emplace_back(j, l, zw_[q] * (1.0 - t));
      trip.emplace_back(j, l + 1, zw_[q] * t);
    }
  }
  Eigen::SparseMatrix<double> mat(m + 1, m + 1);
  mat.setFromTriplets(trip.begin(), trip.end());
  return mat;
}

GriddedField::GriddedField(GridPtr g, ZGridPtr z) : grid(std::move(g)), zgrid(std::move(z)) {
  v = Eigen::MatrixXd::Zero(grid->points(), zgrid->nodes());
}

GriddedField::GriddedField(GridPtr g, ZGridPtr z, Eigen::MatrixXd values)
    : grid(std::move(g)), zgrid(std::move(z)), v(std::move(values)) {
  if (v.rows() != grid->points() || v.cols() != zgrid->nodes()) throw MismatchError("gridded values have the wrong shape");
}

double VelocityField::max_speed() const {
  double m = 0.0;
  for (Eigen::Index c = 0; c < u1.cols(); ++c) {
    for (Eigen::Index r = 0; r < u1.rows(); ++r) {
      m = std::max(m, std::hypot(u1(r, c), u2(r, c)));
    }
  }
  return m;
}

GriddedField synthesize(const GridPtr& grid, const LayeredField& f) {
  return GriddedField(grid, f.zgrid(), grid->values() * f.coeffs().transpose());
}

LayeredField project(const GriddedField& f, const BasisPtr& basis) {
  if (!f.v.allFinite()) throw ConfigError("non-finite samples in projection");
  Eigen::MatrixXd c = f.v.transpose() * f.grid->omega_weights().asDiagonal() * f.grid->values();
  return LayeredField(basis, f.zgrid, std::move(c));
}

VelocityField perp_gradient(const GridPtr& grid, const LayeredField& psi) {
  VelocityField v;
  v.grid = grid;
  v.zgrid = psi.zgrid();
  v.u1 = -(grid->d2() * psi.coeffs().transpose());
  v.u2 = grid->d1() * psi.coeffs().transpose();
  v.provenance = Provenance::raw;
  return v;
}

MollifiedTables::MollifiedTables(GridPtr grid, ZGridPtr zgrid, const Mollifier& mol)
    : grid_(std::move(grid)), zgrid_(std::move(zgrid)) {
  const SpectralBasis& b = *grid_->basis();
  const DomainSpec& d = b.domain();
  const int n = b.size();
  const int g = grid_->points();
  d1_.resize(g, n);
  d2_.resize(g, n);
  constexpr double pi = std::numbers::pi;
  if (grid_->periodic()) {
    for (int i = 0; i < n; ++i) {
      const Mode& m = b.mode(i);
      const double sym = mol.symbol(2.0 * pi * m.m1 / d.lx) * mol.symbol(2.0 * pi * m.m2 / d.ly);
      d1_.col(i) = sym * grid_->d1().col(i);
      d2_.col(i) = sym * grid_->d2().col(i);
    }
  } else {
    // 1D convolutions of the zero-extended factors cos/sin(m pi x / L) chi_[0,L].
    auto tables = [&](int count, double length, int nodes, auto coord) {
      Eigen::MatrixXd cs = Eigen::MatrixXd::Zero(count + 1, nodes);
      Eigen::MatrixXd sn = Eigen::MatrixXd::Zero(count + 1, nodes);
      for (int m = 1; m <= count; ++m) {
        const double om = m * pi / length;
        for (int ix = 0; ix < nodes; ++ix) {
          double c = 0.0;
          double s = 0.0;
          for (std::size_t q = 0; q < mol.x_offsets().size(); ++q) {
            const double y = coord(ix) - mol.x_offsets()[q];
            if (y < 0.0 || y > length) continue;
            c += mol.x_weights()[q] * std::cos(om * y);
            s += mol.x_weights()[q] * std::sin(om * y);
          }
          cs(m, ix) = c;
          sn(m, ix) = s;
        }
      }
      return std::pair{cs, sn};
    };
    const auto [cx, sx] = tables(b.max_index_x(), d.lx, grid_->n1(), [&](int i) { return grid_->x1(i); });
    const auto [cy, sy] = tables(b.max_index_y(), d.ly, grid_->n2(), [&](int i) { return grid_->x2(i); });
    const double c0 = 2.0 / std::sqrt(d.lx * d.ly);
    for (int i = 0; i < n; ++i) {
      const Mode& m = b.mode(i);
      const double a1 = m.m1 * pi / d.lx;
      const double a2 = m.m2 * pi / d.ly;
      for (int iy = 0; iy < grid_->n2(); ++iy) {
        for (int ix = 0; ix < grid_->n1(); ++ix) {
          const int idx = grid_->index(ix, iy);
          d1_(idx, i) = c0 * a1 * cx(m.m1, ix) * sy(m.m2, iy);
          d2_(idx, i) = c0 * a2 * sx(m.m1, ix) * cy(m.m2, iy);
        }
      }
    }
  }
  zmat_ = mol.vertical_matrix(*zgrid_);
}

VelocityField MollifiedTables::velocity(const LayeredField& psi) const {
  if (psi.modes() != grid_->basis()->size() || psi.layers() != zgrid_->nodes()) {
    throw MismatchError("stream function does not match the mollified tables");
  }
  const Eigen::MatrixXd c = zmat_ * psi.coeffs();
  VelocityField v;
  v.grid = grid_;
  v.zgrid = zgrid_;
  v.u1 = -(d2_ * c.transpose());
  v.u2 = d1_ * c.transpose();
  v.provenance = Provenance::mollified;
  return v;
}

namespace {

// 1D convolution along one axis of a layer stored with the given strides.
void convolve_axis(const Grid2D& grid, const Mollifier& m, int axis, const double* in, double* out) {
  const int n_along = axis == 0 ? grid.n1() : grid.n2();
  const int n_across = axis == 0 ? grid.n2() : grid.n1();
  const double h = axis == 0 ? grid.h1() : grid.h2();
  const bool periodic = grid.periodic();
  auto at = [&](int along, int across) {
    return axis == 0 ? grid.index(along, across) : grid.index(across, along);
  };
  for (int c = 0; c < n_across; ++c) {
    for (int i = 0; i < n_along; ++i) {
      double acc = 0.0;
      for (std::size_t q = 0; q < m.x_offsets().size(); ++q) {
        const double f = i - m.x_offsets()[q] / h;
        const int i0 = static_cast<int>(std::floor(f));
        double w[4];
        cubic_weights(f - i0, w);
        double v = 0.0;
        for (int r = 0; r < 4; ++r) {
          int k = i0 - 1 + r;
          if (periodic) {
            k = wrap(k, n_along);
          } else if (k < 0 || k >= n_along) {
            continue;
          }
          v += w[r] * in[at(k, c)];
        }
        acc += m.x_weights()[q] * v;
      }
      out[at(i, c)] = acc;
    }
  }
}

}  // namespace

Eigen::MatrixXd mollify_layers(const Grid2D& grid, const ZGrid& zgrid, const Mollifier& m, const Eigen::MatrixXd& values) {
  if (values.rows() != grid.points() || values.cols() != zgrid.nodes()) throw MismatchError("layers do not match grids");
  Eigen::MatrixXd tmp(values.rows(), values.cols());
  Eigen::MatrixXd out(values.rows(), values.cols());
  const int nl = static_cast<int>(values.cols());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nl; ++j) {
    convolve_axis(grid, m, 0, values.col(j).data(), tmp.col(j).data());
    convolve_axis(grid, m, 1, tmp.col(j).data(), out.col(j).data());
  }
  const Eigen::SparseMatrix<double> zm = m.vertical_matrix(zgrid);
  return out * zm.transpose();
}

VelocityField mollify_velocity(const VelocityField& v, const Mollifier& m) {
  VelocityField out;
  out.grid = v.grid;
  out.zgrid = v.zgrid;
  out.u1 = mollify_layers(*v.grid, *v.zgrid, m, v.u1);
  out.u2 = mollify_layers(*v.grid, *v.zgrid, m, v.u2);
  out.provenance = Provenance::mollified;
  return out;
}

double interpolate(const Grid2D& grid, const double* values, double x1, double x2, bool clip) {
  double f1 = (x1 - grid.origin1()) / grid.h1();
  double f2 = (x2 - grid.origin2()) / grid.h2();
  const int n1 = grid.n1();
  const int n2 = grid.n2();
  if (!grid.periodic()) {
    f1 = std::clamp(f1, 0.0, static_cast<double>(n1 - 1));
    f2 = std::clamp(f2, 0.0, static_cast<double>(n2 - 1));
  }
  int i0 = static_cast<int>(std::floor(f1));
  int j0 = static_cast<int>(std::floor(f2));
  if (!grid.periodic()) {
    i0 = std::min(i0, n1 - 2);
    j0 = std::min(j0, n2 - 2);
  }
  double wx[4];
  double wy[4];
  cubic_weights(f1 - i0, wx);
  cubic_weights(f2 - j0, wy);
  auto idx1 = [&](int i) { return grid.periodic() ? wrap(i, n1) : std::clamp(i, 0, n1 - 1); };
  auto idx2 = [&](int j) { return grid.periodic() ? wrap(j, n2) : std::clamp(j, 0, n2 - 1); };
  double v = 0.0;
  for (int s = 0; s < 4; ++s) {
    const int jj = idx2(j0 - 1 + s);
    double row = 0.0;
    for (int r = 0; r < 4; ++r) row += wx[r] * values[grid.index(idx1(i0 - 1 + r), jj)];
    v += wy[s] * row;
  }
  if (clip) {
    const double a = values[grid.index(idx1(i0), idx2(j0))];
    const double b = values[grid.index(idx1(i0 + 1), idx2(j0))];
    const double c = values[grid.index(idx1(i0), idx2(j0 + 1))];
    const double d = values[grid.index(idx1(i0 + 1), idx2(j0 + 1))];
    const double lo = std::min({a, b, c, d});
    const double hi = std::max({a, b, c, d});
    v = std::clamp(v, lo, hi);
  }
  return v;
}

GriddedField advect(const GriddedField& f, const VelocityField& v, double dt, const AdvectOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (opts.require_mollified && v.provenance != Provenance::mollified) {
    throw ConfigError("the regularized system transports only by mollified velocities");
  }
  if (v.u1.rows() != f.v.rows() || v.u1.cols() != f.v.cols()) throw MismatchError("velocity and field grids differ");
  const Grid2D& g = *f.grid;
  const double cell = std::min(g.h1(), g.h2());
  const double vmax = v.max_speed();
  if (dt * vmax > cell) throw StepSizeError("advective step exceeds one grid cell");
  GriddedField out(f.grid, f.zgrid);
  const int nl = static_cast<int>(f.v.cols());
  const int n1 = g.n1();
  const int n2 = g.n2();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nl; ++j) {
    const double* u1 = v.u1.col(j).data();
    const double* u2 = v.u2.col(j).data();
    const double* src = f.v.col(j).data();
    double* dst = out.v.col(j).data();
    for (int iy = 0; iy < n2; ++iy) {
      for (int ix = 0; ix < n1; ++ix) {
        const int idx = g.index(ix, iy);
        const double x1 = g.x1(ix);
        const double x2 = g.x2(iy);
        const double m1 = x1 - 0.5 * dt * u1[idx];
        const double m2 = x2 - 0.5 * dt * u2[idx];
        const double d1 = x1 - dt * interpolate(g, u1, m1, m2, false);
        const double d2 = x2 - dt * interpolate(g, u2, m1, m2, false);
        dst[idx] = interpolate(g, src, d1, d2, true);
      }
    }
    if (opts.fix_mass) {
      const auto col = f.v.col(j);
      const double lo = col.minCoeff();
      const double hi = col.maxCoeff();
      double deficit = 0.0;
      for (int k = 0; k < g.points(); ++k) deficit += src[k] - dst[k];
      if (deficit != 0.0 && hi > lo) {
        double wsum = 0.0;
        for (int k = 0; k < g.points(); ++k) wsum += std::max(0.0, (dst[k] - lo) * (hi - dst[k]));
        if (wsum > 0.0) {
          double c = deficit / wsum;
          const double cmax = 1.0 / (hi - lo);
          c = std::clamp(c, -cmax, cmax);
          for (int k = 0; k < g.points(); ++k) {
            const double w = std::max(0.0, (dst[k] - lo) * (hi - dst[k]));
            dst[k] = std::clamp(dst[k] + c * w, lo, hi);
          }
        }
      }
    }
  }
  return out;
}

double transport_norm(const GriddedField& f, double p, NormWeight weight) {
  const Eigen::VectorXd zw = weight == NormWeight::w0 ? f.zgrid->w0_weights() : f.zgrid->weights();
  if (std::isinf(p)) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < f.v.cols(); ++j) {
      if (weight == NormWeight::w0 && zw[j] == 0.0) continue;
      m = std::max(m, f.v.col(j).cwiseAbs().maxCoeff());
    }
    return m;
  }
  if (!(p >= 1.0)) throw ConfigError("norm exponent must be at least 1");
  const double area = f.grid->cell_area();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < f.v.cols(); ++j) {
    double layer = 0.0;
    for (Eigen::Index g = 0; g < f.v.rows(); ++g) layer += std::pow(std::abs(f.v(g, j)), p);
    sum += zw[j] * area * layer;
  }
  return std::pow(sum, 1.0 / p);
}

Eigen::VectorXd layer_means(const GriddedField& f) {
  const double area = f.grid->cell_area() * f.grid->points();
  Eigen::VectorXd m(f.v.cols());
  for (Eigen::Index j = 0; j < f.v.cols(); ++j) m[j] = f.v.col(j).sum() * f.grid->cell_area() / area;
  return m;
}

}  // namespace wqg
