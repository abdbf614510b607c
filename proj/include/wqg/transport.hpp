#pragma once

#include "wqg/spectral_basis.hpp"
#include "wqg/zgrid.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace wqg {

// Tensor-product bump (1 - t^2)^3 sampled at midpoints of its support and
// normalized to unit discrete mass.
//   horizontal factor: support [-1/n, 1/n] per axis
//   vertical factor:   support [0, 2/n], applied as V(z) -> sum_q w_q V(z + zeta_q)
class Mollifier {
 public:
  explicit Mollifier(double n, int samples = 16);

  double n() const { return n_; }
  double width() const { return 1.0 / n_; }
  const std::vector<double>& x_offsets() const { return xo_; }
  const std::vector<double>& x_weights() const { return xw_; }
  const std::vector<double>& z_offsets() const { return zo_; }
  const std::vector<double>& z_weights() const { return zw_; }

  // sum_q w_q cos(omega y_q): the Fourier multiplier of one horizontal factor.
  double symbol(double omega) const;

  // Matrix acting on vertical profiles: row j averages the piecewise-linear (in
  // s) interpolant over [z_j, z_j + 2/n]; the profile is zero above z_max.
  Eigen::SparseMatrix<double> vertical_matrix(const ZGrid& zgrid) const;

 private:
  double n_;
  std::vector<double> xo_;
  std::vector<double> xw_;
  std::vector<double> zo_;
  std::vector<double> zw_;
};

// Values of a layered scalar on the nodes of a horizontal grid: column j is layer z_j.
struct GriddedField {
  GridPtr grid;
  ZGridPtr zgrid;
  Eigen::MatrixXd v;

  GriddedField() = default;
  GriddedField(GridPtr g, ZGridPtr z);
  GriddedField(GridPtr g, ZGridPtr z, Eigen::MatrixXd values);
};

enum class Provenance { raw, mollified };

struct VelocityField {
  GridPtr grid;
  ZGridPtr zgrid;
  Eigen::MatrixXd u1;
  Eigen::MatrixXd u2;
  Provenance provenance = Provenance::raw;

  double max_speed() const;
};

// Synthesis and projection between layered coefficients and gridded values.
GriddedField synthesize(const GridPtr& grid, const LayeredField& f);
LayeredField project(const GriddedField& f, const BasisPtr& basis);

// Raw perpendicular gradient of a layered stream function.
VelocityField perp_gradient(const GridPtr& grid, const LayeredField& psi);

// Perpendicular gradient of the stream function convolved with the mollifier.
// Horizontal convolution is applied to each zero-extended mode analytically;
// vertical convolution acts on the coefficient profiles.
class MollifiedTables {
 public:
  MollifiedTables(GridPtr grid, ZGridPtr zgrid, const Mollifier& mollifier);

  const Eigen::MatrixXd& d1() const { return d1_; }
  const Eigen::MatrixXd& d2() const { return d2_; }
  const Eigen::SparseMatrix<double>& vertical() const { return zmat_; }
  const GridPtr& grid() const { return grid_; }

  VelocityField velocity(const LayeredField& psi) const;

 private:
  GridPtr grid_;
  ZGridPtr zgrid_;
  Eigen::MatrixXd d1_;
  Eigen::MatrixXd d2_;
  Eigen::SparseMatrix<double> zmat_;
};

// Convolution of gridded layers with the mollifier (horizontal by cubic
// interpolation along each axis, vertical by the profile matrix). Values outside
// a non-periodic grid are zero.
Eigen::MatrixXd mollify_layers(const Grid2D& grid, const ZGrid& zgrid, const Mollifier& m, const Eigen::MatrixXd& values);

VelocityField mollify_velocity(const VelocityField& v, const Mollifier& m);

struct AdvectOptions {
  bool require_mollified = false;
  bool fix_mass = true;
};

// Semi-Lagrangian step: F(x) <- F(X), with the departure point X from a midpoint
// rule on the frozen velocity and bicubic interpolation clipped to the values at
// the four surrounding nodes. A mass fixer then restores each layer's sum with
// increments proportional to (F - lo)(hi - F), so layer bounds are kept.
GriddedField advect(const GriddedField& f, const VelocityField& v, double dt, const AdvectOptions& opts = {});

enum class NormWeight { none, w0 };

// Weighted L^p norm over grid x vertical mesh; p = infinity gives the max.
double transport_norm(const GriddedField& f, double p, NormWeight weight = NormWeight::none);

// Layer means over Omega (torus) or over the grid region (rectangle).
Eigen::VectorXd layer_means(const GriddedField& f);

// Bicubic Lagrange value at a point; clipped to the enclosing cell's nodes if requested.
double interpolate(const Grid2D& grid, const double* values, double x1, double x2, bool clip);

}  // namespace wqg
