#pragma once

#include "wqg/spectral_basis.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace wqg {

// Vertical mesh uniform in s = z^{1-a}: z_j = z_max (j/M)^{1/(1-a)}.
//
// Piecewise-linear elements in s give the stiffness form
//   int z^a u_z v_z dz = (1-a) int u_s v_s ds
// and the lumped weights q_j = int hat_j dz = int hat_j s^p ds / (1-a), p = a/(1-a).
class ZGrid {
 public:
  ZGrid(double a, double z_max, int M);

  double a() const { return a_; }
  double p() const { return p_; }
  int M() const { return m_; }
  int nodes() const { return m_ + 1; }
  double z_max() const { return z_max_; }
  double s_max() const { return s_max_; }
  double ds() const { return ds_; }
  double z(int j) const { return z_[static_cast<std::size_t>(j)]; }
  double s(int j) const { return s_[static_cast<std::size_t>(j)]; }
  const Eigen::VectorXd& z_nodes() const { return z_; }
  const Eigen::VectorXd& s_nodes() const { return s_; }

  // lambda(z_j) = z_j^a, evaluated directly (infinite at z = 0 when a < 0).
  double lambda(int j) const;

  // Lumped quadrature weights of dz, lambda dz and w0 dz.
  const Eigen::VectorXd& weights() const { return q_; }
  Eigen::VectorXd lambda_weights() const;
  Eigen::VectorXd w0_weights() const;

  // Element stiffness (1-a)/ds of the s-form.
  double stiffness() const { return (1.0 - a_) / ds_; }

  bool operator==(const ZGrid& other) const;

 private:
  Eigen::VectorXd hat_weights(double exponent) const;

  double a_;
  double p_;
  int m_;
  double z_max_;
  double s_max_;
  double ds_;
  Eigen::VectorXd z_;
  Eigen::VectorXd s_;
  Eigen::VectorXd q_;
};

using ZGridPtr = std::shared_ptr<const ZGrid>;

// Continuous weight equal to 1 on z <= 1 and strictly decreasing to 0 beyond.
double w0_weight(double z);

// Coefficients of a z-graded stack of spectral fields: row j is layer z_j,
// column i is mode i.
class LayeredField {
 public:
  LayeredField() = default;
  LayeredField(BasisPtr basis, ZGridPtr zgrid);
  LayeredField(BasisPtr basis, ZGridPtr zgrid, Eigen::MatrixXd coeffs);

  const BasisPtr& basis() const { return basis_; }
  const ZGridPtr& zgrid() const { return zgrid_; }
  const Eigen::MatrixXd& coeffs() const { return c_; }
  Eigen::MatrixXd& coeffs() { return c_; }
  int layers() const { return static_cast<int>(c_.rows()); }
  int modes() const { return static_cast<int>(c_.cols()); }

  SpectralField layer(int j) const;
  void set_layer(int j, const SpectralField& f);

  LayeredField& operator+=(const LayeredField& other);
  LayeredField& operator-=(const LayeredField& other);
  LayeredField& operator*=(double s);

 private:
  BasisPtr basis_;
  ZGridPtr zgrid_;
  Eigen::MatrixXd c_;
};

LayeredField operator+(LayeredField a, const LayeredField& b);
LayeredField operator-(LayeredField a, const LayeredField& b);
LayeredField operator*(double s, LayeredField a);

void require_compatible(const LayeredField& a, const LayeredField& b);

// L^2(R_+ x Omega) norm and inner product by z-quadrature of layer Parseval sums.
double l2_norm(const LayeredField& u);
double inner(const LayeredField& u, const LayeredField& v);

// Per-mode pieces of the weighted Dirichlet form for a vertical profile u:
//   stiffness_form = (1-a) int u_s v_s ds,  mass_form = sum_j q_j u_j v_j.
double stiffness_form(const ZGrid& zg, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v);
double mass_form(const ZGrid& zg, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v);

// Discrete Delta_lambda on one mode: -(K u)_j / q_j - k u_j at nodes 0..M-1 (node 0
// with zero boundary flux) and 0 at the Dirichlet node M.
Eigen::VectorXd weighted_laplacian_mode(const ZGrid& zg, double k, const Eigen::Ref<const Eigen::VectorXd>& u);

// max over interior nodes of |(K u)_j + k q_j u_j| / ((|K| |u|)_j + k q_j |u_j|): the
// relative defect of discrete harmonicity. Unlike the pointwise Laplacian it is not
// amplified by the small weights q_j near z = 0 when a is close to 1.
double laplacian_defect(const ZGrid& zg, double k, const Eigen::Ref<const Eigen::VectorXd>& u);

}  // namespace wqg
