#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wqg {

enum class DomainKind { torus, rectangle };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

struct DomainSpec {
  DomainKind kind = DomainKind::torus;
  double lx = 2.0 * 3.14159265358979323846;
  double ly = 2.0 * 3.14159265358979323846;
  int n = 16;

  bool operator==(const DomainSpec&) const = default;
};

// One eigenfunction of -Laplacian on the domain.
//   torus:     sqrt(2/|Omega|) * {sin, cos}(2 pi (m1 x1 / lx + m2 x2 / ly))
//   rectangle: 2/sqrt(lx ly) * sin(m1 pi x1 / lx) sin(m2 pi x2 / ly)
struct Mode {
  double k = 0.0;
  int m1 = 0;
  int m2 = 0;
  bool cosine = false;
};

class SpectralBasis {
 public:
  explicit SpectralBasis(const DomainSpec& domain);

  const DomainSpec& domain() const { return domain_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const Mode& mode(int i) const { return modes_[static_cast<std::size_t>(i)]; }
  double eigenvalue(int i) const { return modes_[static_cast<std::size_t>(i)].k; }
  const Eigen::VectorXd& eigenvalues() const { return k_; }
  double area() const { return domain_.lx * domain_.ly; }

  double eval(int i, double x1, double x2) const;
  std::array<double, 2> grad(int i, double x1, double x2) const;
  double mixed_second(int i, double x1, double x2) const;

  // Largest |m1|, |m2| over the stored modes.
  int max_index_x() const { return max_m1_; }
  int max_index_y() const { return max_m2_; }

  // Smallest collocation size per axis that resolves every mode with at least
  // four points per wavelength and integrates products of three modes exactly.
  int min_grid_x() const;
  int min_grid_y() const;

  // Separable factor of mode i along one axis, evaluated at a coordinate.
  // For torus modes the factorisation is a sum of two products; see the
  // mollified tables in transport for how these are combined.
  double factor_x(int m, bool cosine, double x) const;
  double factor_y(int m, bool cosine, double y) const;

 private:
  DomainSpec domain_;
  std::vector<Mode> modes_;
  Eigen::VectorXd k_;
  int max_m1_ = 0;
  int max_m2_ = 0;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

BasisPtr make_basis(const DomainSpec& domain);

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(BasisPtr basis);
  SpectralField(BasisPtr basis, Eigen::VectorXd coeffs);

  static SpectralField unit(BasisPtr basis, int i);

  const BasisPtr& basis() const { return basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  double eval(double x1, double x2) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

void require_same_basis(const SpectralField& a, const SpectralField& b);

// Lambda^s with Lambda = sqrt(-Laplacian): coefficient i scaled by k_i^{s/2}.
SpectralField frac_laplacian(const SpectralField& f, double s);

// (sum_i k_i^s f_i^2)^{1/2}.
double sobolev_norm(const SpectralField& f, double s);
double l2_norm(const SpectralField& f);
double inner(const SpectralField& a, const SpectralField& b);

// Admissible exponent range for frac_laplacian and sobolev_norm.
inline constexpr double kMaxFracExponent = 4.0;

// Uniform tensor grid on (or around) the domain with precomputed mode tables.
//   torus:     x = i * lx / nx, i = 0..nx-1, periodic.
//   rectangle: x = i * lx / (nx + 1), i = -margin..nx+1+margin; nodes outside the
//              open rectangle carry zero quadrature weight.
// Node index g = ix + n1 * iy, with ix fastest.
class Grid2D {
 public:
  Grid2D(BasisPtr basis, int nx, int ny, int margin = 0);

  // Grid with the minimum size the basis requires, optionally refined.
  static std::shared_ptr<const Grid2D> for_basis(BasisPtr basis, int min_points = 0, int margin = 0);

  const BasisPtr& basis() const { return basis_; }
  bool periodic() const { return periodic_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int points() const { return n1_ * n2_; }
  int margin() const { return margin_; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  double x1(int ix) const { return origin1_ + ix * h1_; }
  double x2(int iy) const { return origin2_ + iy * h2_; }
  double origin1() const { return origin1_; }
  double origin2() const { return origin2_; }
  int index(int ix, int iy) const { return ix + n1_ * iy; }

  // Quadrature weights of the integral over Omega (zero outside Omega).
  const Eigen::VectorXd& omega_weights() const { return w_omega_; }
  // Cell area h1*h2, the weight of the integral over the whole grid region.
  double cell_area() const { return h1_ * h2_; }

  // Mode tables: column i holds e_i, d1 e_i, d2 e_i at every node.
  const Eigen::MatrixXd& values() const { return e_; }
  const Eigen::MatrixXd& d1() const { return d1_; }
  const Eigen::MatrixXd& d2() const { return d2_; }

  bool inside_closure(double x1, double x2) const;

 private:
  BasisPtr basis_;
  bool periodic_ = true;
  int n1_ = 0;
  int n2_ = 0;
  int margin_ = 0;
  double h1_ = 0.0;
  double h2_ = 0.0;
  double origin1_ = 0.0;
  double origin2_ = 0.0;
  Eigen::VectorXd w_omega_;
  Eigen::MatrixXd e_;
  Eigen::MatrixXd d1_;
  Eigen::MatrixXd d2_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

// Projection of gridded samples: coefficient i = sum_g w_g f_g e_i(x_g).
SpectralField project(const GridPtr& grid, const Eigen::VectorXd& samples);
// Projection of a function by quadrature on the basis' default grid.
SpectralField project(const BasisPtr& basis, const std::function<double(double, double)>& f);

Eigen::VectorXd synthesize(const GridPtr& grid, const SpectralField& f);

struct GridVelocity {
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
};

// (-d2 f, d1 f) at the grid nodes from analytic mode derivatives.
GridVelocity perp_gradient(const GridPtr& grid, const SpectralField& f);

// Mode-wise divergence of the perpendicular gradient of f at the grid nodes.
// Mixed derivatives are evaluated once per mode, so the result is the
// difference of identical floating point products.
Eigen::VectorXd perp_gradient_divergence(const GridPtr& grid, const SpectralField& f);

// Pseudo-spectral divergence of gridded periodic data on a torus grid, computed
// with the discrete Fourier transform of each axis.
Eigen::VectorXd spectral_divergence_periodic(const Grid2D& grid, const Eigen::VectorXd& u1,
                                             const Eigen::VectorXd& u2);

}  // namespace wqg
