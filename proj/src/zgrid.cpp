#include "wqg/zgrid.hpp"

#include "wqg/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>

namespace wqg {

ZGrid::ZGrid(double a, double z_max, int M) : a_(a), m_(M), z_max_(z_max) {
  if (!(a < 1.0) || !std::isfinite(a)) throw ConfigError("vertical mesh requires a < 1");
  if (M < 4) throw ConfigError("vertical mesh needs at least 4 cells");
  if (!(z_max > 0.0) || !std::isfinite(z_max)) throw ConfigError("z_max must be positive and finite");
  p_ = a / (1.0 - a);
  s_max_ = std::pow(z_max, 1.0 - a);
  ds_ = s_max_ / M;
  z_.resize(M + 1);
  s_.resize(M + 1);
  for (int j = 0; j <= M; ++j) {
    s_[j] = s_max_ * static_cast<double>(j) / M;
    z_[j] = j == M ? z_max : z_max * std::pow(static_cast<double>(j) / M, 1.0 / (1.0 - a));
  }
  q_ = hat_weights(p_);
}

double ZGrid::lambda(int j) const {
  const double zj = z(j);
  if (a_ == 0.0) return 1.0;
  if (zj == 0.0) return a_ > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(zj, a_);
}

Eigen::VectorXd ZGrid::hat_weights(double e) const {
  if (!(e > -1.0)) throw ConfigError("vertical weight is not integrable at z = 0");
  using boost::math::quadrature::gauss;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m_ + 1);
  const double h = ds_;
  for (int el = 0; el < m_; ++el) {
    const double sl = s_[el];
    const double sr = s_[el + 1];
    double left = 0.0;
    double right = 0.0;
    if (el == 0) {
      // sl = 0: int_0^h (h-s)/h s^e ds and int_0^h s/h s^e ds in closed form.
      const double i0 = std::pow(h, e + 1.0) / (e + 1.0);
      const double i1 = std::pow(h, e + 2.0) / (e + 2.0);
      left = i0 - i1 / h;
      right = i1 / h;
    } else {
      left = gauss<double, 16>::integrate([&](double s) { return (sr - s) / h * std::pow(s, e); }, sl, sr);
      right = gauss<double, 16>::integrate([&](double s) { return (s - sl) / h * std::pow(s, e); }, sl, sr);
    }
    w[el] += left / (1.0 - a_);
    w[el + 1] += right / (1.0 - a_);
  }
  return w;
}

Eigen::VectorXd ZGrid::lambda_weights() const { return hat_weights(2.0 * p_); }

Eigen::VectorXd ZGrid::w0_weights() const {
  Eigen::VectorXd w = q_;
  for (int j = 0; j <= m_; ++j) w[j] *= w0_weight(z(j));
  return w;
}

bool ZGrid::operator==(const ZGrid& other) const {
  return a_ == other.a_ && m_ == other.m_ && z_max_ == other.z_max_;
}

double w0_weight(double z) { return z <= 1.0 ? 1.0 : std::exp(-(z - 1.0)); }

LayeredField::LayeredField(BasisPtr basis, ZGridPtr zgrid) : basis_(std::move(basis)), zgrid_(std::move(zgrid)) {
  c_ = Eigen::MatrixXd::Zero(zgrid_->nodes(), basis_->size());
}

LayeredField::LayeredField(BasisPtr basis, ZGridPtr zgrid, Eigen::MatrixXd coeffs)
    : basis_(std::move(basis)), zgrid_(std::move(zgrid)), c_(std::move(coeffs)) {
  if (c_.rows() != zgrid_->nodes() || c_.cols() != basis_->size()) {
    throw MismatchError("layered coefficients do not match basis and vertical mesh");
  }
}

SpectralField LayeredField::layer(int j) const { return SpectralField(basis_, c_.row(j).transpose()); }

void LayeredField::set_layer(int j, const SpectralField& f) {
  if (f.size() != modes()) throw MismatchError("layer size mismatch");
  c_.row(j) = f.coeffs().transpose();
}

void require_compatible(const LayeredField& a, const LayeredField& b) {
  if (a.modes() != b.modes() || a.layers() != b.layers()) throw MismatchError("layered fields have different shapes");
  if (a.zgrid() != b.zgrid() && !(*a.zgrid() == *b.zgrid())) throw MismatchError("layered fields use different vertical meshes");
  if (a.basis() != b.basis() && !(a.basis()->domain() == b.basis()->domain())) {
    throw MismatchError("layered fields use different bases");
  }
}

LayeredField& LayeredField::operator+=(const LayeredField& other) {
  require_compatible(*this, other);
  c_ += other.c_;
  return *this;
}

LayeredField& LayeredField::operator-=(const LayeredField& other) {
  require_compatible(*this, other);
  c_ -= other.c_;
  return *this;
}

LayeredField& LayeredField::operator*=(double s) {
  c_ *= s;
  return *this;
}

LayeredField operator+(LayeredField a, const LayeredField& b) { return a += b; }
LayeredField operator-(LayeredField a, const LayeredField& b) { return a -= b; }
LayeredField operator*(double s, LayeredField a) { return a *= s; }

double inner(const LayeredField& u, const LayeredField& v) {
  require_compatible(u, v);
  const Eigen::VectorXd& q = u.zgrid()->weights();
  double sum = 0.0;
  for (int j = 0; j < u.layers(); ++j) sum += q[j] * u.coeffs().row(j).dot(v.coeffs().row(j));
  return sum;
}

double l2_norm(const LayeredField& u) { return std::sqrt(inner(u, u)); }

double stiffness_form(const ZGrid& zg, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v) {
  double sum = 0.0;
  for (int j = 0; j < zg.M(); ++j) sum += (u[j + 1] - u[j]) * (v[j + 1] - v[j]);
  return zg.stiffness() * sum;
}

double mass_form(const ZGrid& zg, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return (zg.weights().array() * u.array() * v.array()).sum();
}

Eigen::VectorXd weighted_laplacian_mode(const ZGrid& zg, double k, const Eigen::Ref<const Eigen::VectorXd>& u) {
  const int m = zg.M();
  const double c = zg.stiffness();
  const Eigen::VectorXd& q = zg.weights();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m + 1);
  for (int j = 0; j < m; ++j) {
    double ku = c * (u[j] - u[j + 1]);
    if (j > 0) ku += c * (u[j] - u[j - 1]);
    out[j] = -ku / q[j] - k * u[j];
  }
  return out;
}

double laplacian_defect(const ZGrid& zg, double k, const Eigen::Ref<const Eigen::VectorXd>& u) {
  const double c = zg.stiffness();
  const Eigen::VectorXd& q = zg.weights();
  double worst = 0.0;
  for (int j = 1; j < zg.M(); ++j) {
    const double r = c * (2.0 * u[j] - u[j - 1] - u[j + 1]) + k * q[j] * u[j];
    const double scale = c * (2.0 * std::abs(u[j]) + std::abs(u[j - 1]) + std::abs(u[j + 1])) + k * q[j] * std::abs(u[j]);
    if (scale > 0.0) worst = std::max(worst, std::abs(r) / scale);
  }
  return worst;
}

}  // namespace wqg
