#include "wqg/spectral_basis.hpp"

#include "wqg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wqg {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Mode> torus_modes(const DomainSpec& d) {
  const double c1 = 2.0 * kPi / d.lx;
  const double c2 = 2.0 * kPi / d.ly;
  // Grow the index box until it certainly contains the n lowest eigenvalues.
  int r = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d.n)))) + 1);
  for (;;) {
    std::vector<Mode> modes;
    for (int m2 = 0; m2 <= r; ++m2) {
      for (int m1 = -r; m1 <= r; ++m1) {
        if (m2 == 0 && m1 <= 0) continue;
        const double k = c1 * c1 * m1 * m1 + c2 * c2 * m2 * m2;
        modes.push_back({k, m1, m2, false});
        modes.push_back({k, m1, m2, true});
      }
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
      if (a.k != b.k) return a.k < b.k;
      if (a.m2 != b.m2) return a.m2 < b.m2;
      if (a.m1 != b.m1) return a.m1 < b.m1;
      return !a.cosine && b.cosine;
    });
    if (static_cast<int>(modes.size()) >= d.n) {
      const double kn = modes[static_cast<std::size_t>(d.n - 1)].k;
      const double edge = std::min(c1 * c1, c2 * c2) * (r + 1.0) * (r + 1.0);
      if (kn < edge) {
        modes.resize(static_cast<std::size_t>(d.n));
        return modes;
      }
    }
    r *= 2;
  }
}

std::vector<Mode> rectangle_modes(const DomainSpec& d) {
  const double c1 = kPi / d.lx;
  const double c2 = kPi / d.ly;
  int r = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d.n)))) + 1);
  for (;;) {
    std::vector<Mode> modes;
    for (int m2 = 1; m2 <= r; ++m2) {
      for (int m1 = 1; m1 <= r; ++m1) {
        modes.push_back({c1 * c1 * m1 * m1 + c2 * c2 * m2 * m2, m1, m2, false});
      }
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
      if (a.k != b.k) return a.k < b.k;
      if (a.m2 != b.m2) return a.m2 < b.m2;
      return a.m1 < b.m1;
    });
    const double kn = modes[static_cast<std::size_t>(std::min<int>(d.n, static_cast<int>(modes.size())) - 1)].k;
    const double edge = std::min(c1 * c1, c2 * c2) * (r + 1.0) * (r + 1.0);
    if (static_cast<int>(modes.size()) >= d.n && kn < edge) {
      modes.resize(static_cast<std::size_t>(d.n));
      return modes;
    }
    r *= 2;
  }
}

}  // namespace

std::string to_string(DomainKind kind) {
  return kind == DomainKind::torus ? "torus" : "rectangle";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "torus") return DomainKind::torus;
  if (name == "rectangle") return DomainKind::rectangle;
  throw ConfigError("unsupported domain kind '" + name + "' (expected torus or rectangle)");
}

SpectralBasis::SpectralBasis(const DomainSpec& domain) : domain_(domain) {
  if (domain.n < 1) throw ConfigError("mode cutoff n must be at least 1");
  if (!(domain.lx > 0.0) || !(domain.ly > 0.0) || !std::isfinite(domain.lx) || !std::isfinite(domain.ly)) {
    throw ConfigError("domain side lengths must be positive and finite");
  }
  switch (domain.kind) {
    case DomainKind::torus: modes_ = torus_modes(domain); break;
    case DomainKind::rectangle: modes_ = rectangle_modes(domain); break;
    default: throw ConfigError("unsupported domain kind");
  }
  k_.resize(size());
  for (int i = 0; i < size(); ++i) {
    k_[i] = modes_[static_cast<std::size_t>(i)].k;
    max_m1_ = std::max(max_m1_, std::abs(modes_[static_cast<std::size_t>(i)].m1));
    max_m2_ = std::max(max_m2_, std::abs(modes_[static_cast<std::size_t>(i)].m2));
  }
}

double SpectralBasis::eval(int i, double x1, double x2) const {
  const Mode& m = mode(i);
  if (domain_.kind == DomainKind::torus) {
    const double phase = 2.0 * kPi * (m.m1 * x1 / domain_.lx + m.m2 * x2 / domain_.ly);
    const double c = std::sqrt(2.0 / area());
    return c * (m.cosine ? std::cos(phase) : std::sin(phase));
  }
  const double c = 2.0 / std::sqrt(area());
  return c * std::sin(m.m1 * kPi * x1 / domain_.lx) * std::sin(m.m2 * kPi * x2 / domain_.ly);
}

std::array<double, 2> SpectralBasis::grad(int i, double x1, double x2) const {
  const Mode& m = mode(i);
  if (domain_.kind == DomainKind::torus) {
    const double a1 = 2.0 * kPi * m.m1 / domain_.lx;
    const double a2 = 2.0 * kPi * m.m2 / domain_.ly;
    const double phase = a1 * x1 + a2 * x2;
    const double c = std::sqrt(2.0 / area());
    const double d = m.cosine ? -std::sin(phase) : std::cos(phase);
    return {c * a1 * d, c * a2 * d};
  }
  const double a1 = m.m1 * kPi / domain_.lx;
  const double a2 = m.m2 * kPi / domain_.ly;
  const double c = 2.0 / std::sqrt(area());
  return {c * a1 * std::cos(a1 * x1) * std::sin(a2 * x2), c * a2 * std::sin(a1 * x1) * std::cos(a2 * x2)};
}

double SpectralBasis::mixed_second(int i, double x1, double x2) const {
  const Mode& m = mode(i);
  if (domain_.kind == DomainKind::torus) {
    const double a1 = 2.0 * kPi * m.m1 / domain_.lx;
    const double a2 = 2.0 * kPi * m.m2 / domain_.ly;
    const double phase = a1 * x1 + a2 * x2;
    const double c = std::sqrt(2.0 / area());
    return -c * a1 * a2 * (m.cosine ? std::cos(phase) : std::sin(phase));
  }
  const double a1 = m.m1 * kPi / domain_.lx;
  const double a2 = m.m2 * kPi / domain_.ly;
  const double c = 2.0 / std::sqrt(area());
  return c * a1 * a2 * std::cos(a1 * x1) * std::cos(a2 * x2);
}

double SpectralBasis::factor_x(int m, bool cosine, double x) const {
  if (domain_.kind == DomainKind::torus) {
    const double phase = 2.0 * kPi * m * x / domain_.lx;
    return cosine ? std::cos(phase) : std::sin(phase);
  }
  return std::sin(m * kPi * x / domain_.lx);
}

double SpectralBasis::factor_y(int m, bool cosine, double y) const {
  if (domain_.kind == DomainKind::torus) {
    const double phase = 2.0 * kPi * m * y / domain_.ly;
    return cosine ? std::cos(phase) : std::sin(phase);
  }
  return std::sin(m * kPi * y / domain_.ly);
}

int SpectralBasis::min_grid_x() const {
  if (domain_.kind == DomainKind::torus) {
    int n = std::max({8, 4 * max_m1_, 3 * max_m1_ + 1});
    return n + (n % 2);
  }
  return std::max(8, 2 * max_m1_ - 1);
}

int SpectralBasis::min_grid_y() const {
  if (domain_.kind == DomainKind::torus) {
    int n = std::max({8, 4 * max_m2_, 3 * max_m2_ + 1});
    return n + (n % 2);
  }
  return std::max(8, 2 * max_m2_ - 1);
}

BasisPtr make_basis(const DomainSpec& domain) { return std::make_shared<const SpectralBasis>(domain); }

SpectralField::SpectralField(BasisPtr basis) : basis_(std::move(basis)) {
  coeffs_ = Eigen::VectorXd::Zero(basis_->size());
}

SpectralField::SpectralField(BasisPtr basis, Eigen::VectorXd coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_->size()) throw MismatchError("coefficient vector length does not match the basis");
}

SpectralField SpectralField::unit(BasisPtr basis, int i) {
  SpectralField f(std::move(basis));
  if (i < 0 || i >= f.size()) throw ConfigError("mode index out of range");
  f.coeffs_[i] = 1.0;
  return f;
}

double SpectralField::eval(double x1, double x2) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += coeffs_[i] * basis_->eval(i, x1, x2);
  return s;
}

void require_same_basis(const SpectralField& a, const SpectralField& b) {
  if (!a.basis() || !b.basis()) throw MismatchError("field without a basis");
  if (a.basis() != b.basis() && !(a.basis()->domain() == b.basis()->domain())) {
    throw MismatchError("fields live on different bases");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_basis(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_basis(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField frac_laplacian(const SpectralField& f, double s) {
  if (!std::isfinite(s) || std::abs(s) > kMaxFracExponent) {
    throw ConfigError("fractional exponent outside the admissible range");
  }
  SpectralField out = f;
  if (s == 0.0) return out;
  const Eigen::VectorXd& k = f.basis()->eigenvalues();
  for (int i = 0; i < f.size(); ++i) out.coeffs()[i] *= std::pow(k[i], 0.5 * s);
  return out;
}

double sobolev_norm(const SpectralField& f, double s) {
  const Eigen::VectorXd& k = f.basis()->eigenvalues();
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) sum += std::pow(k[i], s) * f.coeffs()[i] * f.coeffs()[i];
  return std::sqrt(sum);
}

double l2_norm(const SpectralField& f) { return f.coeffs().norm(); }

double inner(const SpectralField& a, const SpectralField& b) {
  require_same_basis(a, b);
  return a.coeffs().dot(b.coeffs());
}

Grid2D::Grid2D(BasisPtr basis, int nx, int ny, int margin) : basis_(std::move(basis)) {
  const DomainSpec& d = basis_->domain();
  periodic_ = d.kind == DomainKind::torus;
  if (nx < 1 || ny < 1) throw ConfigError("grid size must be positive");
  if (periodic_) {
    margin_ = 0;
    n1_ = nx;
    n2_ = ny;
    h1_ = d.lx / nx;
    h2_ = d.ly / ny;
    origin1_ = 0.0;
    origin2_ = 0.0;
  } else {
    margin_ = std::max(0, margin);
    n1_ = nx + 2 + 2 * margin_;
    n2_ = ny + 2 + 2 * margin_;
    h1_ = d.lx / (nx + 1);
    h2_ = d.ly / (ny + 1);
    origin1_ = -margin_ * h1_;
    origin2_ = -margin_ * h2_;
  }
  const int g = points();
  const int n = basis_->size();
  w_omega_ = Eigen::VectorXd::Zero(g);
  e_.resize(g, n);
  d1_.resize(g, n);
  d2_.resize(g, n);
  for (int iy = 0; iy < n2_; ++iy) {
    for (int ix = 0; ix < n1_; ++ix) {
      const int idx = index(ix, iy);
      const double y1 = x1(ix);
      const double y2 = x2(iy);
      bool interior = true;
      if (!periodic_) {
        const int jx = ix - margin_;
        const int jy = iy - margin_;
        interior = jx >= 1 && jx <= nx && jy >= 1 && jy <= ny;
      }
      if (interior) w_omega_[idx] = h1_ * h2_;
      for (int i = 0; i < n; ++i) {
        if (interior) {
          e_(idx, i) = basis_->eval(i, y1, y2);
          const auto gr = basis_->grad(i, y1, y2);
          d1_(idx, i) = gr[0];
          d2_(idx, i) = gr[1];
        } else {
          // Zero extension outside the rectangle; boundary values vanish anyway.
          e_(idx, i) = 0.0;
          d1_(idx, i) = 0.0;
          d2_(idx, i) = 0.0;
        }
      }
    }
  }
  if (!periodic_) {
    // Boundary nodes: the modes vanish, but their gradients do not.
    for (int iy = 0; iy < n2_; ++iy) {
      for (int ix = 0; ix < n1_; ++ix) {
        const int jx = ix - margin_;
        const int jy = iy - margin_;
        const bool on_closure = jx >= 0 && jx <= nx + 1 && jy >= 0 && jy <= ny + 1;
        const bool interior = jx >= 1 && jx <= nx && jy >= 1 && jy <= ny;
        if (!on_closure || interior) continue;
        const int idx = index(ix, iy);
        for (int i = 0; i < n; ++i) {
          const auto gr = basis_->grad(i, x1(ix), x2(iy));
          d1_(idx, i) = gr[0];
          d2_(idx, i) = gr[1];
        }
      }
    }
  }
}

std::shared_ptr<const Grid2D> Grid2D::for_basis(BasisPtr basis, int min_points, int margin) {
  int nx = std::max(basis->min_grid_x(), min_points);
  int ny = std::max(basis->min_grid_y(), min_points);
  if (basis->domain().kind == DomainKind::torus) {
    nx += nx % 2;
    ny += ny % 2;
  }
  return std::make_shared<const Grid2D>(basis, nx, ny, margin);
}

bool Grid2D::inside_closure(double y1, double y2) const {
  const DomainSpec& d = basis_->domain();
  if (periodic_) return true;
  return y1 >= 0.0 && y1 <= d.lx && y2 >= 0.0 && y2 <= d.ly;
}

SpectralField project(const GridPtr& grid, const Eigen::VectorXd& samples) {
  if (samples.size() != grid->points()) throw MismatchError("sample count does not match the grid");
  if (!samples.allFinite()) throw ConfigError("non-finite samples in projection");
  Eigen::VectorXd weighted = samples.cwiseProduct(grid->omega_weights());
  return SpectralField(grid->basis(), grid->values().transpose() * weighted);
}

SpectralField project(const BasisPtr& basis, const std::function<double(double, double)>& f) {
  auto grid = Grid2D::for_basis(basis, 0, 0);
  Eigen::VectorXd samples(grid->points());
  for (int iy = 0; iy < grid->n2(); ++iy) {
    for (int ix = 0; ix < grid->n1(); ++ix) {
      const int g = grid->index(ix, iy);
      samples[g] = grid->omega_weights()[g] > 0.0 ? f(grid->x1(ix), grid->x2(iy)) : 0.0;
    }
  }
  return project(grid, samples);
}

Eigen::VectorXd synthesize(const GridPtr& grid, const SpectralField& f) {
  if (f.size() != grid->basis()->size()) throw MismatchError("field does not match the grid basis");
  return grid->values() * f.coeffs();
}

GridVelocity perp_gradient(const GridPtr& grid, const SpectralField& f) {
  if (f.size() != grid->basis()->size()) throw MismatchError("field does not match the grid basis");
  GridVelocity v;
  v.u1 = -(grid->d2() * f.coeffs());
  v.u2 = grid->d1() * f.coeffs();
  return v;
}

Eigen::VectorXd perp_gradient_divergence(const GridPtr& grid, const SpectralField& f) {
  const SpectralBasis& b = *grid->basis();
  Eigen::VectorXd div = Eigen::VectorXd::Zero(grid->points());
  for (int iy = 0; iy < grid->n2(); ++iy) {
    for (int ix = 0; ix < grid->n1(); ++ix) {
      if (!grid->inside_closure(grid->x1(ix), grid->x2(iy))) continue;
      double s = 0.0;
      for (int i = 0; i < f.size(); ++i) {
        const double m12 = b.mixed_second(i, grid->x1(ix), grid->x2(iy));
        // d1(-d2 f) + d2(d1 f)
        s += f.coeffs()[i] * (-m12) + f.coeffs()[i] * m12;
      }
      div[grid->index(ix, iy)] = s;
    }
  }
  return div;
}

namespace {

// Fourier differentiation matrix for n equispaced points on a period of length L.
Eigen::MatrixXd fourier_diff_matrix(int n, double length) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * kPi / n;
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      if (j == l) continue;
      const int diff = j - l;
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      if (n % 2 == 0) {
        d(j, l) = 0.5 * sign / std::tan(0.5 * diff * h);
      } else {
        d(j, l) = 0.5 * sign / std::sin(0.5 * diff * h);
      }
    }
  }
  return d * (2.0 * kPi / length);
}

}  // namespace

Eigen::VectorXd spectral_divergence_periodic(const Grid2D& grid, const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) {
  if (!grid.periodic()) throw ConfigError("periodic spectral divergence requires a torus grid");
  const DomainSpec& d = grid.basis()->domain();
  const Eigen::MatrixXd dx = fourier_diff_matrix(grid.n1(), d.lx);
  const Eigen::MatrixXd dy = fourier_diff_matrix(grid.n2(), d.ly);
  // Column-major maps: rows index x1, columns index x2.
  Eigen::Map<const Eigen::MatrixXd> a(u1.data(), grid.n1(), grid.n2());
  Eigen::Map<const Eigen::MatrixXd> b(u2.data(), grid.n1(), grid.n2());
  Eigen::MatrixXd div = dx * a + b * dy.transpose();
  return Eigen::Map<Eigen::VectorXd>(div.data(), div.size());
}

}  // namespace wqg
