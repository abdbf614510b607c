#pragma once

#include <memory>
#include <vector>

namespace wqg {

// Decaying solution of W'' = w^p W, p = a/(1-a), with W(0) = 1 and W -> 0 at infinity.
//
// The table is built by integrating backward from the far field, where the
// decaying solution is the dominant one, and is matched near w = 0 to the
// convergent Frobenius series. The initial slope is also found independently by
// shooting and bisection; the two values must agree.
struct WProfile {
  double a = 0.0;
  double p = 0.0;
  double w_max = 40.0;
  double tol = 1e-10;

  std::vector<double> w;
  std::vector<double> W;
  std::vector<double> dW;

  double C_a = -1.0;           // W'(0)
  double kappa = 1.0;          // -C_a
  double table_slope = -1.0;   // W'(0) recovered from the backward sweep
  double series_radius = 0.0;  // below this w the series is evaluated directly

  // Fitted bounds exp(-A sqrt(w) - B w^2) <= W <= min(1, w^-delta) on the table.
  double A = 0.0;
  double B = 0.0;
  double delta = 0.0;

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  // Smallest tabulated w with W(w) <= level.
  double decay_point(double level) const;

  // max |W'' - w^p W| / (1 + w^p) over interval midpoints of the table.
  double ode_residual() const;

 private:
  friend WProfile solve_profile(double a, double w_max, double tol);
  double w_tail = 0.0;
  double series_value(double x, int order) const;
  std::size_t interval(double x) const;
};

WProfile solve_profile(double a, double w_max = 40.0, double tol = 1e-10);

// J(W) = int_0^inf w^p W^2 + (W')^2 dw by Gauss-Legendre quadrature on the table.
double kappa_quadrature(const WProfile& profile);

// |J(W) - (-W'(0))|.
double kappa_identity_check(const WProfile& profile);

// Shared immutable profile per value of a, built once with default settings.
std::shared_ptr<const WProfile> cached_profile(double a);

}  // namespace wqg
