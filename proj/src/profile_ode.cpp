#include "wqg/profile_ode.hpp"

#include "wqg/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace wqg {

namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

constexpr int kSeriesTerms = 20;
constexpr double kSeriesRadius = 0.5;
constexpr double kMaxStep = 0.05;
// Backward sweeps start where the decaying solution is below e^{-kTailExponent}.
constexpr double kTailExponent = 600.0;

struct Series {
  double q = 2.0;
  // y = sum_j c_j w^{j q + s}, s = 0 for y1 and s = 1 for y2.
  std::array<double, kSeriesTerms> c1{};
  std::array<double, kSeriesTerms> c2{};

  explicit Series(double p) : q(p + 2.0) {
    c1[0] = 1.0;
    c2[0] = 1.0;
    for (int j = 1; j < kSeriesTerms; ++j) {
      const double e1 = j * q;
      const double e2 = j * q + 1.0;
      c1[j] = c1[j - 1] / (e1 * (e1 - 1.0));
      c2[j] = c2[j - 1] / (e2 * (e2 - 1.0));
    }
  }

  static double term(double c, double e, double w, int order) {
    if (order == 0) return c * std::pow(w, e);
    if (order == 1) return e == 0.0 ? 0.0 : c * e * std::pow(w, e - 1.0);
    if (e == 0.0 || e == 1.0) return 0.0;
    return c * e * (e - 1.0) * std::pow(w, e - 2.0);
  }

  double y1(double w, int order) const {
    double s = 0.0;
    for (int j = 0; j < kSeriesTerms; ++j) s += term(c1[static_cast<std::size_t>(j)], j * q, w, order);
    return s;
  }

  double y2(double w, int order) const {
    double s = 0.0;
    for (int j = 0; j < kSeriesTerms; ++j) s += term(c2[static_cast<std::size_t>(j)], j * q + 1.0, w, order);
    return s;
  }
};

struct Rhs {
  double p;
  void operator()(const State& y, State& dy, double w) const {
    dy[0] = y[1];
    dy[1] = std::pow(w, p) * y[0];
  }
};

// Forward shot from the series data with slope c.
// Returns -1 if W crosses zero (slope too negative), +1 if W turns upward, 0 if
// neither happens before w_max.
int classify_shot(double p, double c, double w_max) {
  const Series series(p);
  const double w0 = kSeriesRadius;
  State y{series.y1(w0, 0) + c * series.y2(w0, 0), series.y1(w0, 1) + c * series.y2(w0, 1)};
  if (y[0] < 0.0) return -1;
  if (y[1] > 0.0) return 1;
  auto stepper = odeint::make_controlled(1e-14, 1e-13, odeint::runge_kutta_dopri5<State>());
  const Rhs rhs{p};
  double w = w0;
  double dt = 1e-3;
  while (w < w_max) {
    dt = std::min({dt, kMaxStep, w_max - w});
    int tries = 0;
    while (stepper.try_step(rhs, y, w, dt) == odeint::fail) {
      if (++tries > 500) throw SolverError("profile shooting: step size control failed");
    }
    if (y[0] < 0.0) return -1;
    if (y[1] > 0.0) return 1;
  }
  return 0;
}

double shoot_slope(double p, double w_max) {
  double hi = 0.0;
  double lo = -1.0;
  if (classify_shot(p, hi, w_max) != 1) throw SolverError("profile shooting: zero slope does not turn upward");
  int expansions = 0;
  while (classify_shot(p, lo, w_max) != -1) {
    lo *= 2.0;
    if (++expansions > 40) throw SolverError("profile shooting: bracket does not enclose a sign change");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const int cls = classify_shot(p, mid, w_max);
    if (cls == 0) return mid;
    if (cls < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo)) break;
  }
  return 0.5 * (lo + hi);
}

double xi(double p, double w) { return 2.0 / (p + 2.0) * std::pow(w, 0.5 * (p + 2.0)); }

// Quintic Hermite basis on [0,1] and its first two derivatives.
struct Hermite5 {
  double v[6];
  Hermite5(double t, int order) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double t5 = t4 * t;
    if (order == 0) {
      v[0] = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
      v[1] = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
      v[2] = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
      v[3] = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
      v[4] = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
      v[5] = 0.5 * (t3 - 2.0 * t4 + t5);
    } else if (order == 1) {
      v[0] = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
      v[1] = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
      v[2] = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
      v[3] = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
      v[4] = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
      v[5] = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    } else {
      v[0] = -60.0 * t + 180.0 * t2 - 120.0 * t3;
      v[1] = -36.0 * t + 96.0 * t2 - 60.0 * t3;
      v[2] = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
      v[3] = 60.0 * t - 180.0 * t2 + 120.0 * t3;
      v[4] = -24.0 * t + 84.0 * t2 - 60.0 * t3;
      v[5] = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);
    }
  }
};

}  // namespace

double WProfile::series_value(double x, int order) const {
  const Series s(p);
  return s.y1(x, order) + table_slope * s.y2(x, order);
}

std::size_t WProfile::interval(double x) const {
  auto it = std::upper_bound(w.begin(), w.end(), x);
  std::size_t j = static_cast<std::size_t>(it - w.begin());
  if (j == 0) return 0;
  return std::min(j - 1, w.size() - 2);
}

namespace {

double hermite_eval(const WProfile& pr, std::size_t j, double x, int order) {
  const double x0 = pr.w[j];
  const double x1 = pr.w[j + 1];
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const Hermite5 b(t, order);
  const double dd0 = std::pow(x0, pr.p) * pr.W[j];
  const double dd1 = std::pow(x1, pr.p) * pr.W[j + 1];
  double s = b.v[0] * pr.W[j] + b.v[1] * h * pr.dW[j] + b.v[2] * h * h * dd0 + b.v[3] * pr.W[j + 1] +
             b.v[4] * h * pr.dW[j + 1] + b.v[5] * h * h * dd1;
  return s / std::pow(h, order);
}

}  // namespace

double WProfile::value(double x) const {
  if (x < 0.0) throw ConfigError("profile evaluated at negative w");
  if (x <= series_radius) return series_value(x, 0);
  if (x >= w_tail) {
    const double wt = w_tail;
    return W.back() * std::pow(x / wt, -0.25 * p) * std::exp(-(xi(p, x) - xi(p, wt)));
  }
  return hermite_eval(*this, interval(x), x, 0);
}

double WProfile::derivative(double x) const {
  if (x < 0.0) throw ConfigError("profile evaluated at negative w");
  if (x <= series_radius) return series_value(x, 1);
  if (x >= w_tail) {
    return -(std::pow(x, 0.5 * p) + 0.25 * p / x) * value(x);
  }
  return hermite_eval(*this, interval(x), x, 1);
}

double WProfile::second_derivative(double x) const {
  if (x <= series_radius) return series_value(x, 2);
  if (x >= w_tail) return std::pow(x, p) * value(x);
  return hermite_eval(*this, interval(x), x, 2);
}

double WProfile::decay_point(double level) const {
  if (level >= 1.0) return 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) {
    if (W[j] <= level) {
      double lo = w[j - 1];
      double hi = w[j];
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) <= level) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    }
  }
  double lo = w_tail;
  double hi = 2.0 * w_tail;
  while (value(hi) > level) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) <= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double WProfile::ode_residual() const {
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < w.size(); ++j) {
    const double x = 0.5 * (w[j] + w[j + 1]);
    const double wp = std::pow(x, p);
    const double r = std::abs(hermite_eval(*this, j, x, 2) - wp * hermite_eval(*this, j, x, 0)) / (1.0 + wp);
    worst = std::max(worst, r);
  }
  return worst;
}

WProfile solve_profile(double a, double w_max, double tol) {
  if (!(a < 1.0) || !std::isfinite(a)) throw ConfigError("profile requires a < 1");
  if (a < -10.0) throw ConfigError("profile supports a >= -10");
  if (!(w_max > 1.0) || !(tol > 0.0)) throw ConfigError("profile requires w_max > 1 and tol > 0");

  WProfile pr;
  pr.a = a;
  pr.p = a / (1.0 - a);
  pr.w_max = w_max;
  pr.tol = tol;
  pr.series_radius = kSeriesRadius;
  const double p = pr.p;
  const Series series(p);
  // WKB decay level exp(-2 w^{(p+2)/2} / (p+2)) rejects tables that are clearly too short.
  if (std::exp(-2.0 * std::pow(w_max, 0.5 * (p + 2.0)) / (p + 2.0)) > 100.0 * tol) {
    throw ConfigError("profile: w_max too small for the requested tolerance");
  }

  const double c_shoot = shoot_slope(p, w_max);

  // Backward sweep from the far field.
  const double w_far = std::min(w_max, std::pow(kTailExponent * 0.5 * (p + 2.0), 2.0 / (p + 2.0)));
  State y{1.0, -(std::pow(w_far, 0.5 * p) + 0.25 * p / w_far)};
  std::vector<double> ws{w_far};
  std::vector<State> ys{y};
  auto stepper = odeint::make_controlled(1e-15, 1e-14, odeint::runge_kutta_dopri5<State>());
  const Rhs rhs{p};
  double x = w_far;
  double dt = -1e-3;
  const double w0 = kSeriesRadius;
  while (x > w0) {
    dt = std::max({dt, -kMaxStep, w0 - x});
    int tries = 0;
    while (stepper.try_step(rhs, y, x, dt) == odeint::fail) {
      if (++tries > 500) throw SolverError("profile sweep: step size control failed");
    }
    if (x - w0 < 1e-14) x = w0;
    if (std::abs(y[0]) > 1e200) {
      for (auto& s : ys) {
        s[0] *= 1e-200;
        s[1] *= 1e-200;
      }
      y[0] *= 1e-200;
      y[1] *= 1e-200;
    }
    ws.push_back(x);
    ys.push_back(y);
  }
  // A sliver interval at the end of the sweep would make the interpolant's
  // second derivative rounding-dominated.
  if (ws.size() > 2 && ws[ws.size() - 2] - ws.back() < 1e-3 * kMaxStep) {
    ws.erase(ws.end() - 2);
    ys.erase(ys.end() - 2);
  }

  // Match to the series solution y1 + c y2 at w0 (scaled by W0).
  const double a11 = series.y1(w0, 0);
  const double a12 = series.y2(w0, 0);
  const double a21 = series.y1(w0, 1);
  const double a22 = series.y2(w0, 1);
  const double det = a11 * a22 - a12 * a21;
  const double w0_scale = (ys.back()[0] * a22 - a12 * ys.back()[1]) / det;
  const double c_scaled = (a11 * ys.back()[1] - a21 * ys.back()[0]) / det;
  if (!(w0_scale > 0.0) || !std::isfinite(w0_scale)) throw SolverError("profile sweep: normalization failed");
  pr.table_slope = c_scaled / w0_scale;

  const double rel = std::abs(pr.table_slope - c_shoot) / std::abs(c_shoot);
  if (rel > 1e-7) throw SolverError("profile: shooting and backward sweep disagree on W'(0)");

  pr.C_a = c_shoot;
  pr.kappa = -c_shoot;

  const std::size_t m = ws.size();
  pr.w.reserve(m + 1);
  pr.w.push_back(0.0);
  pr.W.push_back(1.0);
  pr.dW.push_back(pr.table_slope);
  for (std::size_t j = m; j-- > 0;) {
    pr.w.push_back(ws[j]);
    pr.W.push_back(ys[j][0] / w0_scale);
    pr.dW.push_back(ys[j][1] / w0_scale);
  }
  // The first node after zero is the series radius; its data come from the sweep.
  pr.w_tail = pr.w.back();

  if (pr.value(w_max) > tol) throw ConfigError("profile: w_max too small for the requested tolerance");

  // Fitted sandwich constants.
  double delta = std::numeric_limits<double>::infinity();
  double A = 0.0;
  for (std::size_t j = 1; j < pr.w.size(); ++j) {
    const double wj = pr.w[j];
    const double Wj = pr.W[j];
    if (!(Wj > 0.0)) continue;
    if (wj > 1.0) delta = std::min(delta, -std::log(Wj) / std::log(wj));
    if (wj <= 1.0) A = std::max(A, -std::log(Wj) / std::sqrt(wj));
  }
  double B = 0.0;
  for (std::size_t j = 1; j < pr.w.size(); ++j) {
    const double wj = pr.w[j];
    const double Wj = pr.W[j];
    if (!(Wj > 1e-300)) continue;
    B = std::max(B, (-std::log(Wj) - A * std::sqrt(wj)) / (wj * wj));
  }
  pr.A = A * (1.0 + 1e-9);
  pr.B = B * (1.0 + 1e-9);
  pr.delta = std::isfinite(delta) ? delta * (1.0 - 1e-9) : 0.0;
  return pr;
}

double kappa_quadrature(const WProfile& pr) {
  using boost::math::quadrature::gauss;
  const double p = pr.p;
  const double w0 = pr.series_radius;
  // Below the series radius W^2 and (W')^2 are products of power series and are
  // integrated term by term.
  const Series series(p);
  std::vector<std::pair<double, double>> terms;
  for (int j = 0; j < kSeriesTerms; ++j) {
    terms.emplace_back(series.c1[static_cast<std::size_t>(j)], j * series.q);
    terms.emplace_back(pr.table_slope * series.c2[static_cast<std::size_t>(j)], j * series.q + 1.0);
  }
  double sum = 0.0;
  for (const auto& [ci, ei] : terms) {
    for (const auto& [cj, ej] : terms) {
      const double e = p + ei + ej + 1.0;
      sum += ci * cj * std::pow(w0, e) / e;
      if (ei > 0.0 && ej > 0.0) {
        const double f = ei + ej - 1.0;
        sum += ci * ei * cj * ej * std::pow(w0, f) / f;
      }
    }
  }
  for (std::size_t j = 1; j + 1 < pr.w.size(); ++j) {
    sum += gauss<double, 10>::integrate(
        [&](double x) {
          const double W = pr.value(x);
          const double d = pr.derivative(x);
          return std::pow(x, p) * W * W + d * d;
        },
        pr.w[j], pr.w[j + 1]);
  }
  return sum;
}

double kappa_identity_check(const WProfile& pr) { return std::abs(kappa_quadrature(pr) - pr.kappa); }

std::shared_ptr<const WProfile> cached_profile(double a) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const WProfile>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(a);
  if (it != cache.end()) return it->second;
  auto pr = std::make_shared<const WProfile>(solve_profile(a));
  cache.emplace(a, pr);
  return pr;
}

}  // namespace wqg
