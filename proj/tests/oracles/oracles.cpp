#include "oracles.hpp"

#include <cmath>

namespace oracle {

namespace {

double simpson_rule(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_rule(f, a, fa, m, fm, lm, flm);
  const double right = simpson_rule(f, m, fm, b, fb, rm, frm);
  if (depth > 40 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b,
               double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  return simpson_rec(f, a, fa, b, fb, m, fm, simpson_rule(f, a, fa, b, fb, m, fm),
                     tol, 0);
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  int iters) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters; ++k) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double sn_ref(double c, double t) {
  if (c == 0.0) return t;
  if (c > 0.0) {
    const double s = std::sqrt(c);
    return std::sin(s * t) / s;
  }
  const double s = std::sqrt(-c);
  return std::sinh(s * t) / s;
}

double sn_prime_ref(double c, double t) {
  if (c == 0.0) return 1.0;
  if (c > 0.0) return std::cos(std::sqrt(c) * t);
  return std::cosh(std::sqrt(-c) * t);
}

double ball_volume_ref(int n, double c, double r) {
  const double area = n == 2 ? 2.0 * M_PI : 4.0 * M_PI;
  return area * simpson(
                    [&](double t) {
                      const double s = sn_ref(c, t);
                      return n == 2 ? s : s * s;
                    },
                    0.0, r, 1e-13);
}

double radial_p_laplacian_ref(double dg, double ddg, int n, double c, double d,
                              double p) {
  const double cot = sn_prime_ref(c, d) / sn_ref(c, d);
  return std::pow(std::abs(dg), p - 2.0) *
         ((p - 1.0) * ddg + (n - 1) * cot * dg);
}

double barrier_slack_ref(int n, double c, double p, double alpha, double mtilde,
                         double r, double beta, double d) {
  const double ra = std::pow(r, alpha);
  const double dv = -alpha * mtilde * ra * std::pow(d, -alpha - 1.0);
  const double ddv = alpha * (alpha + 1.0) * mtilde * ra * std::pow(d, -alpha - 2.0);
  const double rp = std::pow(r, p);
  return rp * radial_p_laplacian_ref(dv, ddv, n, c, d, p) -
         beta * rp * std::pow(std::abs(dv), p - 1.0);
}

Eigen::VectorXd geodesic_rk4(double c, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& v0, int steps) {
  if (c == 0.0) return x0 + v0;

  // inner product of the embedding: Euclidean (c > 0) or Minkowski with the
  // time-like first coordinate (c < 0)
  auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = a.dot(b);
    if (c < 0.0) s -= 2.0 * a[0] * b[0];
    return s;
  };
  auto acc = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    return (-c * inner(v, v)) * x;
  };

  Eigen::VectorXd x = x0, v = v0;
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1x = v, k1v = acc(x, v);
    const Eigen::VectorXd k2x = v + 0.5 * h * k1v,
                          k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
    const Eigen::VectorXd k3x = v + 0.5 * h * k2v,
                          k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
    const Eigen::VectorXd k4x = v + h * k3v,
                          k4v = acc(x + h * k3x, v + h * k3v);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return x;
}

double infconv_abs_ref(double x, double eps) {
  const double ax = std::abs(x);
  if (ax <= eps) return x * x / (2.0 * eps);
  return ax - 0.5 * eps;
}

double flat_hyperbola_level_measure_ref(double D, double t, double R) {
  const double rho = std::min(D / t, R);
  return M_PI * rho * rho;
}

}  // namespace oracle
