#include "hlab/geometry.hpp"

#include <cmath>
#include <limits>

namespace hlab::geom {

namespace {

constexpr double kPoleTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& what) {
  throw std::domain_error("geometry: " + what);
}

double wrap_2pi(double t) {
  const double two_pi = 2.0 * kPi;
  double w = std::fmod(t, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

}  // namespace

// --- comparison functions ---------------------------------------------------

double comparison_S(double tau) {
  if (!(tau >= 0.0)) fail("comparison_S needs tau >= 0");
  if (tau < kSeriesThreshold) {
    const double t2 = tau * tau;
    // sinh(t)/t = 1 + t^2/6 + t^4/120 + t^6/5040 + t^8/362880 + t^10/39916800
    return 1.0 + t2 * (1.0 / 6.0 +
                       t2 * (1.0 / 120.0 +
                             t2 * (1.0 / 5040.0 +
                                   t2 * (1.0 / 362880.0 +
                                         t2 * (1.0 / 39916800.0)))));
  }
  return std::sinh(tau) / tau;
}

double comparison_H(double tau) {
  if (!(tau >= 0.0)) fail("comparison_H needs tau >= 0");
  if (tau < kSeriesThreshold) {
    const double t2 = tau * tau;
    // t coth(t) = 1 + t^2/3 - t^4/45 + 2 t^6/945 - t^8/4725 + 2 t^10/93555
    return 1.0 + t2 * (1.0 / 3.0 +
                       t2 * (-1.0 / 45.0 +
                             t2 * (2.0 / 945.0 +
                                   t2 * (-1.0 / 4725.0 +
                                         t2 * (2.0 / 93555.0)))));
  }
  return tau / std::tanh(tau);
}

double circ_S(double tau) {
  if (!(tau >= 0.0)) fail("circ_S needs tau >= 0");
  if (tau < kSeriesThreshold) {
    const double t2 = tau * tau;
    return 1.0 + t2 * (-1.0 / 6.0 +
                       t2 * (1.0 / 120.0 +
                             t2 * (-1.0 / 5040.0 +
                                   t2 * (1.0 / 362880.0 +
                                         t2 * (-1.0 / 39916800.0)))));
  }
  return std::sin(tau) / tau;
}

double circ_H(double tau) {
  if (!(tau >= 0.0)) fail("circ_H needs tau >= 0");
  if (tau >= kPi) fail("circ_H needs tau < pi");
  if (tau < kSeriesThreshold) {
    const double t2 = tau * tau;
    return 1.0 + t2 * (-1.0 / 3.0 +
                       t2 * (-1.0 / 45.0 +
                             t2 * (-2.0 / 945.0 +
                                   t2 * (-1.0 / 4725.0 +
                                         t2 * (-2.0 / 93555.0)))));
  }
  return tau * std::cos(tau) / std::sin(tau);
}

// --- model ------------------------------------------------------------------

double Model::a() const {
  if (flat()) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(std::abs(curvature));
}

double Model::radius_cap() const {
  if (spherical()) return 0.5 * kPi * a();
  return std::numeric_limits<double>::infinity();
}

bool Model::admissible_radius(double r) const {
  return r > 0.0 && r < radius_cap();
}

Vec Model::base() const {
  Vec b = Vec::Zero();
  if (!flat()) b[0] = a();
  return b;
}

Model make_model(int n, double curvature) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("geometry: dimension must be 2 or 3");
  if (!std::isfinite(curvature))
    throw std::invalid_argument("geometry: curvature must be finite");
  return Model{n, curvature};
}

// --- charts and frames ------------------------------------------------------

Vec chart_direction(const Model& m, double theta, double phi) {
  Vec u = Vec::Zero();
  if (m.n == 2) {
    u[1] = std::cos(theta);
    u[2] = std::sin(theta);
  } else {
    u[1] = std::sin(theta) * std::cos(phi);
    u[2] = std::sin(theta) * std::sin(phi);
    u[3] = std::cos(theta);
  }
  return u;
}

Vec point_of(const Model& m, const PolarCoords& pc) {
  if (!(pc.r >= 0.0)) fail("point_of needs r >= 0");
  const Vec u = chart_direction(m, pc.theta, pc.phi);
  Vec x = Vec::Zero();
  if (m.flat()) {
    x = pc.r * u;
  } else if (m.hyperbolic()) {
    const double a = m.a(), tau = pc.r / a;
    x = a * std::sinh(tau) * u;
    x[0] = a * std::cosh(tau);
  } else {
    const double a = m.a(), tau = pc.r / a;
    if (tau > kPi) fail("point_of: spherical radius beyond the cut locus");
    x = a * std::sin(tau) * u;
    x[0] = a * std::cos(tau);
  }
  return x;
}

PolarCoords chart_of(const Model& m, const Vec& x) {
  PolarCoords pc;
  pc.r = distance(m, m.base(), x);
  if (pc.r < kPoleTol) return pc;

  // slots 1..n of the embedding are proportional to the chart direction
  Vec u = x;
  u[0] = 0.0;
  const double s = u.norm();
  if (s < kPoleTol) return pc;  // spherical antipode of the base; leave angles 0
  u /= s;
  if (m.n == 2) {
    pc.theta = wrap_2pi(std::atan2(u[2], u[1]));
  } else {
    pc.theta = std::acos(std::clamp(u[3], -1.0, 1.0));
    const double sin_t = std::hypot(u[1], u[2]);
    pc.phi = sin_t < kPoleTol ? 0.0 : wrap_2pi(std::atan2(u[2], u[1]));
  }
  return pc;
}

FrameMat frame_at(const Model& m, const Vec& x) {
  const PolarCoords pc = chart_of(m, x);
  FrameMat F(4, m.n);
  F.setZero();
  if (pc.r < kPoleTol) {
    for (int i = 0; i < m.n; ++i) F(i + 1, i) = 1.0;
    return F;
  }

  const Vec u = chart_direction(m, pc.theta, pc.phi);
  // e_r = d/dr of the embedded chart point
  if (m.flat()) {
    F.col(0) = u;
  } else if (m.hyperbolic()) {
    const double tau = pc.r / m.a();
    F.col(0) = std::cosh(tau) * u;
    F(0, 0) = std::sinh(tau);
  } else {
    const double tau = pc.r / m.a();
    F.col(0) = std::cos(tau) * u;
    F(0, 0) = -std::sin(tau);
  }
  // angular directions: unit-speed derivatives of the chart direction only
  if (m.n == 2) {
    F(1, 1) = -std::sin(pc.theta);
    F(2, 1) = std::cos(pc.theta);
  } else {
    const double st = std::sin(pc.theta), ct = std::cos(pc.theta);
    const double sp = std::sin(pc.phi), cp = std::cos(pc.phi);
    F(1, 1) = ct * cp;
    F(2, 1) = ct * sp;
    F(3, 1) = -st;
    F(1, 2) = -sp;
    F(2, 2) = cp;
  }
  return F;
}

double ambient_inner(const Model& m, const Vec& u, const Vec& v) {
  double dot = u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
  if (m.hyperbolic()) return dot - u[0] * v[0];
  return dot + u[0] * v[0];
}

// --- metric maps ------------------------------------------------------------

double distance(const Model& m, const Vec& x, const Vec& y) {
  if (m.flat()) return (x - y).norm();
  const double a = m.a();
  if (m.hyperbolic()) {
    // chordal Minkowski length: |x - y|_M^2 = 4 a^2 sinh^2(d / 2a)
    const Vec w = x - y;
    const double q = std::max(0.0, ambient_inner(m, w, w));
    return 2.0 * a * std::asinh(0.5 * std::sqrt(q) / a);
  }
  // Euclidean chord: |x - y| = 2 a sin(d / 2a)
  const double c = std::clamp(0.5 * (x - y).norm() / a, 0.0, 1.0);
  return 2.0 * a * std::asin(c);
}

Vec exp_map(const Model& m, const TangentVector& v) {
  FrameMat F = frame_at(m, v.base);
  Vec V = Vec::Zero();
  for (int i = 0; i < m.n; ++i) V += v.comps[i] * F.col(i);

  if (m.flat()) return v.base + V;
  const double a = m.a(), t = v.comps.norm(), tau = t / a;
  if (m.hyperbolic()) {
    return std::cosh(tau) * v.base + comparison_S(tau) * V;
  }
  if (tau >= kPi) fail("exp_map: spherical step beyond the injectivity radius");
  return std::cos(tau) * v.base + circ_S(tau) * V;
}

TangentVector log_map(const Model& m, const Vec& x, const Vec& y) {
  TangentVector tv;
  tv.base = x;
  tv.comps = VecN::Zero(m.n);
  const double d = distance(m, x, y);
  if (d < kPoleTol) return tv;

  Vec T;
  if (m.flat()) {
    T = y - x;
  } else {
    const double a = m.a();
    if (m.spherical() && d > kPi * a * (1.0 - 1e-9))
      fail("log_map: nearly antipodal spherical pair");
    // project y onto the tangent space at x; the result points along the
    // geodesic and has ambient length sn(d)
    const double sxy = ambient_inner(m, x, y);
    T = m.hyperbolic() ? Vec(y + (sxy / (a * a)) * x)
                       : Vec(y - (sxy / (a * a)) * x);
  }
  const double len = std::sqrt(std::max(0.0, ambient_inner(m, T, T)));
  if (len < kPoleTol) return tv;
  T *= d / len;

  const FrameMat F = frame_at(m, x);
  for (int i = 0; i < m.n; ++i) tv.comps[i] = ambient_inner(m, T, F.col(i));
  return tv;
}

Vec geodesic_point(const Model& m, const Vec& x, const Vec& y, double t) {
  TangentVector tv = log_map(m, x, y);
  tv.comps *= t;
  return exp_map(m, tv);
}

double jac_exp(const Model& m, const TangentVector& v) {
  if (m.flat()) return 1.0;
  const double tau = v.comps.norm() / m.a();
  if (m.hyperbolic()) return std::pow(comparison_S(tau), m.n - 1);
  if (tau >= kPi) fail("jac_exp: spherical step beyond the injectivity radius");
  return std::pow(circ_S(tau), m.n - 1);
}

MatN hess_half_dist_sq(const Model& m, const Vec& x, const Vec& y) {
  const int n = m.n;
  MatN H = MatN::Identity(n, n);
  if (m.flat()) return H;
  const double d = distance(m, x, y);
  if (d < kPoleTol) return H;

  const double sk = std::sqrt(std::abs(m.curvature));
  const double ev =
      m.hyperbolic() ? comparison_H(sk * d) : circ_H(sk * d);

  // eigenvalue 1 along the radial direction away from y, ev on the rest
  const TangentVector toward = log_map(m, x, y);
  const VecN nhat = -toward.comps / d;
  H = ev * MatN::Identity(n, n) + (1.0 - ev) * (nhat * nhat.transpose());
  return H;
}

// --- sn and volumes ----------------------------------------------------------

double sn(const Model& m, double r) {
  if (m.flat()) return r;
  const double a = m.a();
  return m.hyperbolic() ? a * std::sinh(r / a) : a * std::sin(r / a);
}

double sn_prime(const Model& m, double r) {
  if (m.flat()) return 1.0;
  const double a = m.a();
  return m.hyperbolic() ? std::cosh(r / a) : std::cos(r / a);
}

double sn_primitive(const Model& m, double r) {
  if (m.flat()) return 0.5 * r * r;
  const double a = m.a();
  return m.hyperbolic() ? a * a * (std::cosh(r / a) - 1.0)
                        : a * a * (1.0 - std::cos(r / a));
}

double sn2_primitive(const Model& m, double r) {
  if (m.flat()) return r * r * r / 3.0;
  const double a = m.a(), tau = r / a;
  return m.hyperbolic()
             ? 0.5 * a * a * a * (std::sinh(tau) * std::cosh(tau) - tau)
             : 0.5 * a * a * a * (tau - std::sin(tau) * std::cos(tau));
}

double sphere_area(int n) {
  if (n == 2) return 2.0 * kPi;
  if (n == 3) return 4.0 * kPi;
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(const Model& m, double r) {
  if (!(r >= 0.0)) fail("ball_volume needs r >= 0");
  if (m.spherical() && r > kPi * m.a())
    fail("ball_volume: spherical radius beyond the diameter");
  return m.n == 2 ? sphere_area(2) * sn_primitive(m, r)
                  : sphere_area(3) * sn2_primitive(m, r);
}

double doubling_constant(const Model& m, double R) {
  const double k = m.kappa_lower();
  return std::pow(2.0, m.n) *
         std::pow(std::cosh(2.0 * std::sqrt(k) * R), m.n - 1);
}

double pucci_ricci_lower(const Model& m, double lambda, double Lambda) {
  const double c = m.curvature;
  return (m.n - 1) * (c < 0.0 ? Lambda * c : lambda * c);
}

}  // namespace hlab::geom
