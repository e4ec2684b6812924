#pragma once

// Closed-form Riemannian geometry of the constant-curvature model spaces
// R^n, H^n(c) and S^n(c), n = 2 or 3, realised as embedded submanifolds:
//   flat        x0 = 0,                       metric = Euclidean
//   hyperbolic  -x0^2 + |x|^2 = -a^2, x0 > 0, metric = Minkowski restriction
//   spherical    x0^2 + |x|^2 =  a^2,         metric = Euclidean restriction
// with a = 1/sqrt(|c|).  Every map below (exp, log, distance, Jacobians,
// Hessians of d^2/2, ball volumes) is exact up to rounding; there is no
// numerical integration in this module.

#include <stdexcept>
#include <string>

#include "hlab/types.hpp"

namespace hlab::geom {

// ---------------------------------------------------------------------------
// comparison functions
// ---------------------------------------------------------------------------

// Below this threshold the even Taylor expansions of sinh(t)/t, t*coth(t),
// sin(t)/t, t*cot(t) are exact to double precision (first omitted term
// < 1e-25); above it the closed forms are well-conditioned.
inline constexpr double kSeriesThreshold = 1e-4;

// sinh(tau)/tau, extended by 1 at tau = 0.  Nondecreasing on [0, inf).
[[nodiscard]] double comparison_S(double tau);

// tau*coth(tau), extended by 1 at tau = 0.  Nondecreasing on [0, inf).
[[nodiscard]] double comparison_H(double tau);

// sin(tau)/tau and tau*cot(tau): the spherical-side analogues, used by the
// curved closed forms below.  Domain [0, pi).
[[nodiscard]] double circ_S(double tau);
[[nodiscard]] double circ_H(double tau);

// ---------------------------------------------------------------------------
// model space
// ---------------------------------------------------------------------------

struct Model {
  int n = 2;              // dimension, 2 or 3
  double curvature = 0.0; // sectional curvature c (constant)

  [[nodiscard]] bool flat() const { return curvature == 0.0; }
  [[nodiscard]] bool hyperbolic() const { return curvature < 0.0; }
  [[nodiscard]] bool spherical() const { return curvature > 0.0; }

  // model radius 1/sqrt(|c|); meaningless for the flat model
  [[nodiscard]] double a() const;

  // kappa >= 0 with Sec >= -kappa (0 for flat and spherical models)
  [[nodiscard]] double kappa_lower() const {
    return curvature < 0.0 ? -curvature : 0.0;
  }

  // Ric = (n-1) c g on a space form
  [[nodiscard]] double ricci_scalar() const { return (n - 1) * curvature; }

  // largest admissible ball radius: unbounded, except pi/(2 sqrt c) on the
  // sphere (balls must stay inside a hemisphere so that d^2/2 is convex)
  [[nodiscard]] double radius_cap() const;
  [[nodiscard]] bool admissible_radius(double r) const;

  // chart center: the origin (flat) or the embedding pole (a, 0, .., 0)
  [[nodiscard]] Vec base() const;
};

[[nodiscard]] Model make_model(int n, double curvature);

// ---------------------------------------------------------------------------
// points and tangent vectors
// ---------------------------------------------------------------------------

// A tangent vector is stored by its components in the canonical orthonormal
// frame at the base point (see frame_at); norms and inner products of
// coefficient vectors are therefore metric inner products.
struct TangentVector {
  Vec base = Vec::Zero();
  VecN comps;

  [[nodiscard]] double norm() const { return comps.norm(); }
};

// Canonical orthonormal frame at x, as columns of a 4 x n matrix of embedding
// vectors.  Away from the chart center the first column is the outward radial
// direction e_r and the remaining columns are the normalised angular
// directions of the global polar chart; at the chart center the frame is the
// Cartesian slot basis.  All mesh stencils report derivatives in this frame.
[[nodiscard]] FrameMat frame_at(const Model& m, const Vec& x);

// ambient inner product of the model (Minkowski for hyperbolic)
[[nodiscard]] double ambient_inner(const Model& m, const Vec& u, const Vec& v);

[[nodiscard]] Vec exp_map(const Model& m, const TangentVector& v);
[[nodiscard]] TangentVector log_map(const Model& m, const Vec& x, const Vec& y);
[[nodiscard]] double distance(const Model& m, const Vec& x, const Vec& y);

// exp_x(t log_x(y)); t = 0 gives x, t = 1 gives y
[[nodiscard]] Vec geodesic_point(const Model& m, const Vec& x, const Vec& y,
                                 double t);

// Jacobian determinant of exp_x at v (w.r.t. Riemannian volume):
//   flat 1;  hyperbolic (sinh(tau)/tau)^{n-1};  spherical (sin(tau)/tau)^{n-1}
// with tau = sqrt(|c|) |v|.
[[nodiscard]] double jac_exp(const Model& m, const TangentVector& v);

// Hessian of x -> d(x, y)^2 / 2 at x, in the canonical frame at x.
// Eigenvalue 1 along the radial direction (from y through x), and
//   flat 1;  hyperbolic H(sqrt(kappa) d);  spherical sqrt(c) d cot(sqrt(c) d)
// with multiplicity n-1 on the orthogonal complement.  At x = y this is the
// identity.
[[nodiscard]] MatN hess_half_dist_sq(const Model& m, const Vec& x,
                                     const Vec& y);

// ---------------------------------------------------------------------------
// global polar chart
// ---------------------------------------------------------------------------

struct PolarCoords {
  double r = 0.0;
  double theta = 0.0; // n = 2: angle in [0, 2pi); n = 3: polar angle in [0, pi]
  double phi = 0.0;   // n = 3 only: azimuth in [0, 2pi)
};

[[nodiscard]] Vec point_of(const Model& m, const PolarCoords& pc);
[[nodiscard]] PolarCoords chart_of(const Model& m, const Vec& x);

// unit direction of the polar chart: n = 2 (cos t, sin t),
// n = 3 (sin t cos p, sin t sin p, cos t), as slots 1..n of a Vec
[[nodiscard]] Vec chart_direction(const Model& m, double theta, double phi);

// metric coefficient sn_c(r): r flat, a sinh(r/a) hyperbolic, a sin(r/a)
// spherical; the circumference of the geodesic sphere of radius r is
// area(S^{n-1}) sn_c(r)^{n-1}
[[nodiscard]] double sn(const Model& m, double r);
[[nodiscard]] double sn_prime(const Model& m, double r); // = cn_c(r)

// primitive of sn (n = 2 ring areas) and of sn^2 (n = 3 shell volumes)
[[nodiscard]] double sn_primitive(const Model& m, double r);
[[nodiscard]] double sn2_primitive(const Model& m, double r);

// ---------------------------------------------------------------------------
// volumes and covering constants
// ---------------------------------------------------------------------------

[[nodiscard]] double sphere_area(int n); // area of the unit S^{n-1} in R^n

// Riemannian volume of the metric ball of radius r
[[nodiscard]] double ball_volume(const Model& m, double r);

// doubling constant D = 2^n cosh^{n-1}(2 sqrt(kappa) R): for r <= R' <= R,
// V(R') <= D (R'/r)^{log2 D} V(r)
[[nodiscard]] double doubling_constant(const Model& m, double R);

// lower bound for the minimal Pucci operator applied to the Ricci transform:
// (n-1) Lambda c when c < 0, (n-1) lambda c otherwise
[[nodiscard]] double pucci_ricci_lower(const Model& m, double lambda,
                                       double Lambda);

}  // namespace hlab::geom
