#pragma once

// Independent reference numerics for the test suite.  Nothing here calls
// back into hlab's closed forms: geodesics are integrated as ODEs on the
// embedded surface, volumes come from adaptive quadrature over a private
// sn(t), minimizations use golden-section search.  Expected values frozen in
// the tests were produced by these routines.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// --- scalar utilities -------------------------------------------------------

// adaptive Simpson on [a, b] to absolute tolerance tol
double simpson(const std::function<double(double)>& f, double a, double b,
               double tol = 1e-12);

// golden-section minimum of a unimodal f on [a, b]; returns the minimum value
double golden_min(const std::function<double(double)>& f, double a, double b,
                  int iters = 200);

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// --- space-form reference functions ----------------------------------------

// sn_c(t): t for c = 0, sin(sqrt(c) t)/sqrt(c) for c > 0, sinh for c < 0
double sn_ref(double c, double t);
double sn_prime_ref(double c, double t);

// |B_r| on the n-dimensional space form of curvature c (n = 2 or 3)
double ball_volume_ref(int n, double c, double r);

// radial nondivergence p-Laplacian of g(d): |g'|^{p-2} ((p-1) g'' + (n-1)
// (sn'/sn) g'), the closed-form used to cross-check operators and barriers
double radial_p_laplacian_ref(double dg, double ddg, int n, double c, double d,
                              double p);

// scaled barrier excess r^p D_p v - beta r^p |v'|^{p-1} for
// v(d) = mtilde (r^alpha d^-alpha - 5^-alpha), evaluated independently
double barrier_slack_ref(int n, double c, double p, double alpha,
                         double mtilde, double r, double beta, double d);

// --- geodesic flow by RK4 on the embedded surface ---------------------------

// Integrates x'' = -c <x', x'> x (inner product Euclidean for c > 0,
// Minkowski with signature (-,+,...,+) for c < 0, and a straight line for
// c = 0) from ambient position x0 with ambient velocity v0 over unit time.
// steps ~ 2000 reproduces the exponential map to ~1e-10 at unit speed.
Eigen::VectorXd geodesic_rk4(double c, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& v0, int steps = 2000);

// --- closed forms used as anchors -------------------------------------------

// inf-convolution of |x| on the line: x^2/(2 eps) inside |x| <= eps,
// |x| - eps/2 outside
double infconv_abs_ref(double x, double eps);

// measure of the super-level set {D/d > t} within B_R on the flat plane:
// pi * min(D/t, R)^2
double flat_hyperbola_level_measure_ref(double D, double t, double R);

}  // namespace oracle
