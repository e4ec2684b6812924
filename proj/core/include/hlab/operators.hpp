#pragma once

// Pointwise second-order operators acting on (gradient, Hessian) pairs
// expressed in an orthonormal frame.
//
// The degenerate/singular model operator is the nondivergence p-Laplacian
//   D_p u = |g|^{p-2} tr[(I + (p-2) n n^T) H],   n = g/|g|,
// whose ellipticity ratio is [1, p-1] for p >= 2 and [p-1, 1] for p < 2.

#include <stdexcept>

#include "hlab/types.hpp"

namespace hlab::ops {

struct EllipticParams {
  double p = 2.0;
  double lambda = 1.0;
  double Lambda = 1.0;
  double beta = 0.0;  // first-order coefficient of the scaled problems

  void validate() const;
};

struct SingularGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ellipticity interval of I + (p-2) n n^T
struct Ellipticity {
  double lo, hi;
};
[[nodiscard]] Ellipticity p_ellipticity(double p);

// D_p u; throws SingularGradient for p < 2 at vanishing gradient (for p >= 2
// the degenerate limit 0 is returned)
[[nodiscard]] double p_laplacian(const VecN& g, const MatN& H, double p);

// Pucci extremal operators with ellipticity [lambda, Lambda]
[[nodiscard]] double pucci_minus(const MatN& H, double lambda, double Lambda);
[[nodiscard]] double pucci_plus(const MatN& H, double lambda, double Lambda);

// regularized singular-case operator (|g|^2 + delta)^{(p-2)/2} M^-_{p-1,1}(H)
[[nodiscard]] double regularized_singular(const VecN& g, const MatN& H,
                                          double p, double delta);

// D_p with the gradient norm replaced by sqrt(|g|^2 + delta):
//   (|g|^2 + delta)^{(p-2)/2} [tr H + (p-2) g^T H g / (|g|^2 + delta)],
// continuous in (g, delta) for delta > 0 and equal to D_p at delta = 0,
// |g| > 0.  By the ellipticity sandwich it never exceeds the forcing of a
// supersolution, which is what makes the delta ladder one-sided.
[[nodiscard]] double p_laplacian_reg(const VecN& g, const MatN& H, double p,
                                     double delta);

// frozen diffusion matrix of the fixed-point linearization:
//   (|g|^2 + delta)^{(p-2)/2} (I + (p-2) g g^T / (|g|^2 + delta))
// symmetric positive definite for every delta > 0 and p > 1
[[nodiscard]] MatN frozen_coefficient(const VecN& g, double p, double delta);

// D_p of a radial profile u = gamma(d) in dimension n, given gamma' and
// gamma'' at radius r and the metric ratio sn'(r)/sn(r):
//   |gamma'|^{p-2} [ (p-1) gamma'' + (n-1) (sn'/sn) gamma' ]
[[nodiscard]] double radial_p_laplacian(double dg, double ddg, int n,
                                        double sn_ratio, double p);

}  // namespace hlab::ops
