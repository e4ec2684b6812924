#include "hlab/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hlab::ops {

void EllipticParams::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("operators: need p > 1");
  if (!(lambda > 0.0) || !(Lambda >= lambda))
    throw std::invalid_argument("operators: need 0 < lambda <= Lambda");
  if (!(beta >= 0.0)) throw std::invalid_argument("operators: need beta >= 0");
}

Ellipticity p_ellipticity(double p) {
  if (p >= 2.0) return {1.0, p - 1.0};
  return {p - 1.0, 1.0};
}

double p_laplacian(const VecN& g, const MatN& H, double p) {
  const double gn = g.norm();
  if (gn == 0.0) {
    if (p < 2.0)
      throw SingularGradient("p_laplacian: vanishing gradient, p < 2");
    if (p > 2.0) return 0.0;
    return H.trace();
  }
  const VecN n = g / gn;
  const double aniso = n.dot(H * n);
  return std::pow(gn, p - 2.0) * (H.trace() + (p - 2.0) * aniso);
}

namespace {

double pucci(const MatN& H, double lambda, double Lambda, bool minus) {
  Eigen::SelfAdjointEigenSolver<MatN> es(H, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < H.rows(); ++k) {
    const double e = es.eigenvalues()[k];
    if (minus)
      s += e > 0.0 ? lambda * e : Lambda * e;
    else
      s += e > 0.0 ? Lambda * e : lambda * e;
  }
  return s;
}

}  // namespace

double pucci_minus(const MatN& H, double lambda, double Lambda) {
  return pucci(H, lambda, Lambda, true);
}

double pucci_plus(const MatN& H, double lambda, double Lambda) {
  return pucci(H, lambda, Lambda, false);
}

double regularized_singular(const VecN& g, const MatN& H, double p,
                            double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("regularized_singular: need delta > 0");
  const double w = std::pow(g.squaredNorm() + delta, 0.5 * (p - 2.0));
  return w * pucci_minus(H, p - 1.0, 1.0);
}

double p_laplacian_reg(const VecN& g, const MatN& H, double p, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("p_laplacian_reg: need delta > 0");
  const double q = g.squaredNorm() + delta;
  return std::pow(q, 0.5 * (p - 2.0)) *
         (H.trace() + (p - 2.0) * g.dot(H * g) / q);
}

MatN frozen_coefficient(const VecN& g, double p, double delta) {
  if (!(delta > 0.0) && p != 2.0)
    throw std::invalid_argument("frozen_coefficient: need delta > 0");
  const int n = static_cast<int>(g.size());
  if (p == 2.0) return MatN::Identity(n, n);
  const double q = g.squaredNorm() + delta;
  const double w = std::pow(q, 0.5 * (p - 2.0));
  return w * (MatN::Identity(n, n) + ((p - 2.0) / q) * (g * g.transpose()));
}

double radial_p_laplacian(double dg, double ddg, int n, double sn_ratio,
                          double p) {
  const double speed = std::abs(dg);
  if (speed == 0.0) {
    if (p < 2.0)
      throw SingularGradient("radial_p_laplacian: vanishing gradient, p < 2");
    if (p > 2.0) return 0.0;
    return ddg + (n - 1) * sn_ratio * dg;
  }
  return std::pow(speed, p - 2.0) *
         ((p - 1.0) * ddg + (n - 1) * sn_ratio * dg);
}

}  // namespace hlab::ops
