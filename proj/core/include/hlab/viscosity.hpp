#pragma once

// Inf- and sup-convolutions on meshed balls,
//   u_eps(x) = min_y { u(y) + d(y, x)^2 / (2 eps) },
// computed by exact discrete minimization over all nodes, together with the
// measurable properties the regularization lemma promises: monotone
// convergence in eps, a Lipschitz constant ~ (3/2eps) diam, and one-sided
// Hessian bounds with the curvature-dependent constant
//   C_eps = (1/eps) H(sqrt(kappa) diam).

#include <vector>

#include "hlab/mesh.hpp"

namespace hlab::visc {

struct InfConvResult {
  double epsilon = 0.0;
  mesh::ScalarField regularized;  // u_eps (or the sup-convolution u^eps)
  std::vector<int> argmin;        // minimizing node index, one per node
  double max_gap = 0.0;           // max |u - u_eps|
  bool is_sup = false;
};

[[nodiscard]] InfConvResult inf_convolution(const mesh::ScalarField& u,
                                            double epsilon, int jobs = 1);
[[nodiscard]] InfConvResult sup_convolution(const mesh::ScalarField& u,
                                            double epsilon, int jobs = 1);

// Largest |w(x) - w(y)| / d(x, y) over all distinct node pairs of the
// regularized field.
[[nodiscard]] double lipschitz_audit(const InfConvResult& res);

// Largest eigenvalue of the discrete covariant Hessian of u_eps over the
// derivative-carrying nodes (for a sup-convolution: largest -eigenvalue, so
// the same upper bound applies to its semiconvexity).
[[nodiscard]] double semiconcavity_audit(const InfConvResult& res);

// Reference constants of the regularization lemma on the geodesic ball
// (diam = 2 radius): (3/2eps) diam and (1/eps) H(sqrt(kappa) diam).
[[nodiscard]] double lipschitz_bound(const mesh::BallMesh& grid,
                                     double epsilon);
[[nodiscard]] double semiconcavity_bound(const mesh::BallMesh& grid,
                                         double epsilon);

// Empirical modulus of continuity: max |u(x) - u(y)| over pairs d(x,y) <= s.
[[nodiscard]] double modulus_of_continuity(const mesh::ScalarField& u,
                                           double s);

// sup of f^+ over the closed ball of radius 2 sqrt(max|u| eps) around each
// node: the inflated forcing against which the convolved supersolution is
// audited.
[[nodiscard]] mesh::ScalarField inflate_forcing(const mesh::ScalarField& f,
                                                const mesh::ScalarField& u,
                                                double epsilon);

// Ladder start (diam^2) / (16 (1 + max|u|)); the smallness threshold of the
// regularization lemma is not explicit, so this is a heuristic and the
// audits, not the ladder start, carry the verification.
[[nodiscard]] double default_epsilon0(const mesh::ScalarField& u);

}  // namespace hlab::visc
