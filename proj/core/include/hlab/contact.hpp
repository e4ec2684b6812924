#pragma once

// p-contact sets: slide the cone a (p-1)/p d_y^{p/(p-1)} from below until it
// touches u, one discrete global minimization per vertex y.  Each touching
// point x carries the vertex map
//   Phi_p(x)     = exp_x |grad u|^{p-2} grad u(x)
//   Phi_p,delta  = exp_x (|grad u|^2 + delta)^{(p-2)/2} grad u(x)
// and the product factorization of the Jacobian of Phi_p,
//   Jac Phi_p = Jac exp_x(|g|^{p-2} g) * (p-1)
//             * det[ |g|^{p-2} D2u + (I + (2-p)/(p-1) n nT) o D2(d_y^2/2) ],
// whose inner matrix is the positive-semidefiniteness certificate of the
// touching condition.  The finite-difference cross-check differentiates the
// fully discrete map node -> exp(|stencil grad|^{p-2} stencil grad) over the
// mesh neighbors, so it shares no algebra with the closed form.

#include <limits>
#include <vector>

#include "hlab/mesh.hpp"
#include "hlab/operators.hpp"

namespace hlab::contact {

// closed sub-ball of the mesh ball over which the minimization runs
struct SearchDomain {
  Vec center = Vec::Zero();
  double radius = 0.0;
};

struct ContactRecord {
  Vec vertex = Vec::Zero();  // y
  int node = -1;             // touching node x
  double a = 1.0;            // opening
  double value = 0.0;        // attained minimum of u + a (p-1)/p d_y^{p/(p-1)}
  bool escaped = false;      // minimizer on the domain boundary (or without
                             // derivative stencils): excluded from integrals

  geom::TangentVector grad;  // stencil gradient at x
  MatN hess;                 // stencil covariant Hessian at x
  double grad_norm = 0.0;

  // interior nodes whose objective value sits within the caller's near_tol of
  // the minimum (the argmin's plateau).  The continuum touching point of a
  // vertex rarely falls on a node; every node of the cell containing it lands
  // here once near_tol covers the interpolation gap, so integrating over
  // argmin + near nodes covers the true contact set.  Empty when near_tol = 0.
  std::vector<int> near;

  Vec phi = Vec::Zero();              // Phi_p(x) (continuous extension at g=0)
  std::vector<double> delta_ladder;   // deltas used for phi_delta
  std::vector<Vec> phi_delta;         // Phi_p,delta(x) along the ladder

  double recovery_error = std::numeric_limits<double>::quiet_NaN();
  double psd_min_eig = std::numeric_limits<double>::quiet_NaN();
  double jac_closed = std::numeric_limits<double>::quiet_NaN();
  double jac_fd = std::numeric_limits<double>::quiet_NaN();
};

// {1e-1, 1e-2, 1e-3, h^2}: the ladder on which the delta -> 0 limit of the
// singular-case construction is observed
[[nodiscard]] std::vector<double> default_delta_ladder(double h);

// One record per vertex.  Derivatives, vertex maps and recovery errors are
// filled for non-escaped records; the certificate and Jacobian pair are
// filled by the dedicated passes below.  near_tol > 0 additionally collects
// each non-escaped vertex's near-touching nodes (same interiority rules).
[[nodiscard]] std::vector<ContactRecord> compute_contact_set(
    const mesh::ScalarField& u, const std::vector<Vec>& vertices, double a,
    const SearchDomain& domain, double p, int jobs = 1, double near_tol = 0.0);

// raw vertex maps; phi_p throws SingularGradient for p < 2 at zero gradient
[[nodiscard]] Vec phi_p(const geom::Model& m, const geom::TangentVector& grad,
                        double p);
[[nodiscard]] Vec phi_p_delta(const geom::Model& m,
                              const geom::TangentVector& grad, double p,
                              double delta);
// geodesic parameter at which Phi_p,delta sits between x and Phi_p
[[nodiscard]] double t_delta(double grad_norm, double p, double delta);

// d(Phi_p(x), y); stores and returns it
double verify_vertex_recovery(const geom::Model& m, ContactRecord& rec);

// Minimum eigenvalue over the certified matrices: the touching matrix at
// t = 1 and its t-interpolants (coefficient t(2-p)/(p-1) and, for p < 2, the
// fixed-coefficient variant) at the requested interior times, all evaluated
// against the partial vertex exp_x(t |g|^{p-2} g).  Zero-gradient records are
// skipped (NaN).
double psd_certificate(const geom::Model& m, ContactRecord& rec, double p,
                       const std::vector<double>& t_checks = {0.25, 0.5,
                                                              0.75});

// Fills jac_closed (product formula) and jac_fd (central differences of the
// discrete vertex map over mesh neighbors; NaN when a needed neighbor has no
// stencil).
void jacobian_factorization(const mesh::ScalarField& u, ContactRecord& rec,
                            double p);

struct BatchStats {
  int total = 0;
  int escaped = 0;
  int zero_grad = 0;       // non-escaped with |grad| = 0
  int jac_evaluated = 0;   // records with both Jacobian values finite
  int jac_pass = 0;        // ... agreeing within rel_tol
  double max_recovery = 0.0;      // over non-escaped records with |grad| > h
  double min_psd = std::numeric_limits<double>::quiet_NaN();
  double worst_jac_rel = 0.0;
};
[[nodiscard]] BatchStats summarize(const std::vector<ContactRecord>& recs,
                                   double h, double rel_tol_jac);

}  // namespace hlab::contact
