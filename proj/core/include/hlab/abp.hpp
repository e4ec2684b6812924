#pragma once

// Measure bounds of Alexandrov–Bakelman–Pucci type: the measure of a vertex
// set E is controlled by a curvature-corrected integral over its p-contact
// set.  Four variants, indexed by the operator family and the gradient
// regime.  With S(t) = sinh(t)/t, H(t) = t coth(t), tau = |grad u|^{p-1} and
// kappa the Ricci normalization of the variant, the integrands are
//
//   degenerate (p >= 2)           S^{n-1}(sqrt(k) tau) (D_p u / n + H(sqrt(k) tau))^n
//   singular (1 < p < 2)          S^{n-1}(sqrt(k) tau) / (p-1)^n (f+/n + H(sqrt(k) tau))^n
//   nonlinear degenerate          (p-1)/(n lam)^n S^{n-1}(sqrt(k/lam) tau)
//                                   (f+ + Lam/(p-1) + (n-1) Lam H(sqrt(k/Lam) tau))^n
//   nonlinear singular            S^{n-1}(sqrt(k/lam) tau)
//                                   [(f+ + Lam/(p-1) + (n-1) Lam H(sqrt(k/Lam) tau)) / (n lam)]^n
//
// where f+ is the positive part of the variant's operator applied to the
// discrete field at the contact node (the residual convention: the
// inequality is tested against what the field actually satisfies).  The
// nonlinear variants replace the sectional Ricci bound by the Pucci minimum
// of the Ricci transform.

#include <vector>

#include "hlab/contact.hpp"
#include "hlab/mesh.hpp"
#include "hlab/operators.hpp"
#include "hlab/status.hpp"

namespace hlab::abp {

enum class Variant { Degenerate, Singular, NonlinearDegenerate, NonlinearSingular };

[[nodiscard]] const char* variant_name(Variant v);
[[nodiscard]] bool singular_variant(Variant v);   // gradient regime 1 < p < 2
[[nodiscard]] bool nonlinear_variant(Variant v);  // Pucci forcing

// pick the variant matching the parameter block (p decides the regime; a
// nontrivial ellipticity window or drift selects the nonlinear family)
[[nodiscard]] Variant variant_for(const ops::EllipticParams& prm);

// Ricci normalization entering the integrands: kappa_lower for the
// sectional variants, max(0, -pucci_ricci_lower/(n-1)) for the nonlinear ones
[[nodiscard]] double variant_kappa(const geom::Model& m, Variant v,
                                   const ops::EllipticParams& prm);

// integrand at one non-escaped contact record.  delta > 0 computes the
// regularized value of the ladder; delta = 0 uses the exact operator where
// |grad| >= h and the h^2-regularized one below (matching the solver's
// residual convention).
[[nodiscard]] double integrand(const geom::Model& m,
                               const contact::ContactRecord& rec, Variant v,
                               const ops::EllipticParams& prm, double delta,
                               double h);

// contact-set integral: each distinct non-escaped contact node (argmin or
// near-touching plateau member) counted once with its quadrature weight.
// Plateau nodes carry no stored derivatives, so the field is needed here.
[[nodiscard]] double abp_rhs(const mesh::ScalarField& u,
                             const std::vector<contact::ContactRecord>& recs,
                             Variant v, const ops::EllipticParams& prm,
                             double delta = 0.0);

// largest value of the variant's operator over the derivative-carrying nodes
// (the smallest admissible forcing bound for the discrete field)
[[nodiscard]] double worst_forcing(const mesh::ScalarField& u, Variant v,
                                   const ops::EllipticParams& prm);

// quadrature + geometry interpolation tolerance, calibrated on the sharp case
[[nodiscard]] double tol_abp(const geom::Model& m, double h, double r0);

struct AbpReport {
  Variant variant = Variant::Degenerate;
  ops::EllipticParams params;
  double measure = 0.0;  // |E|, quadrature measure of the vertex ball
  double rhs = 0.0;      // contact-set integral
  double ratio = 0.0;    // |E| / rhs
  double tol = 0.0;
  int vertices = 0;
  int escaped = 0;
  Status status = Status::Inconclusive;
};

// slide cones from every node of the closed vertex ball E, integrate the
// variant's bound over the touching set inside omega, and compare
[[nodiscard]] AbpReport abp_check(const mesh::ScalarField& u,
                                  const Vec& e_center, double e_radius,
                                  const contact::SearchDomain& omega,
                                  Variant v, const ops::EllipticParams& prm,
                                  int jobs = 1);

// threshold of the sub-level set in the measure estimate
[[nodiscard]] double mtilde(double p);

// critical density extracted from the measure-estimate chain evaluated at
// scale r inside B_{R0}: the fraction of B_{4r} where u stays below
// mtilde(p).  Reads off the final display of the proof (the statement only
// asserts existence of the constant).
[[nodiscard]] double delta_formula(const geom::Model& m, Variant v,
                                   const ops::EllipticParams& prm, double r,
                                   double r0);

struct MeasureReport {
  Variant variant = Variant::Degenerate;
  ops::EllipticParams params;
  double threshold = 0.0;  // mtilde(p)
  double fraction = 0.0;   // |{u <= mtilde} cap B_4r| / |B_4r|
  double delta = 0.0;      // delta_formula
  Status status = Status::Skip;
  // hypothesis audit (checked, not assumed)
  double worst_forcing = 0.0;  // max over nodes of r^p (op u)+  (<= 1)
  double min_outside = 0.0;    // min of u beyond B_4r            (>= 0)
  double inf_inner = 0.0;      // inf over B_r                    (<= (p-1)/p)
  bool hypotheses_ok = false;
};

// audit the three hypotheses on the discrete field, then test whether the
// sub-level fraction clears delta_formula * (1 - tol)
[[nodiscard]] MeasureReport measure_estimate_check(
    const mesh::ScalarField& u, double r, const Vec& z0, Variant v,
    const ops::EllipticParams& prm, double tol = 0.0);

}  // namespace hlab::abp
