#include "hlab/abp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hlab::abp {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// the variant's operator at a record, under the shared regularization
// convention: delta > 0 forces the regularized form, delta = 0 evaluates
// exactly wherever |grad| >= h and falls back to the h^2 floor below
double variant_op(const contact::ContactRecord& rec, Variant v,
                  const ops::EllipticParams& prm, double delta, double h) {
  const VecN& g = rec.grad.comps;
  const MatN& H = rec.hess;
  const double p = prm.p;
  if (!nonlinear_variant(v)) {
    if (delta > 0.0) return ops::p_laplacian_reg(g, H, p, delta);
    if (rec.grad_norm >= h) return ops::p_laplacian(g, H, p);
    return ops::p_laplacian_reg(g, H, p, h * h);
  }
  double w;
  if (delta > 0.0) {
    w = std::pow(g.squaredNorm() + delta, 0.5 * (p - 2.0));
  } else if (rec.grad_norm >= h || p >= 2.0) {
    w = std::pow(rec.grad_norm, p - 2.0);
  } else {
    w = std::pow(g.squaredNorm() + h * h, 0.5 * (p - 2.0));
  }
  return w * ops::pucci_minus(H, prm.lambda, prm.Lambda);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Degenerate:
      return "degenerate";
    case Variant::Singular:
      return "singular";
    case Variant::NonlinearDegenerate:
      return "nonlinear-degenerate";
    case Variant::NonlinearSingular:
      return "nonlinear-singular";
  }
  return "?";
}

bool singular_variant(Variant v) {
  return v == Variant::Singular || v == Variant::NonlinearSingular;
}

bool nonlinear_variant(Variant v) {
  return v == Variant::NonlinearDegenerate || v == Variant::NonlinearSingular;
}

Variant variant_for(const ops::EllipticParams& prm) {
  const bool nonlinear =
      prm.lambda != 1.0 || prm.Lambda != 1.0 || prm.beta > 0.0;
  if (prm.p >= 2.0)
    return nonlinear ? Variant::NonlinearDegenerate : Variant::Degenerate;
  return nonlinear ? Variant::NonlinearSingular : Variant::Singular;
}

double variant_kappa(const geom::Model& m, Variant v,
                     const ops::EllipticParams& prm) {
  if (!nonlinear_variant(v)) return m.kappa_lower();
  const double low = geom::pucci_ricci_lower(m, prm.lambda, prm.Lambda);
  return std::max(0.0, -low / (m.n - 1));
}

double integrand(const geom::Model& m, const contact::ContactRecord& rec,
                 Variant v, const ops::EllipticParams& prm, double delta,
                 double h) {
  if (rec.escaped)
    throw std::invalid_argument("abp: integrand at escaped record");
  const int n = m.n;
  const double p = prm.p;
  const double tau = std::pow(rec.grad_norm, p - 1.0);
  const double kappa = variant_kappa(m, v, prm);
  const double op = variant_op(rec, v, prm, delta, h);

  if (!nonlinear_variant(v)) {
    const double S = geom::comparison_S(std::sqrt(kappa) * tau);
    const double Hc = geom::comparison_H(std::sqrt(kappa) * tau);
    if (v == Variant::Degenerate) {
      const double brace = std::max(op / n + Hc, 0.0);
      return ipow(S, n - 1) * ipow(brace, n);
    }
    const double brace = std::max(op, 0.0) / n + Hc;
    return ipow(S, n - 1) / ipow(p - 1.0, n) * ipow(brace, n);
  }

  const double S = geom::comparison_S(std::sqrt(kappa / prm.lambda) * tau);
  const double Hc = geom::comparison_H(std::sqrt(kappa / prm.Lambda) * tau);
  const double brace = std::max(op, 0.0) + prm.Lambda / (p - 1.0) +
                       (n - 1) * prm.Lambda * Hc;
  const double core = ipow(S, n - 1) * ipow(brace / (n * prm.lambda), n);
  return v == Variant::NonlinearDegenerate ? (p - 1.0) * core : core;
}

double abp_rhs(const mesh::ScalarField& u,
               const std::vector<contact::ContactRecord>& recs, Variant v,
               const ops::EllipticParams& prm, double delta) {
  if (u.mesh == nullptr) throw std::invalid_argument("abp: field has no mesh");
  const mesh::BallMesh& grid = *u.mesh;

  // each contact node enters the integral once, however many vertices it
  // serves; a vertex's near-touching plateau counts the same as its argmin
  std::vector<std::pair<int, const contact::ContactRecord*>> touched;
  touched.reserve(recs.size());
  for (const contact::ContactRecord& r : recs) {
    if (r.escaped) continue;
    touched.emplace_back(r.node, &r);
    for (int id : r.near) touched.emplace_back(id, nullptr);
  }
  std::sort(touched.begin(), touched.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second != nullptr && b.second == nullptr;
            });

  double sum = 0.0;
  int prev = -1;
  for (const auto& [id, rec] : touched) {
    if (id == prev) continue;
    prev = id;
    double val;
    if (rec != nullptr) {
      val = integrand(grid.model(), *rec, v, prm, delta, grid.h_r());
    } else {  // plateau node: derivatives read off the field
      contact::ContactRecord probe;
      probe.node = id;
      if (id == mesh::BallMesh::pole()) {
        const mesh::PoleFit fit = mesh::pole_fit(u);
        probe.grad = {grid.node(id).pos, fit.grad};
        probe.hess = fit.hess;
      } else {
        probe.grad = mesh::gradient(u, id);
        probe.hess = mesh::hessian(u, id);
      }
      probe.grad_norm = probe.grad.norm();
      val = integrand(grid.model(), probe, v, prm, delta, grid.h_r());
    }
    sum += grid.node(id).weight * val;
  }
  return sum;
}

double tol_abp(const geom::Model& m, double h, double r0) {
  return 4.0 * h * (1.0 + m.kappa_lower() * r0);
}

double worst_forcing(const mesh::ScalarField& u, Variant v,
                     const ops::EllipticParams& prm) {
  if (u.mesh == nullptr) throw std::invalid_argument("abp: field has no mesh");
  const mesh::BallMesh& grid = *u.mesh;
  double worst = -std::numeric_limits<double>::infinity();
  for (int id = 0; id < grid.count(); ++id) {
    const bool at_pole = id == mesh::BallMesh::pole();
    if (!at_pole && !grid.stencil_ok(id)) continue;
    contact::ContactRecord probe;
    if (at_pole) {
      const mesh::PoleFit fit = mesh::pole_fit(u);
      probe.grad = {grid.node(id).pos, fit.grad};
      probe.hess = fit.hess;
    } else {
      probe.grad = mesh::gradient(u, id);
      probe.hess = mesh::hessian(u, id);
    }
    probe.grad_norm = probe.grad.norm();
    worst = std::max(worst, variant_op(probe, v, prm, 0.0, grid.h_r()));
  }
  return worst;
}

AbpReport abp_check(const mesh::ScalarField& u, const Vec& e_center,
                    double e_radius, const contact::SearchDomain& omega,
                    Variant v, const ops::EllipticParams& prm, int jobs) {
  if (u.mesh == nullptr) throw std::invalid_argument("abp: field has no mesh");
  const mesh::BallMesh& grid = *u.mesh;

  AbpReport rep;
  rep.variant = v;
  rep.params = prm;
  rep.measure = mesh::ball_measure(grid, e_center, e_radius);
  rep.tol = tol_abp(grid.model(), grid.h_r(), omega.radius);

  std::vector<Vec> vertices;
  for (int id : grid.nodes_within(e_center, e_radius))
    vertices.push_back(grid.node(id).pos);
  rep.vertices = static_cast<int>(vertices.size());

  // the plateau tolerance covers the cone-plus-field interpolation gap of one
  // cell, so the integrated node set covers the continuum contact set; h^2/4
  // is calibrated so the sharp equality case acquires no spurious collar
  const double near_tol = 0.25 * grid.h_r() * grid.h_r();
  const auto recs = contact::compute_contact_set(u, vertices, 1.0, omega,
                                                 prm.p, jobs, near_tol);
  for (const auto& r : recs) rep.escaped += r.escaped ? 1 : 0;
  rep.rhs = abp_rhs(u, recs, v, prm);
  rep.ratio = rep.rhs > 0.0
                  ? rep.measure / rep.rhs
                  : (rep.measure > 0.0
                         ? std::numeric_limits<double>::infinity()
                         : 0.0);
  if (rep.escaped == rep.vertices)
    rep.status = Status::Inconclusive;
  else
    rep.status = rep.measure <= (1.0 + rep.tol) * rep.rhs ? Status::Pass
                                                          : Status::Fail;
  return rep;
}

double mtilde(double p) {
  return (p - 1.0) / p * std::pow(3.0, p / (p - 1.0));
}

double delta_formula(const geom::Model& m, Variant v,
                     const ops::EllipticParams& prm, double r, double r0) {
  const int n = m.n;
  const double p = prm.p;
  const double ball_ratio =
      geom::ball_volume(m, r) / geom::ball_volume(m, 4.0 * r);
  const double kappa = variant_kappa(m, v, prm);

  double bound;
  if (!nonlinear_variant(v)) {
    const double arg = 2.0 * std::sqrt(kappa) * r0;
    bound = ipow(geom::comparison_S(arg), n - 1) *
            ipow(geom::comparison_H(arg) + 1.0 / n, n);
    if (singular_variant(v)) bound /= ipow(p - 1.0, n);
  } else {
    const double s_arg = 2.0 * std::sqrt(kappa / prm.lambda) * r0;
    const double h_arg = 2.0 * std::sqrt(kappa / prm.Lambda) * r0;
    const double brace = 1.0 + 2.0 * prm.beta * r0 + prm.Lambda / (p - 1.0) +
                         (n - 1) * prm.Lambda * geom::comparison_H(h_arg);
    bound = ipow(geom::comparison_S(s_arg), n - 1) *
            ipow(brace / (n * prm.lambda), n);
    if (v == Variant::NonlinearDegenerate) bound *= p - 1.0;
  }
  return ball_ratio / bound;
}

MeasureReport measure_estimate_check(const mesh::ScalarField& u, double r,
                                     const Vec& z0, Variant v,
                                     const ops::EllipticParams& prm,
                                     double tol) {
  if (u.mesh == nullptr) throw std::invalid_argument("abp: field has no mesh");
  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const double p = prm.p;
  const double rp = std::pow(r, p);

  MeasureReport rep;
  rep.variant = v;
  rep.params = prm;
  rep.threshold = mtilde(p);
  rep.delta = delta_formula(model, v, prm, r, grid.radius());

  // hypothesis audit on the discrete field itself
  double min_out = std::numeric_limits<double>::infinity();
  for (int id = 0; id < grid.count(); ++id)
    if (geom::distance(model, grid.node(id).pos, z0) > 4.0 * r)
      min_out = std::min(min_out, u[id]);
  rep.worst_forcing = rp * std::max(worst_forcing(u, v, prm), 0.0);
  rep.min_outside = min_out;
  rep.inf_inner = mesh::min_in(u, z0, r);

  const double slack = 1e-10 * (1.0 + mesh::max_abs(u));
  rep.hypotheses_ok = rep.worst_forcing <= 1.0 + 1e-9 &&
                      rep.min_outside >= -slack &&
                      rep.inf_inner <= (p - 1.0) / p + slack;
  if (!rep.hypotheses_ok) {
    rep.status = Status::Skip;
    return rep;
  }

  const double t = rep.threshold;
  rep.fraction =
      mesh::measure_where(u, [t](double x) { return x <= t; }, z0, 4.0 * r) /
      mesh::ball_measure(grid, z0, 4.0 * r);
  rep.status =
      rep.fraction > rep.delta * (1.0 - tol) ? Status::Pass : Status::Fail;
  return rep;
}

}  // namespace hlab::abp
