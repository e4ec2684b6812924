#include "hlab/contact.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "hlab/parallel.hpp"

namespace hlab::contact {

namespace {

// d^{p/(p-1)} with the hot exponents special-cased (the contact search calls
// this once per node-vertex pair)
inline double cone_radial(double d, double p) {
  if (p == 2.0) return d * d;            // q = 2
  if (p == 3.0) return d * std::sqrt(d); // q = 3/2
  if (p == 1.5) return d * d * d;        // q = 3
  return std::pow(d, p / (p - 1.0));
}

bool has_derivatives(const mesh::BallMesh& grid, int id) {
  return id == mesh::BallMesh::pole() || grid.stencil_ok(id);
}

geom::TangentVector gradient_at(const mesh::ScalarField& u, int id) {
  if (id == mesh::BallMesh::pole())
    return {u.mesh->node(id).pos, mesh::pole_fit(u).grad};
  return mesh::gradient(u, id);
}

MatN hessian_at(const mesh::ScalarField& u, int id) {
  if (id == mesh::BallMesh::pole()) return mesh::pole_fit(u).hess;
  return mesh::hessian(u, id);
}

// displacement factor |g|^{p-2}, continuously extended by the convention
// that a zero gradient maps the point to itself (displacement |g|^{p-1} -> 0
// for every p > 1)
inline VecN displacement(const geom::TangentVector& g, double p) {
  const double gn = g.norm();
  if (gn == 0.0) return VecN::Zero(g.comps.size());
  return std::pow(gn, p - 2.0) * g.comps;
}

// the certified matrix  s |g|^{p-2} D2u + (I + c n nT) o D2(d_pv^2/2),
// symmetrized product form (the factors commute in the exact aligned case)
MatN certified_matrix(const geom::Model& m, const ContactRecord& rec,
                      double p, double s, double c, const Vec& partial_vertex) {
  const int n = static_cast<int>(rec.grad.comps.size());
  const VecN nhat = rec.grad.comps / rec.grad_norm;
  const MatN P = MatN::Identity(n, n) + c * (nhat * nhat.transpose());
  const MatN Hgeo =
      geom::hess_half_dist_sq(m, rec.grad.base, partial_vertex);
  const MatN prod = P * Hgeo;
  return s * std::pow(rec.grad_norm, p - 2.0) * rec.hess +
         0.5 * (prod + prod.transpose());
}

}  // namespace

std::vector<double> default_delta_ladder(double h) {
  return {1e-1, 1e-2, 1e-3, h * h};
}

std::vector<ContactRecord> compute_contact_set(const mesh::ScalarField& u,
                                               const std::vector<Vec>& vertices,
                                               double a,
                                               const SearchDomain& domain,
                                               double p, int jobs,
                                               double near_tol) {
  if (u.mesh == nullptr)
    throw std::invalid_argument("contact: field has no mesh");
  if (!(a > 0.0)) throw std::invalid_argument("contact: opening must be > 0");
  ops::EllipticParams{p}.validate();

  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const std::vector<int> candidates =
      grid.nodes_within(domain.center, domain.radius);
  if (candidates.empty())
    throw std::invalid_argument("contact: empty search domain");

  const double coeff = a * (p - 1.0) / p;
  const double edge = domain.radius - 0.51 * grid.h_r();
  const std::vector<double> ladder = default_delta_ladder(grid.h_r());

  std::vector<ContactRecord> out(vertices.size());
  parallel_for(static_cast<int>(vertices.size()), jobs, [&](int vi) {
    ContactRecord rec;
    rec.vertex = vertices[vi];
    rec.a = a;

    std::vector<double> vals;
    if (near_tol > 0.0) vals.resize(candidates.size());

    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      const int id = candidates[ci];  // ascending ids: ties keep the lowest
      const double d = geom::distance(model, grid.node(id).pos, rec.vertex);
      const double val = u[id] + coeff * cone_radial(d, p);
      if (near_tol > 0.0) vals[ci] = val;
      if (val < best) {
        best = val;
        best_id = id;
      }
    }
    rec.node = best_id;
    rec.value = best;

    const Vec& x = grid.node(best_id).pos;
    rec.escaped = grid.boundary(best_id) || !has_derivatives(grid, best_id) ||
                  geom::distance(model, x, domain.center) >= edge;
    if (!rec.escaped && near_tol > 0.0) {
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const int id = candidates[ci];
        if (id == best_id || vals[ci] > best + near_tol) continue;
        if (grid.boundary(id) || !has_derivatives(grid, id) ||
            geom::distance(model, grid.node(id).pos, domain.center) >= edge)
          continue;
        rec.near.push_back(id);
      }
    }
    if (!rec.escaped) {
      rec.grad = gradient_at(u, best_id);
      rec.hess = hessian_at(u, best_id);
      rec.grad_norm = rec.grad.norm();
      rec.phi = geom::exp_map(model, {x, displacement(rec.grad, p)});
      rec.delta_ladder = ladder;
      rec.phi_delta.reserve(ladder.size());
      for (double delta : ladder)
        rec.phi_delta.push_back(phi_p_delta(model, rec.grad, p, delta));
      verify_vertex_recovery(model, rec);
    }
    out[vi] = std::move(rec);
  });
  return out;
}

Vec phi_p(const geom::Model& m, const geom::TangentVector& grad, double p) {
  if (p < 2.0 && grad.norm() == 0.0)
    throw ops::SingularGradient("phi_p: zero gradient with p < 2");
  return geom::exp_map(m, {grad.base, displacement(grad, p)});
}

Vec phi_p_delta(const geom::Model& m, const geom::TangentVector& grad,
                double p, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("phi_p_delta: delta must be positive");
  const double g2 = grad.comps.squaredNorm();
  const double factor = std::pow(g2 + delta, 0.5 * (p - 2.0));
  return geom::exp_map(m, {grad.base, factor * grad.comps});
}

double t_delta(double grad_norm, double p, double delta) {
  const double g2 = grad_norm * grad_norm;
  return std::pow(g2 / (g2 + delta), 0.5 * (2.0 - p));
}

double verify_vertex_recovery(const geom::Model& m, ContactRecord& rec) {
  rec.recovery_error = geom::distance(m, rec.phi, rec.vertex);
  return rec.recovery_error;
}

double psd_certificate(const geom::Model& m, ContactRecord& rec, double p,
                       const std::vector<double>& t_checks) {
  if (rec.escaped || rec.grad_norm == 0.0) {
    rec.psd_min_eig = std::numeric_limits<double>::quiet_NaN();
    return rec.psd_min_eig;
  }
  Eigen::SelfAdjointEigenSolver<MatN> eig;
  double worst = std::numeric_limits<double>::infinity();
  const auto absorb = [&](const MatN& M) {
    eig.compute(M, Eigen::EigenvaluesOnly);
    worst = std::min(worst, eig.eigenvalues().minCoeff());
  };

  const double c = (2.0 - p) / (p - 1.0);
  absorb(certified_matrix(m, rec, p, 1.0, c, rec.phi));
  for (double t : t_checks) {
    const Vec pv =
        geom::exp_map(m, {rec.grad.base, t * displacement(rec.grad, p)});
    absorb(certified_matrix(m, rec, p, t, t * c, pv));
    if (p < 2.0) absorb(certified_matrix(m, rec, p, t, c, pv));
  }
  rec.psd_min_eig = worst;
  return worst;
}

namespace {

// the fully discrete vertex map at a node, when its stencil exists
std::optional<Vec> vertex_map_at(const mesh::ScalarField& u, int id, double p) {
  const mesh::BallMesh& grid = *u.mesh;
  if (!has_derivatives(grid, id)) return std::nullopt;
  const geom::TangentVector g = gradient_at(u, id);
  return geom::exp_map(grid.model(), {grid.node(id).pos, displacement(g, p)});
}

}  // namespace

void jacobian_factorization(const mesh::ScalarField& u, ContactRecord& rec,
                            double p) {
  rec.jac_closed = std::numeric_limits<double>::quiet_NaN();
  rec.jac_fd = std::numeric_limits<double>::quiet_NaN();
  if (rec.escaped || rec.grad_norm == 0.0) return;

  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const int n = model.n;

  // closed form: Jac exp * det(I + (p-2) n nT) * det(certified matrix)
  const geom::TangentVector disp{rec.grad.base, displacement(rec.grad, p)};
  const double c = (2.0 - p) / (p - 1.0);
  const MatN M1 = certified_matrix(model, rec, p, 1.0, c, rec.phi);
  rec.jac_closed = geom::jac_exp(model, disp) * (p - 1.0) * M1.determinant();

  // finite differences of the discrete map over mesh neighbors
  const mesh::Node& nd = grid.node(rec.node);
  if (rec.node == mesh::BallMesh::pole()) return;  // no symmetric neighbors
  const int i = nd.i, j = nd.j, l = nd.l;
  if (i + 1 >= grid.n_r()) return;  // outward neighbor has no stencil

  struct Pair {
    int plus, minus;
    double arc;  // one-sided arc length of the step
  };
  std::vector<Pair> pairs;
  const double S = geom::sn(model, nd.r);
  pairs.push_back({grid.id_of(i + 1, j, l),
                   i - 1 == 0 ? mesh::BallMesh::pole() : grid.id_of(i - 1, j, l),
                   grid.h_r()});
  if (n == 2) {
    pairs.push_back({grid.id_of(i, j + 1), grid.id_of(i, j - 1),
                     S * grid.h_theta()});
  } else {
    if (j - 1 < 0 || j + 1 >= grid.n_theta()) return;
    pairs.push_back({grid.id_of(i, j + 1, l), grid.id_of(i, j - 1, l),
                     S * grid.h_theta()});
    pairs.push_back({grid.id_of(i, j, l + 1), grid.id_of(i, j, l - 1),
                     S * std::sin(nd.theta) * grid.h_phi()});
  }

  try {
    MatN J(n, n);
    for (int k = 0; k < n; ++k) {
      const auto fp = vertex_map_at(u, pairs[k].plus, p);
      const auto fm = vertex_map_at(u, pairs[k].minus, p);
      if (!fp || !fm) return;
      const VecN dp = geom::log_map(model, rec.phi, *fp).comps;
      const VecN dm = geom::log_map(model, rec.phi, *fm).comps;
      J.col(k) = (dp - dm) / (2.0 * pairs[k].arc);
    }
    rec.jac_fd = J.determinant();
  } catch (const std::domain_error&) {
    // images left the admissible chart: leave the cross-check unset
  }
}

BatchStats summarize(const std::vector<ContactRecord>& recs, double h,
                     double rel_tol_jac) {
  BatchStats st;
  st.total = static_cast<int>(recs.size());
  double min_psd = std::numeric_limits<double>::infinity();
  bool any_psd = false;
  for (const ContactRecord& r : recs) {
    if (r.escaped) {
      ++st.escaped;
      continue;
    }
    if (r.grad_norm == 0.0) ++st.zero_grad;
    if (r.grad_norm > h && std::isfinite(r.recovery_error))
      st.max_recovery = std::max(st.max_recovery, r.recovery_error);
    if (std::isfinite(r.psd_min_eig)) {
      min_psd = std::min(min_psd, r.psd_min_eig);
      any_psd = true;
    }
    if (std::isfinite(r.jac_closed) && std::isfinite(r.jac_fd)) {
      ++st.jac_evaluated;
      const double scale = std::max(std::abs(r.jac_closed), std::abs(r.jac_fd));
      const double rel =
          scale > 0.0 ? std::abs(r.jac_closed - r.jac_fd) / scale : 0.0;
      st.worst_jac_rel = std::max(st.worst_jac_rel, rel);
      if (rel <= rel_tol_jac) ++st.jac_pass;
    }
  }
  if (any_psd) st.min_psd = min_psd;
  return st;
}

}  // namespace hlab::contact
