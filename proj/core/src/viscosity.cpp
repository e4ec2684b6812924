#include "hlab/viscosity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hlab/parallel.hpp"

namespace hlab::visc {

namespace {

void require_mesh(const mesh::ScalarField& u) {
  if (u.mesh == nullptr)
    throw std::invalid_argument("viscosity: field has no mesh");
}

// shared kernel: sign=+1 builds the inf-convolution, sign=-1 the
// sup-convolution (min of -u + cost, negated back)
InfConvResult convolve(const mesh::ScalarField& u, double epsilon, int jobs,
                       double sign) {
  require_mesh(u);
  if (!(epsilon > 0.0))
    throw std::invalid_argument("viscosity: epsilon must be positive");
  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const int count = grid.count();

  InfConvResult res;
  res.epsilon = epsilon;
  res.is_sup = sign < 0.0;
  res.regularized = mesh::make_field(grid, u.name + (res.is_sup ? "^eps" : "_eps"));
  res.argmin.assign(count, -1);

  const double half_inv_eps = 1.0 / (2.0 * epsilon);
  parallel_for(count, jobs, [&](int x) {
    const Vec& px = grid.node(x).pos;
    double best = std::numeric_limits<double>::infinity();
    int best_y = -1;
    for (int y = 0; y < count; ++y) {
      const double d = geom::distance(model, grid.node(y).pos, px);
      const double val = sign * u[y] + d * d * half_inv_eps;
      if (val < best) {  // strict: ties keep the lowest node index
        best = val;
        best_y = y;
      }
    }
    res.regularized[x] = sign * best;
    res.argmin[x] = best_y;
  });

  double gap = 0.0;
  for (int x = 0; x < count; ++x)
    gap = std::max(gap, std::abs(u[x] - res.regularized[x]));
  res.max_gap = gap;
  return res;
}

}  // namespace

InfConvResult inf_convolution(const mesh::ScalarField& u, double epsilon,
                              int jobs) {
  return convolve(u, epsilon, jobs, +1.0);
}

InfConvResult sup_convolution(const mesh::ScalarField& u, double epsilon,
                              int jobs) {
  return convolve(u, epsilon, jobs, -1.0);
}

double lipschitz_audit(const InfConvResult& res) {
  const mesh::ScalarField& w = res.regularized;
  require_mesh(w);
  const mesh::BallMesh& grid = *w.mesh;
  const geom::Model& model = grid.model();
  const int count = grid.count();
  double worst = 0.0;
  for (int x = 0; x < count; ++x) {
    const Vec& px = grid.node(x).pos;
    for (int y = x + 1; y < count; ++y) {
      const double d = geom::distance(model, px, grid.node(y).pos);
      if (d <= 0.0) continue;
      worst = std::max(worst, std::abs(w[x] - w[y]) / d);
    }
  }
  return worst;
}

double semiconcavity_audit(const InfConvResult& res) {
  const mesh::ScalarField& w = res.regularized;
  require_mesh(w);
  const mesh::BallMesh& grid = *w.mesh;
  const double side = res.is_sup ? -1.0 : 1.0;
  double worst = -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<MatN> eig;
  for (int id = 0; id < grid.count(); ++id) {
    MatN H;
    if (id == mesh::BallMesh::pole())
      H = mesh::pole_fit(w).hess;
    else if (grid.stencil_ok(id))
      H = mesh::hessian(w, id);
    else
      continue;
    eig.compute(side * H, Eigen::EigenvaluesOnly);
    worst = std::max(worst, eig.eigenvalues().maxCoeff());
  }
  return worst;
}

double lipschitz_bound(const mesh::BallMesh& grid, double epsilon) {
  return 3.0 / (2.0 * epsilon) * (2.0 * grid.radius());
}

double semiconcavity_bound(const mesh::BallMesh& grid, double epsilon) {
  const double kappa = grid.model().kappa_lower();
  return geom::comparison_H(std::sqrt(kappa) * 2.0 * grid.radius()) / epsilon;
}

double modulus_of_continuity(const mesh::ScalarField& u, double s) {
  require_mesh(u);
  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const int count = grid.count();
  double worst = 0.0;
  for (int x = 0; x < count; ++x) {
    const Vec& px = grid.node(x).pos;
    for (int y = x + 1; y < count; ++y) {
      if (geom::distance(model, px, grid.node(y).pos) <= s)
        worst = std::max(worst, std::abs(u[x] - u[y]));
    }
  }
  return worst;
}

mesh::ScalarField inflate_forcing(const mesh::ScalarField& f,
                                  const mesh::ScalarField& u, double epsilon) {
  require_mesh(f);
  require_mesh(u);
  const mesh::BallMesh& grid = *f.mesh;
  const double rho = 2.0 * std::sqrt(mesh::max_abs(u) * epsilon);
  mesh::ScalarField out = mesh::make_field(grid, f.name + "_eps");
  for (int id = 0; id < grid.count(); ++id) {
    double m = 0.0;  // f^+ : empty positive part contributes 0
    for (int y : grid.nodes_within(grid.node(id).pos, rho))
      m = std::max(m, f[y]);
    out[id] = std::max(m, 0.0);
  }
  return out;
}

double default_epsilon0(const mesh::ScalarField& u) {
  require_mesh(u);
  const double diam = 2.0 * u.mesh->radius();
  return diam * diam / (16.0 * (1.0 + mesh::max_abs(u)));
}

}  // namespace hlab::visc
