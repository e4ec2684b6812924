#include "hlab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>

namespace hlab::solver {

namespace {

// operator value with the agreed small-gradient regularization: wherever
// |grad| < h the gradient norm is replaced by sqrt(|grad|^2 + h^2)
double op_value(const VecN& g, const MatN& H, double p, double h) {
  const double gn = g.norm();
  if (p == 2.0) return H.trace();
  if (gn >= h) {
    const VecN n = g / gn;
    return std::pow(gn, p - 2.0) * (H.trace() + (p - 2.0) * n.dot(H * n));
  }
  const double q = g.squaredNorm() + h * h;
  return std::pow(q, 0.5 * (p - 2.0)) *
         (H.trace() + (p - 2.0) * g.dot(H * g) / q);
}

// the delta-regularized operator the Picard iteration actually solves; its
// fixed point is an exact zero of this residual (op_value above differs by
// O(delta) wherever |grad| >= h, which sits far above the solve tolerance)
double op_value_reg(const VecN& g, const MatN& H, double p, double delta) {
  if (p == 2.0) return H.trace();
  const double q = g.squaredNorm() + delta;
  return std::pow(q, 0.5 * (p - 2.0)) *
         (H.trace() + (p - 2.0) * g.dot(H * g) / q);
}

struct StencilCache {
  std::vector<int> active;  // nodes with derivative rows (pole + stencil-ok)
  std::vector<std::vector<mesh::HessEntry>> hess;  // per node id (empty if not active)
  std::vector<std::vector<mesh::GradEntry>> grad;
  mesh::PoleStencil pole;
};

StencilCache build_cache(const mesh::BallMesh& m) {
  StencilCache c;
  c.hess.resize(m.count());
  c.grad.resize(m.count());
  c.pole = mesh::pole_stencil(m);
  c.active.push_back(mesh::BallMesh::pole());
  for (int id = 1; id < m.count(); ++id) {
    if (!m.stencil_ok(id)) continue;
    c.hess[id] = mesh::hessian_stencil(m, id);
    c.grad[id] = mesh::gradient_stencil(m, id);
    c.active.push_back(id);
  }
  return c;
}

VecN grad_at(const StencilCache& c, const std::vector<double>& u, int id,
             int n) {
  VecN g = VecN::Zero(n);
  const auto& entries = id == 0 ? c.pole.grad : c.grad[id];
  for (const auto& e : entries) g += e.coeff * u[e.node];
  return g;
}

MatN hess_at(const StencilCache& c, const std::vector<double>& u, int id,
             int n) {
  MatN H = MatN::Zero(n, n);
  const auto& entries = id == 0 ? c.pole.hess : c.hess[id];
  for (const auto& e : entries) H += e.coeff * u[e.node];
  return H;
}

double cache_residual(const StencilCache& c, const mesh::BallMesh& m,
                      const std::vector<double>& u,
                      const ops::EllipticParams& prm,
                      const std::vector<double>& f, double delta) {
  const int n = m.model().n;
  double worst = 0.0;
  for (int id : c.active) {
    const VecN g = grad_at(c, u, id, n);
    const MatN H = hess_at(c, u, id, n);
    worst = std::max(worst,
                     std::abs(op_value_reg(g, H, prm.p, delta) - f[id]));
  }
  return worst;
}

}  // namespace

mesh::ScalarField residual_field(const mesh::ScalarField& u,
                                 const ops::EllipticParams& prm,
                                 const mesh::ScalarField& f) {
  prm.validate();
  const mesh::BallMesh& m = *u.mesh;
  mesh::ScalarField r = mesh::make_field(m, "residual");
  const mesh::PoleFit pf = mesh::pole_fit(u);
  r[0] = op_value(pf.grad, pf.hess, prm.p, m.h_r()) - f[0];
  for (int id = 1; id < m.count(); ++id) {
    if (!m.stencil_ok(id)) continue;
    const VecN g = mesh::gradient(u, id).comps;
    const MatN H = mesh::hessian(u, id);
    r[id] = op_value(g, H, prm.p, m.h_r()) - f[id];
  }
  return r;
}

double max_residual(const mesh::ScalarField& u, const ops::EllipticParams& prm,
                    const mesh::ScalarField& f) {
  return mesh::max_abs(residual_field(u, prm, f));
}

mesh::ScalarField solve_dirichlet(
    const mesh::BallMesh& m, const ops::EllipticParams& prm,
    const mesh::ScalarField& f,
    const std::function<double(const Vec&)>& boundary, const Controls& ctl,
    Diagnostics* diag_out) {
  prm.validate();
  if (m.model().n != 2)
    throw std::invalid_argument("solver: only dimension 2 is supported");

  const int N = m.count();
  const int n = m.model().n;
  const double h = m.h_r();
  const double delta = h * h;
  const StencilCache cache = build_cache(m);

  std::vector<double> fv = f.values;
  std::vector<double> bv(N, 0.0);
  for (int id = 0; id < N; ++id)
    if (m.boundary(id)) bv[id] = boundary(m.node(id).pos);

  Eigen::SparseMatrix<double> A(N, N);
  Eigen::VectorXd rhs(N);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  // assemble and solve tr(Acoef(id) D^2 u) = f with Dirichlet rows
  auto linear_solve = [&](const std::vector<MatN>& coef) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(N) * 12);
    for (int id = 0; id < N; ++id) {
      if (m.boundary(id) || (id != 0 && !m.stencil_ok(id))) {
        trips.emplace_back(id, id, 1.0);
        rhs[id] = m.boundary(id) ? bv[id] : 0.0;
        continue;
      }
      const auto& entries = id == 0 ? cache.pole.hess : cache.hess[id];
      for (const auto& e : entries) {
        const double w = (coef[id].transpose() * e.coeff).trace();
        trips.emplace_back(id, e.node, w);
      }
      rhs[id] = fv[id];
    }
    A.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      lu.analyzePattern(A);
      analyzed = true;
    }
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
      throw SolveFailure("solver: linear factorization failed", {});
    const Eigen::VectorXd sol = lu.solve(rhs);
    return std::vector<double>(sol.data(), sol.data() + N);
  };

  Diagnostics diag;
  const double f_scale = 1.0 + mesh::max_abs(f);
  const double tol = ctl.tol_factor * f_scale;

  // initial iterate: the p = 2 problem
  std::vector<MatN> coef(N, MatN::Identity(n, n));
  std::vector<double> u = linear_solve(coef);
  double resid = cache_residual(cache, m, u, prm, fv, delta);
  diag.residual_history.push_back(resid);
  diag.damping_history.push_back(1.0);
  diag.iterations = 1;

  // continuation in the regularization: warm-start through a descending
  // delta ladder so the frozen-coefficient map stays contractive when the
  // operator degenerates at interior critical points (p > 2 wells)
  std::vector<double> rungs;
  if (prm.p != 2.0) {
    for (double d : {1e-1, 1e-2, 1e-3})
      if (d > delta) rungs.push_back(d);
    rungs.push_back(delta);
  }

  for (std::size_t r = 0; r < rungs.size(); ++r) {
    const double rung = rungs[r];
    const bool last = r + 1 == rungs.size();
    resid = cache_residual(cache, m, u, prm, fv, rung);
    // intermediate rungs only warm-start the next one
    const double rung_tol = last ? tol : std::max(tol, 1e-3 * f_scale);

    int stalls = 0;  // consecutive iterations where no damping improved
    while (resid > rung_tol) {
      if (diag.iterations >= ctl.max_iter) {
        diag.final_residual = resid;
        throw SolveFailure("solver: no convergence within max_iter", diag);
      }
      for (int id : cache.active)
        coef[id] = ops::frozen_coefficient(grad_at(cache, u, id, n), prm.p,
                                           rung);
      const std::vector<double> proposal = linear_solve(coef);

      double omega = 1.0;
      std::vector<double> trial(N);
      double trial_resid = 0.0;
      bool improved = false;
      for (;;) {
        for (int id = 0; id < N; ++id)
          trial[id] = u[id] + omega * (proposal[id] - u[id]);
        trial_resid = cache_residual(cache, m, trial, prm, fv, rung);
        if (trial_resid < resid) {
          improved = true;
          break;
        }
        if (omega <= ctl.damping_min) break;
        omega *= 0.5;
      }
      if (improved) {
        u = std::move(trial);
        resid = trial_resid;
        stalls = 0;
      } else if (++stalls >= 3) {  // rejected steps: quit, don't burn
        if (!last) break;  // hand the iterate to the next rung as-is
        diag.final_residual = resid;
        throw SolveFailure("solver: stalled above tolerance", diag);
      }
      diag.residual_history.push_back(resid);
      diag.damping_history.push_back(improved ? omega : 0.0);
      ++diag.iterations;
    }
  }

  if (prm.p != 2.0) resid = cache_residual(cache, m, u, prm, fv, delta);
  diag.converged = resid <= tol;
  diag.final_residual = resid;
  if (!diag.converged)
    throw SolveFailure("solver: stalled above tolerance", diag);

  mesh::ScalarField out = mesh::make_field(m, "u");
  out.values = std::move(u);
  if (diag_out) *diag_out = diag;
  return out;
}

// --- manufactured instances ---------------------------------------------------

Instance make_instance(const mesh::BallMesh& m, const ops::EllipticParams& prm,
                       Profile profile, unsigned seed) {
  prm.validate();
  std::mt19937 rng(seed);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const double R = m.radius();
  mesh::ScalarField u;

  switch (profile) {
    case Profile::RadialShell: {
      const double amp = uni(0.5, 2.0), q = uni(1.0, 2.0);
      u = mesh::sample(
          m,
          [&](const Vec& x) {
            const double d = geom::distance(m.model(), m.model().base(), x);
            const double s = 1.0 - (d / R) * (d / R);
            return amp * std::pow(std::max(0.0, s), q);
          },
          "u");
      break;
    }
    case Profile::PerturbedRadial: {
      const double amp = uni(0.5, 2.0), q = uni(1.0, 2.0);
      const double eps = amp * uni(0.05, 0.2);
      const int k = rng() % 2 == 0 ? 2 : 3;
      const double ph = uni(0.0, 6.28);
      u = mesh::sample(
          m,
          [&](const Vec& x) {
            const geom::PolarCoords pc = geom::chart_of(m.model(), x);
            const double w = 1.0 - (pc.r / R) * (pc.r / R);
            const double bump = std::pow(pc.r / R, k) * w * w *
                                std::cos(k * pc.theta + ph);
            return amp * std::pow(std::max(0.0, w), q) + eps * bump;
          },
          "u");
      break;
    }
    case Profile::SolvedWell: {
      if (m.model().n != 2)
        throw std::invalid_argument("make_instance: SolvedWell needs n = 2");
      const double c = uni(0.5, 2.0);
      const double b0 = uni(0.5, 1.5), mod = uni(0.0, 0.4), ph = uni(0.0, 6.28);
      mesh::ScalarField fc = mesh::make_field(m, "f");
      for (auto& v : fc.values) v = c;
      u = solve_dirichlet(m, prm, fc, [&](const Vec& x) {
        const geom::PolarCoords pc = geom::chart_of(m.model(), x);
        return b0 * (1.0 + mod * std::cos(pc.theta + ph));
      });
      break;
    }
  }

  // the instance forcing is the discrete operator value itself, so the
  // supersolution audit is exact by construction
  mesh::ScalarField zero = mesh::make_field(m, "zero");
  mesh::ScalarField f = residual_field(u, prm, zero);
  f.name = "f";

  const double lift = 0.1 - mesh::min_value(u);
  if (lift > 0.0)
    for (auto& v : u.values) v += lift;

  Instance inst{std::move(u), std::move(f), profile, 0.0};
  return inst;
}

}  // namespace hlab::solver
