#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "hlab/harnack.hpp"
#include "hlab/mesh.hpp"
#include "hlab/solver.hpp"
#include "hlab/viscosity.hpp"

namespace hlab::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NamedModel {
  std::string name;
  geom::Model model;
  double radius;  // admissible working radius for meshes and samples
};

// fixed catalogue for the self-test: every closed form is exercised on all
// three signs of the curvature plus one volumetric spot-check model
std::vector<NamedModel> selftest_models() {
  return {
      {"flat2", geom::make_model(2, 0.0), 1.2},
      {"hyp2", geom::make_model(2, -1.0), 1.2},
      {"sph2", geom::make_model(2, 1.0), 1.1},
      {"hyp3", geom::make_model(3, -1.0), 1.0},
  };
}

// random point at distance <= rho from the chart base
Vec random_point(const geom::Model& m, std::mt19937_64& rng, double rho) {
  const int n = m.n;
  VecN dir(n);
  double norm = 0.0;
  do {
    for (int k = 0; k < n; ++k) dir[k] = 2.0 * u01(rng) - 1.0;
    norm = dir.norm();
  } while (norm < 1e-3 || norm > 1.0);
  dir /= norm;
  geom::TangentVector v{m.base(), dir * (rho * u01(rng))};
  return geom::exp_map(m, v);
}

VecN random_components(int n, std::mt19937_64& rng, double rho) {
  VecN c(n);
  for (int k = 0; k < n; ++k) c[k] = 2.0 * u01(rng) - 1.0;
  if (c.norm() > 1e-12) c *= rho * u01(rng) / c.norm();
  return c;
}

// determinant of the differential of exp at v by central differences,
// measured against the canonical frames at base and image
double fd_jac_exp(const geom::Model& m, const geom::TangentVector& v,
                  double step) {
  const int n = m.n;
  const Vec image = geom::exp_map(m, v);
  const FrameMat frame = geom::frame_at(m, image);
  MatN jac(n, n);
  for (int k = 0; k < n; ++k) {
    geom::TangentVector vp = v, vm = v;
    vp.comps[k] += step;
    vm.comps[k] -= step;
    const Vec diff = (geom::exp_map(m, vp) - geom::exp_map(m, vm)) / (2.0 * step);
    for (int i = 0; i < n; ++i)
      jac(i, k) = geom::ambient_inner(m, frame.col(i), diff);
  }
  return jac.determinant();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "geometry-selftest", "abp-verify",    "measure-estimate",
      "infconv-demo",      "barrier-calibrate", "level-decay",
      "harnack-sweep",     "hoelder",
  };
  return names;
}

std::vector<double> p_list(const RunContext& ctx) {
  return ctx.config.get_list("params.p", {1.5, 2.0, 3.0});
}

std::vector<double> curvature_list(const RunContext& ctx) {
  return ctx.config.get_list("model.curvatures", {0.0, -1.0});
}

rep::Row row_leq(std::string tag, std::string params, double value,
                 double bound, std::string note) {
  rep::Row r;
  r.tag = std::move(tag);
  r.params = std::move(params);
  r.value = value;
  r.tolerance = bound;
  r.status = value <= bound ? Status::Pass : Status::Fail;
  r.margin = bound - value;
  r.note = std::move(note);
  return r;
}

rep::Row row_geq(std::string tag, std::string params, double value,
                 double bound, std::string note) {
  rep::Row r = row_leq(std::move(tag), std::move(params), -value, -bound,
                       std::move(note));
  r.value = value;
  r.tolerance = bound;
  r.margin = value - bound;
  return r;
}

rep::Row row_near(std::string tag, std::string params, double value,
                  double target, double tol, std::string note) {
  rep::Row r;
  r.tag = std::move(tag);
  r.params = std::move(params);
  r.value = value;
  r.tolerance = tol;
  const double dev = std::abs(value - target);
  r.status = dev <= tol ? Status::Pass : Status::Fail;
  r.margin = tol - dev;
  if (note.empty()) note = fmt::format("target={}", target);
  r.note = std::move(note);
  return r;
}

rep::Row row_status(std::string tag, std::string params, double value,
                    double tolerance, Status st, std::string note) {
  rep::Row r;
  r.tag = std::move(tag);
  r.params = std::move(params);
  r.value = value;
  r.tolerance = tolerance;
  r.status = st;
  r.margin = kNaN;
  r.note = std::move(note);
  return r;
}

// --- geometry-selftest --------------------------------------------------------

std::vector<rep::Row> suite_geometry(const RunContext& ctx) {
  std::vector<rep::Row> rows;

  {  // comparison functions: endpoint values and monotonicity
    double dev = std::abs(geom::comparison_S(0.0) - 1.0);
    dev = std::max(dev, std::abs(geom::comparison_H(0.0) - 1.0));
    dev = std::max(dev, std::abs(geom::comparison_S(1.0) - std::sinh(1.0)));
    rows.push_back(row_leq("comparison-values", "n/a", dev, 1e-12));

    double min_step = 0.0;
    double prev_s = geom::comparison_S(0.0), prev_h = geom::comparison_H(0.0);
    for (int k = 1; k <= 600; ++k) {
      const double tau = 0.01 * k;
      const double s = geom::comparison_S(tau), hh = geom::comparison_H(tau);
      min_step = std::min({min_step, s - prev_s, hh - prev_h});
      prev_s = s;
      prev_h = hh;
    }
    rows.push_back(row_geq("comparison-monotone", "tau<=6", min_step, -1e-15));
  }

  {  // Pucci minimum of the Ricci transform: hand values on all three signs
    double dev = std::abs(
        geom::pucci_ricci_lower(geom::make_model(2, 0.0), 1.0, 2.0));
    dev = std::max(dev, std::abs(geom::pucci_ricci_lower(
                            geom::make_model(3, -1.0), 1.0, 2.0) -
                        (-4.0)));
    dev = std::max(dev, std::abs(geom::pucci_ricci_lower(
                            geom::make_model(2, 1.0), 0.5, 1.0) -
                        0.5));
    rows.push_back(row_leq("pucci-ricci-hand", "three models", dev, 1e-15));
  }

  for (const NamedModel& nm : selftest_models()) {
    const geom::Model& m = nm.model;
    std::mt19937_64 rng(mix_seed(ctx.seed, std::hash<std::string>{}(nm.name)));
    const std::string par = fmt::format("model={};n={}", nm.name, m.n);
    const double rho = 0.45 * nm.radius;

    {  // exp/log mutual inversion
      double worst = 0.0;
      for (int it = 0; it < 1000; ++it) {
        const Vec x = random_point(m, rng, rho);
        geom::TangentVector v{x, random_components(m.n, rng, rho)};
        const geom::TangentVector back = geom::log_map(m, x, geom::exp_map(m, v));
        worst = std::max(worst, (back.comps - v.comps).norm());
        const Vec y = random_point(m, rng, rho);
        const Vec fwd = geom::exp_map(m, geom::log_map(m, x, y));
        worst = std::max(worst, (fwd - y).norm());
      }
      rows.push_back(row_leq("roundtrip-" + nm.name, par, worst, 1e-10));
    }

    {  // closed-form Jacobian of exp vs central differences
      double worst = 0.0;
      for (int it = 0; it < 50; ++it) {
        const Vec x = random_point(m, rng, rho);
        geom::TangentVector v{x, random_components(m.n, rng, rho)};
        const double closed = geom::jac_exp(m, v);
        const double fd = fd_jac_exp(m, v, 1e-5);
        worst = std::max(worst, std::abs(closed - fd) / std::abs(closed));
      }
      rows.push_back(row_leq("jac-exp-fd-" + nm.name, par, worst, 1e-6));
    }

    {  // Jacobian equals the space-form comparison value
      double worst = 0.0;
      for (int it = 0; it < 200; ++it) {
        const Vec x = random_point(m, rng, rho);
        geom::TangentVector v{x, random_components(m.n, rng, rho)};
        const double tau = std::sqrt(std::abs(m.curvature)) * v.norm();
        double form = 1.0;
        if (m.hyperbolic()) form = std::pow(geom::comparison_S(tau), m.n - 1);
        if (m.spherical()) form = std::pow(geom::circ_S(tau), m.n - 1);
        worst = std::max(worst, std::abs(geom::jac_exp(m, v) - form));
      }
      rows.push_back(row_leq("jac-exp-form-" + nm.name, par, worst, 1e-12));
    }

    {  // Hessian of d^2/2: radial eigenvalue 1, tangential comparison value
      double worst = 0.0;
      for (int it = 0; it < 200; ++it) {
        const Vec x = random_point(m, rng, rho);
        const Vec y = random_point(m, rng, rho);
        const double d = geom::distance(m, x, y);
        if (d < 1e-6) continue;
        const MatN hess = geom::hess_half_dist_sq(m, x, y);
        Eigen::SelfAdjointEigenSolver<MatN> es(hess);
        const double tau = std::sqrt(std::abs(m.curvature)) * d;
        double tang = 1.0;
        if (m.hyperbolic()) tang = geom::comparison_H(tau);
        if (m.spherical()) tang = geom::circ_H(tau);
        VecN expected(m.n);
        expected[0] = 1.0;  // radial
        for (int k = 1; k < m.n; ++k) expected[k] = tang;
        std::sort(expected.data(), expected.data() + m.n);
        worst = std::max(worst,
                         (es.eigenvalues() - expected).cwiseAbs().maxCoeff());
      }
      const MatN at_center =
          geom::hess_half_dist_sq(m, m.base(), m.base());
      worst = std::max(
          worst, (at_center - MatN::Identity(m.n, m.n)).cwiseAbs().maxCoeff());
      rows.push_back(row_leq("hess-eigenvalues-" + nm.name, par, worst, 1e-9));
    }

    {  // Hessian vs symmetric second difference of d^2/2 along random rays
      double worst = 0.0;
      const double t = 1e-5;
      for (int it = 0; it < 100; ++it) {
        const Vec x = random_point(m, rng, rho);
        const Vec y = random_point(m, rng, rho);
        VecN w = random_components(m.n, rng, 1.0);
        if (w.norm() < 1e-9) continue;
        w /= w.norm();
        const MatN hess = geom::hess_half_dist_sq(m, x, y);
        auto phi = [&](double s) {
          geom::TangentVector tv{x, w * s};
          const double d = geom::distance(m, geom::exp_map(m, tv), y);
          return 0.5 * d * d;
        };
        const double quot = (phi(t) - 2.0 * phi(0.0) + phi(-t)) / (t * t);
        worst = std::max(worst, std::abs(quot - w.dot(hess * w)));
      }
      rows.push_back(row_leq("hess-fd-" + nm.name, par, worst, 1e-5));
    }

    {  // interpolation monotonicity: D2(d^2_{y_t}/2) - t D2(d^2_y/2) is PSD
      double min_eig = 0.0;
      for (int it = 0; it < 100; ++it) {
        const Vec x = random_point(m, rng, rho);
        const Vec y = random_point(m, rng, rho);
        const MatN full = geom::hess_half_dist_sq(m, x, y);
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          const Vec yt = geom::geodesic_point(m, x, y, t);
          const MatN part = geom::hess_half_dist_sq(m, x, yt);
          Eigen::SelfAdjointEigenSolver<MatN> es(part - t * full);
          min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
      }
      rows.push_back(
          row_geq("hess-interp-psd-" + nm.name, par, min_eig, -1e-9));
    }

    {  // quadrature weights reproduce the closed-form ball volumes
      const bool volumetric = m.n == 3;
      const int n_r = volumetric ? 20 : 96;
      const int n_theta = volumetric ? 24 : 384;
      const auto grid = mesh::BallMesh::build(m, nm.radius, n_r, n_theta,
                                              volumetric ? 48 : 0);
      const double vol = geom::ball_volume(m, nm.radius);
      rows.push_back(row_leq(
          "volume-total-" + nm.name, par,
          std::abs(grid.total_measure() / vol - 1.0), 1e-9));

      const double sub = 0.75 * nm.radius;
      const double q = mesh::ball_measure(grid, m.base(), sub) /
                       geom::ball_volume(m, sub);
      rows.push_back(row_leq("volume-subball-" + nm.name, par,
                             std::abs(q - 1.0), 3.0 * grid.h_r()));

      if (!volumetric) {  // sub-level measure of the distance field
        const auto dist_field = mesh::sample(
            grid, [&](const Vec& x) { return geom::distance(m, m.base(), x); },
            "d");
        const double got = mesh::measure_where(
            dist_field, [](double v) { return v < 0.5; }, m.base(), nm.radius);
        rows.push_back(row_leq(
            "measure-sublevel-" + nm.name, par,
            std::abs(got / geom::ball_volume(m, 0.5) - 1.0),
            3.0 * grid.h_r()));
      }
    }

    {  // closed-form doubling: V(2r) <= D V(r) for 2r inside the working ball
      const double D = geom::doubling_constant(m, nm.radius);
      double worst = 0.0;
      for (double fr : {0.1, 0.2, 0.3, 0.5}) {
        const double r = fr * nm.radius;
        worst = std::max(worst, geom::ball_volume(m, 2.0 * r) /
                                    (D * geom::ball_volume(m, r)));
      }
      rows.push_back(row_leq("doubling-bound-" + nm.name, par, worst,
                             1.0 + 1e-12));
    }

    if (m.n == 2) {  // stencil consistency against the closed-form Hessian
      const int n_r = 64;
      const auto grid = mesh::BallMesh::build(m, nm.radius, n_r, 4 * n_r);
      const Vec y = random_point(m, rng, 0.3 * nm.radius);
      const auto half_sq = mesh::sample(
          grid,
          [&](const Vec& x) {
            const double d = geom::distance(m, x, y);
            return 0.5 * d * d;
          },
          "dsq");
      double worst = 0.0;
      for (int id = 0; id < grid.count(); ++id) {
        if (!grid.stencil_ok(id)) continue;
        const MatN got = mesh::hessian(half_sq, id);
        const MatN want = geom::hess_half_dist_sq(m, grid.node(id).pos, y);
        worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
        const VecN g = mesh::gradient(half_sq, id).comps;
        const VecN wantg = -geom::log_map(m, grid.node(id).pos, y).comps;
        worst = std::max(worst, (g - wantg).cwiseAbs().maxCoeff());
      }
      const double tol =
          ctx.config.get_double("selftest.stencil_tol_factor", 40.0) *
          grid.h_r() * grid.h_r();
      rows.push_back(row_leq("stencil-halfdistsq-" + nm.name, par, worst, tol));
    }
  }

  return rows;
}

// --- infconv-demo -------------------------------------------------------------

namespace {

// closed form of the inf-convolution of |x| on the line
double infconv_abs_closed(double x, double eps) {
  return std::abs(x) <= eps ? x * x / (2.0 * eps) : std::abs(x) - 0.5 * eps;
}

// golden-section minimum of the convex sliding objective (independent of the
// closed form above)
double infconv_abs_search(double x, double eps) {
  auto f = [&](double y) {
    return std::abs(y) + (x - y) * (x - y) / (2.0 * eps);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = -2.0, hi = 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  for (int it = 0; it < 160; ++it) {
    if (f(c) < f(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

std::vector<rep::Row> suite_infconv(const RunContext& ctx) {
  std::vector<rep::Row> rows;

  {  // 1-D |x| example against its closed form
    double worst = 0.0;
    for (double eps : {0.1, 0.05}) {
      for (int k = -128; k <= 128; ++k) {
        const double x = k / 128.0;
        worst = std::max(worst, std::abs(infconv_abs_search(x, eps) -
                                         infconv_abs_closed(x, eps)));
      }
    }
    rows.push_back(row_leq("infconv-1d-closed-form", "u=|x|", worst, 1e-8));
  }

  const int n = ctx.config.get_int("model.n", 2);
  const int n_r = ctx.config.get_int("infconv.n_r", 40);
  const int n_theta = ctx.config.get_int("infconv.n_theta", 160);
  const int fields = ctx.config.get_int("infconv.fields", 5);

  for (double curv : curvature_list(ctx)) {
    const geom::Model m = geom::make_model(n, curv);
    const auto grid = mesh::BallMesh::build(m, 1.0, n_r, n_theta);
    const double h = grid.h_r();
    ops::EllipticParams prm;  // profile generation only

    for (int k = 0; k < fields; ++k) {
      const auto profile = (k % 2 == 0) ? solver::Profile::RadialShell
                                        : solver::Profile::PerturbedRadial;
      const auto inst = solver::make_instance(
          grid, prm, profile,
          static_cast<unsigned>(mix_seed(ctx.seed, 90 + 10 * k + (curv < 0))));
      const mesh::ScalarField& u = inst.u;
      const double eps0 = visc::default_epsilon0(u);
      const std::string par =
          fmt::format("curv={};field={};eps0={:.3g}", curv, k, eps0);

      std::vector<visc::InfConvResult> ladder;
      for (double eps : {eps0, 0.5 * eps0, 0.25 * eps0})
        ladder.push_back(visc::inf_convolution(u, eps, ctx.jobs));

      double above = -std::numeric_limits<double>::infinity();
      for (const auto& res : ladder)
        for (int id = 0; id < grid.count(); ++id)
          above = std::max(above, res.regularized[id] - u[id]);
      rows.push_back(row_leq("infconv-below-u", par, above, 0.0));

      double min_gain = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j + 1 < ladder.size(); ++j)
        for (int id = 0; id < grid.count(); ++id)
          min_gain = std::min(min_gain, ladder[j + 1].regularized[id] -
                                            ladder[j].regularized[id]);
      rows.push_back(row_geq("infconv-monotone-eps", par, min_gain, 0.0));

      double lip_ratio = 0.0, semi_ratio = 0.0;
      for (std::size_t j : {std::size_t{0}, ladder.size() - 1}) {
        const double eps = ladder[j].epsilon;
        lip_ratio = std::max(
            lip_ratio, visc::lipschitz_audit(ladder[j]) /
                           (visc::lipschitz_bound(grid, eps) * (1.0 + 3.0 * h)));
        semi_ratio = std::max(semi_ratio,
                              visc::semiconcavity_audit(ladder[j]) /
                                  (visc::semiconcavity_bound(grid, eps) *
                                   (1.0 + 3.0 * h)));
      }
      rows.push_back(row_leq("infconv-lipschitz", par, lip_ratio, 1.0));
      rows.push_back(row_leq("infconv-semiconcavity", par, semi_ratio, 1.0));
    }
  }

  return rows;
}

// --- barrier-calibrate ----------------------------------------------------------

std::vector<rep::Row> suite_barrier(const RunContext& ctx) {
  std::vector<rep::Row> rows;
  const double r0 = 1.0;
  const double r = ctx.config.get_double("barrier.r", r0 / 5.0);
  const auto beta_r0 = ctx.config.get_list("barrier.beta_r0", {0.0, 1.0});

  for (double p : p_list(ctx)) {
    for (double curv : curvature_list(ctx)) {
      for (double br : beta_r0) {
        const geom::Model m = geom::make_model(2, curv);
        ops::EllipticParams prm;
        prm.p = p;
        prm.beta = br / r0;
        const auto spec = harnack::calibrate_barrier(m, prm, r, m.base());
        const std::string par =
            fmt::format("p={};curv={};betaR0={}", p, curv, br);
        const std::string note =
            fmt::format("alpha={};mtilde={:.6g}", spec.alpha, spec.mtilde);

        rows.push_back(row_geq("barrier-slack", par, spec.slack, 2.0 - 1e-9,
                               note));
        rows.push_back(row_leq("barrier-edge-zero", par,
                               std::abs(harnack::barrier_value(spec, 5.0 * r)),
                               0.0, note));
        rows.push_back(row_geq("barrier-interior-above-one", par,
                               harnack::barrier_value(spec, 4.0 * r), 1.0,
                               note));
        rows.push_back(row_leq(
            "barrier-amplitude", par,
            harnack::barrier_value(spec, r) / spec.mtilde, 1.0, note));
      }
    }
  }

  {  // hand-checked Euclidean p = 2 calibration
    const geom::Model m = geom::make_model(2, 0.0);
    ops::EllipticParams prm;
    const auto spec = harnack::calibrate_barrier(m, prm, r, m.base());
    rows.push_back(row_near("barrier-hand-alpha", "p=2;curv=0;betaR0=0",
                            spec.alpha, 2.0, 0.0));
    rows.push_back(row_near("barrier-hand-mtilde", "p=2;curv=0;betaR0=0",
                            spec.mtilde / 312.5, 1.0, 1e-9));

    harnack::BarrierSpec hand;
    hand.alpha = 2.0;
    hand.mtilde = 312.5;
    hand.r = r;
    hand.beta = 0.0;
    hand.z0 = m.base();
    double min_slack = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 10000; ++i) {
      const double d = r * (1.0 + 4.0 * i / 10000.0);
      min_slack = std::min(min_slack, harnack::barrier_slack(m, hand, 2.0, d));
    }
    rows.push_back(row_geq("barrier-hand-admissible", "p=2;curv=0;betaR0=0",
                           min_slack, 2.0 - 1e-9));
  }

  return rows;
}

// --- dispatch and emission ------------------------------------------------------

std::vector<rep::Row> run_suite(const std::string& name,
                                const RunContext& ctx) {
  static const std::map<std::string,
                        std::vector<rep::Row> (*)(const RunContext&)>
      table = {
          {"geometry-selftest", suite_geometry},
          {"abp-verify", suite_abp},
          {"measure-estimate", suite_measure},
          {"infconv-demo", suite_infconv},
          {"barrier-calibrate", suite_barrier},
          {"level-decay", suite_decay},
          {"harnack-sweep", suite_harnack},
          {"hoelder", suite_hoelder},
      };
  const auto it = table.find(name);
  if (it == table.end())
    throw std::invalid_argument("unknown subcommand: " + name);
  return it->second(ctx);
}

int run(const std::string& name, const RunContext& ctx) {
  std::filesystem::create_directories(ctx.out_dir);

  std::vector<std::string> names;
  if (name == "all") {
    names = subcommands();
  } else {
    names.push_back(name);
  }

  std::vector<std::pair<std::string, std::vector<rep::Row>>> sections;
  std::vector<rep::Row> combined;
  for (const std::string& nm : names) {
    std::vector<rep::Row> rows = run_suite(nm, ctx);
    if (!ctx.filter.empty()) {
      std::erase_if(rows, [&](const rep::Row& r) {
        return r.tag.find(ctx.filter) == std::string::npos;
      });
    }
    rep::write_rows(ctx.out_dir / (nm + ".csv"), rows);
    combined.insert(combined.end(), rows.begin(), rows.end());
    sections.emplace_back(nm, std::move(rows));
  }

  std::ofstream json(ctx.out_dir / "summary.json", std::ios::binary);
  json << rep::summary_json(sections) << '\n';

  return rep::exit_code(combined);
}

}  // namespace hlab::cli
