#include "hlab/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hlab::harnack {

namespace {

constexpr int kRadialSamples = 10000;

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

double barrier_value(const BarrierSpec& b, double d) {
  // the subtrahend is written as the first term at d = 5r, so the boundary
  // value cancels exactly
  return b.mtilde * (std::pow(b.r / d, b.alpha) -
                     std::pow(b.r / (5.0 * b.r), b.alpha));
}

double barrier_slack(const geom::Model& m, const BarrierSpec& b, double p,
                     double d) {
  const double shape = std::pow(b.r / d, b.alpha);
  const double dg = -b.mtilde * b.alpha * shape / d;
  const double ddg = b.mtilde * b.alpha * (b.alpha + 1.0) * shape / (d * d);
  const double sn_ratio = geom::sn_prime(m, d) / geom::sn(m, d);
  return std::pow(b.r, p) *
         (ops::radial_p_laplacian(dg, ddg, m.n, sn_ratio, p) -
          b.beta * std::pow(-dg, p - 1.0));
}

BarrierSpec calibrate_barrier(const geom::Model& m,
                              const ops::EllipticParams& prm, double r,
                              const Vec& z0) {
  prm.validate();
  if (!(r > 0.0) || !m.admissible_radius(5.0 * r))
    throw std::invalid_argument("barrier: B_5r not admissible");
  const double p = prm.p;
  const int n = m.n;

  // per-sample geometry, independent of alpha
  std::vector<double> d(kRadialSamples), drift(kRadialSamples);
  for (int i = 1; i <= kRadialSamples; ++i) {
    const double di = r * (1.0 + 4.0 * i / kRadialSamples);
    d[i - 1] = di;
    drift[i - 1] =
        (n - 1) * di * geom::sn_prime(m, di) / geom::sn(m, di) + prm.beta * di;
  }

  for (double alpha = 2.0; alpha <= (1 << 30); alpha *= 2.0) {
    const double expn = (alpha + 1.0) * (p - 1.0) + 1.0;
    double ms = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kRadialSamples; ++i) {
      const double excess = (alpha + 1.0) * (p - 1.0) - drift[i];
      ms = std::min(ms, std::pow(r / d[i], expn) * excess);
    }
    if (!(ms > 0.0)) continue;

    const double m_slack =
        std::pow(2.0 / ms, 1.0 / (p - 1.0)) / alpha * (1.0 + 1e-12);
    const double m_cap =
        (1.0 + 1e-9) / (std::pow(4.0, -alpha) - std::pow(5.0, -alpha));
    BarrierSpec spec;
    spec.alpha = alpha;
    spec.mtilde = std::max(m_slack, m_cap);
    spec.r = r;
    spec.beta = prm.beta;
    spec.z0 = z0;

    for (int attempt = 0; attempt < 8; ++attempt) {
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < kRadialSamples; ++i)
        worst = std::min(worst, barrier_slack(m, spec, p, d[i]));
      const bool above_one = barrier_value(spec, 4.0 * r) > 1.0;
      const bool below_amp = barrier_value(spec, r) < spec.mtilde;
      const bool zero_edge = barrier_value(spec, 5.0 * r) == 0.0;
      if (worst >= 2.0 - 1e-9 && above_one && below_amp && zero_edge) {
        spec.slack = worst;
        return spec;
      }
      spec.mtilde *= 1.0 + 1e-10;
    }
  }
  throw std::runtime_error("barrier: calibration exhausted the alpha ladder");
}

double critical_mtilde(const geom::Model& m, const ops::EllipticParams& prm,
                       double r, double r0) {
  ops::EllipticParams drifted = prm;
  drifted.beta = 1.0 / r0;
  const BarrierSpec spec = calibrate_barrier(m, drifted, r / 4.0, m.base());
  return prm.p / (prm.p - 1.0) * abp::mtilde(prm.p) * (spec.mtilde + 1.0);
}

DensityReport critical_density_check(const mesh::ScalarField& u, double r,
                                     const Vec& z0, double theta,
                                     const ops::EllipticParams& prm,
                                     double tol) {
  if (u.mesh == nullptr)
    throw std::invalid_argument("harnack: field has no mesh");
  if (!(theta > 0.0)) throw std::invalid_argument("harnack: need theta > 0");
  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const double p = prm.p;
  const abp::Variant v = abp::variant_for(prm);

  DensityReport rep;
  rep.theta = theta;
  rep.mtilde = critical_mtilde(model, prm, r, grid.radius());
  rep.delta = abp::delta_formula(model, v, prm, r / 4.0, grid.radius());
  rep.min_value = mesh::min_value(u);
  rep.worst_forcing =
      std::pow(r, p) * std::max(abp::worst_forcing(u, v, prm), 0.0);

  const double slack = 1e-10 * (1.0 + mesh::max_abs(u));
  rep.hypotheses_ok =
      rep.min_value >= -slack &&
      rep.worst_forcing <= std::pow(theta, p - 1.0) * (1.0 + 1e-9);
  if (!rep.hypotheses_ok) {
    rep.status = Status::Skip;
    return rep;
  }

  const double level = theta * rep.mtilde;
  rep.fraction =
      mesh::measure_where(u, [level](double x) { return x > level; }, z0, r) /
      mesh::ball_measure(grid, z0, r);
  rep.min_inner = mesh::min_in(u, z0, r);
  const bool implication = rep.fraction > 1.0 - rep.delta
                               ? rep.min_inner > theta * (1.0 - tol)
                               : true;
  rep.status = implication ? Status::Pass : Status::Fail;
  return rep;
}

DecayReport level_decay(const mesh::ScalarField& u, double R, const Vec& x0,
                        const ops::EllipticParams& prm, double base,
                        double delta_min) {
  if (u.mesh == nullptr)
    throw std::invalid_argument("harnack: field has no mesh");
  if (!(base > 1.0)) throw std::invalid_argument("harnack: need base > 1");
  const mesh::BallMesh& grid = *u.mesh;
  const double p = prm.p;

  DecayReport rep;
  rep.base = base;
  rep.delta_min = delta_min;

  const double slack = 1e-10 * (1.0 + mesh::max_abs(u));
  rep.audited =
      mesh::min_value(u) >= -slack &&
      mesh::min_in(u, x0, R) <= 1.0 + slack &&
      std::pow(R, p) *
              std::max(abp::worst_forcing(u, abp::variant_for(prm), prm),
                       0.0) <=
          1.0 + 1e-9;

  double w_max = 0.0;
  for (int id : grid.nodes_within(x0, R))
    w_max = std::max(w_max, grid.node(id).weight);
  const double floor = 10.0 * w_max;  // below this, quantization dominates

  for (int k = 1; k <= 40; ++k) {
    const double t = std::pow(base, k);
    const double mk =
        mesh::measure_where(u, [t](double x) { return x > t; }, x0, R);
    rep.thresholds.push_back(t);
    rep.measures.push_back(mk);
    if (mk == 0.0) break;
  }

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < rep.measures.size(); ++k) {
    if (rep.measures[k] > 0.0) {
      ++rep.nonempty;
      lx.push_back(std::log(rep.thresholds[k]));
      ly.push_back(std::log(rep.measures[k]));
    }
    if (k + 1 < rep.measures.size() && rep.measures[k] >= floor)
      rep.max_ratio =
          std::max(rep.max_ratio, rep.measures[k + 1] / rep.measures[k]);
  }
  if (lx.size() >= 2) rep.eps_fit = -fit_slope(lx, ly);

  if (rep.measures.front() == 0.0)
    rep.status = Status::Pass;  // nothing above the first threshold
  else if (rep.nonempty < 3)
    rep.status = Status::Inconclusive;
  else
    rep.status =
        rep.max_ratio <= 1.0 - delta_min ? Status::Pass : Status::Fail;
  return rep;
}

DichotomyReport ball_dichotomy_check(const mesh::ScalarField& e_ind,
                                     const mesh::ScalarField& f_ind, double R,
                                     const Vec& x0, double delta,
                                     int center_budget) {
  if (e_ind.mesh == nullptr || e_ind.mesh != f_ind.mesh)
    throw std::invalid_argument("dichotomy: fields must share one mesh");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("dichotomy: need delta in (0,1)");
  const mesh::BallMesh& grid = *e_ind.mesh;
  const auto in_e = [](double x) { return x > 0.5; };

  const std::vector<int> ids = grid.nodes_within(x0, R);
  for (int id : ids)
    if (e_ind[id] > 0.5 && !(f_ind[id] > 0.5))
      throw std::invalid_argument("dichotomy: E not contained in F");

  DichotomyReport rep;
  rep.measure_e = mesh::measure_where(e_ind, in_e, x0, R);
  rep.measure_f = mesh::measure_where(f_ind, in_e, x0, R);
  rep.measure_ball = mesh::ball_measure(grid, x0, R);

  if (rep.measure_e > (1.0 - delta) * rep.measure_ball) {
    rep.status = Status::Skip;  // the lemma's precondition fails
    return rep;
  }

  rep.hypothesis_ok = true;
  const std::size_t stride = std::max<std::size_t>(
      1, ids.size() / static_cast<std::size_t>(std::max(center_budget, 1)));
  for (std::size_t s = 0; s < ids.size(); s += stride) {
    const Vec& center = grid.node(ids[s]).pos;
    const double off = geom::distance(grid.model(), center, x0);
    for (int mlev = 1; mlev <= 5; ++mlev) {
      const double rad = R / (1 << mlev);
      if (off + rad > R * (1.0 + 1e-12)) continue;
      ++rep.balls_sampled;
      const std::vector<int> ball = grid.nodes_within(center, rad);
      double wb = 0.0, we = 0.0;
      for (int id : ball) {
        wb += grid.node(id).weight;
        if (e_ind[id] > 0.5) we += grid.node(id).weight;
      }
      if (wb == 0.0 || we <= (1.0 - delta) * wb) continue;
      ++rep.dense_balls;
      for (int id : ball)
        if (!(f_ind[id] > 0.5)) {
          rep.hypothesis_ok = false;
          break;
        }
    }
  }
  if (!rep.hypothesis_ok) {
    rep.status = Status::Skip;
    return rep;
  }

  rep.c0 = rep.measure_f > 0.0
               ? std::min(1.0, (1.0 - rep.measure_e / rep.measure_f) / delta)
               : (rep.measure_e == 0.0 ? 1.0 : 0.0);
  rep.status = rep.measure_e == 0.0 || rep.c0 > 0.0 ? Status::Pass
                                                    : Status::Fail;
  return rep;
}

QuotientResult harnack_quotient(const mesh::ScalarField& u, double R,
                                const Vec& z0, const ops::EllipticParams& prm,
                                double f_sup, double eps_diag) {
  if (u.mesh == nullptr)
    throw std::invalid_argument("harnack: field has no mesh");
  const mesh::BallMesh& grid = *u.mesh;
  const geom::Model& model = grid.model();
  const double p = prm.p;

  QuotientResult rep;
  rep.min_value = mesh::min_value(u);
  if (rep.min_value < -1e-9 * (1.0 + mesh::max_abs(u))) {
    rep.status = Status::Skip;  // not a nonnegative solution
    return rep;
  }

  rep.sup_inner = mesh::max_in(u, z0, R);
  rep.inf_inner = mesh::min_in(u, z0, R);
  rep.forcing_term =
      std::pow(R, p / (p - 1.0)) * std::pow(f_sup, 1.0 / (p - 1.0));
  const double denom = rep.inf_inner + rep.forcing_term;
  rep.c_emp = denom > 0.0 ? rep.sup_inner / denom
                          : (rep.sup_inner == 0.0
                                 ? 1.0
                                 : std::numeric_limits<double>::infinity());

  // sliding-profile diagnostic: the largest tau with
  // tau (4/3 - d/R)^{-alpha} <= u throughout B_{4R/3}
  const double alpha_d =
      4.0 * std::log2(geom::doubling_constant(model, 3.0 * R)) / eps_diag;
  double tau = std::numeric_limits<double>::infinity();
  for (int id = 0; id < grid.count(); ++id) {
    const double d = geom::distance(model, grid.node(id).pos, z0);
    const double gap = 4.0 / 3.0 - d / R;
    if (gap <= 1e-9) continue;
    tau = std::min(tau, u[id] * std::pow(gap, alpha_d));
  }
  rep.tau_touch = tau;
  rep.status = Status::Pass;
  return rep;
}

double TrigPoly::operator()(double theta) const {
  double s = c0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += a[k] * std::cos((k + 1) * theta) + b[k] * std::sin((k + 1) * theta);
  }
  return s;
}

TrigPoly random_positive_trig(std::uint64_t seed, int modes, double cond) {
  if (modes < 1) throw std::invalid_argument("trig: need modes >= 1");
  cond = std::max(cond, 1.0 + 1e-6);
  std::mt19937_64 rng(seed);
  TrigPoly g;
  g.a.resize(modes);
  g.b.resize(modes);
  for (int k = 0; k < modes; ++k) {
    g.a[k] = (2.0 * u01(rng) - 1.0) / (k + 1);
    g.b[k] = (2.0 * u01(rng) - 1.0) / (k + 1);
  }
  g.c0 = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  constexpr int kGrid = 4096;
  for (int i = 0; i < kGrid; ++i) {
    const double val = g(2.0 * M_PI * i / kGrid);
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  // c0 placing sup/inf at the requested condition number, nudged upward so
  // the minimum between grid points stays positive
  g.c0 = (hi - cond * lo) / (cond - 1.0) + 1e-6 * (hi - lo);
  return g;
}

OscillationReport hoelder_decay(const mesh::ScalarField& u, double R,
                                const Vec& z0) {
  if (u.mesh == nullptr)
    throw std::invalid_argument("harnack: field has no mesh");
  const mesh::BallMesh& grid = *u.mesh;

  OscillationReport rep;
  for (int k = 0; k <= 5; ++k) {
    const double rad = R / (1 << k);
    const std::vector<int> ids = grid.nodes_within(z0, rad);
    if (ids.size() < 5) break;  // scale no longer resolved
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int id : ids) {
      lo = std::min(lo, u[id]);
      hi = std::max(hi, u[id]);
    }
    rep.radii.push_back(rad);
    rep.osc.push_back(hi - lo);
  }
  if (rep.osc.size() < 3) {
    rep.status = Status::Inconclusive;
    return rep;
  }

  bool monotone = true;
  for (std::size_t k = 0; k + 1 < rep.osc.size(); ++k)
    if (rep.osc[k + 1] >
        rep.osc[k] * (1.0 + 1e-12) + 1e-15 * (1.0 + rep.osc[0]))
      monotone = false;

  const double tiny = 1e-13 * (1.0 + mesh::max_abs(u));
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < rep.osc.size(); ++k)
    if (rep.osc[k] > tiny) {
      lx.push_back(std::log(rep.radii[k]));
      ly.push_back(std::log(rep.osc[k]));
    }
  rep.alpha_fit = lx.size() >= 2 ? fit_slope(lx, ly)
                                 : std::numeric_limits<double>::infinity();
  rep.status =
      monotone && rep.alpha_fit > 0.0 ? Status::Pass : Status::Fail;
  return rep;
}

}  // namespace hlab::harnack
