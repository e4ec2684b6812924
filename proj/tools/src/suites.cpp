#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "hlab/abp.hpp"
#include "hlab/harnack.hpp"
#include "hlab/mesh.hpp"
#include "hlab/parallel.hpp"
#include "hlab/solver.hpp"
#include "runner.hpp"

namespace hlab::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ops::EllipticParams plain_params(double p) {
  ops::EllipticParams prm;
  prm.p = p;
  return prm;
}

// the profile whose p-contact set fills the vertex ball exactly (vertex map
// 2x on the flat model)
mesh::ScalarField sharp_profile(const mesh::BallMesh& grid, double p) {
  const geom::Model& m = grid.model();
  const double q = p / (p - 1.0);
  const double coeff = (p - 1.0) / p;
  return mesh::sample(
      grid,
      [&](const Vec& x) {
        return coeff * std::pow(geom::distance(m, m.base(), x), q);
      },
      "sharp");
}

const char* profile_name(solver::Profile pr) {
  switch (pr) {
    case solver::Profile::RadialShell:
      return "shell";
    case solver::Profile::SolvedWell:
      return "well";
    default:
      return "perturbed";
  }
}

solver::Profile cycle_profile(int k) {
  switch (k % 3) {
    case 0:
      return solver::Profile::RadialShell;
    case 1:
      return solver::Profile::SolvedWell;
    default:
      return solver::Profile::PerturbedRadial;
  }
}

std::string abp_note(const abp::AbpReport& rep) {
  return fmt::format("variant={};vertices={};escaped={}",
                     abp::variant_name(rep.variant), rep.vertices,
                     rep.escaped);
}

// solve with f = 0 and the given boundary trace; empty on solver failure
std::optional<mesh::ScalarField> solve_homogeneous(
    const mesh::BallMesh& grid, const ops::EllipticParams& prm,
    const std::function<double(const Vec&)>& boundary) {
  try {
    return solver::solve_dirichlet(grid, prm, mesh::make_field(grid, "f"),
                                   boundary);
  } catch (const solver::SolveFailure&) {
    return std::nullopt;
  }
}

}  // namespace

// --- abp-verify -----------------------------------------------------------------

std::vector<rep::Row> suite_abp(const RunContext& ctx) {
  std::vector<rep::Row> rows;
  const int n = ctx.config.get_int("model.n", 2);
  const auto ps = p_list(ctx);

  {  // sharp Euclidean case: vertex ball measure over contact integral -> 1
    const geom::Model m = geom::make_model(n, 0.0);
    const int n_r = ctx.config.get_int("abp.sharp_n_r", 128);
    const int n_theta = ctx.config.get_int("abp.sharp_n_theta", 4 * n_r);
    const double e_radius = ctx.config.get_double("abp.sharp_e_radius", 0.5);
    const auto grid = mesh::BallMesh::build(m, 1.0, n_r, n_theta);

    for (double p : ps) {
      const auto u = sharp_profile(grid, p);
      const auto prm = plain_params(p);
      // the cone saturates the degenerate-form integrand (= the area formula,
      // brace 2^n) for every p; the singular-variant bound is not sharp
      const auto rep =
          abp::abp_check(u, m.base(), e_radius, {m.base(), grid.radius()},
                         abp::Variant::Degenerate, prm, ctx.jobs);
      rows.push_back(row_near(fmt::format("abp-sharp"),
                              fmt::format("p={};curv=0;n_r={}", p, n_r),
                              rep.ratio, 1.0, 0.05, abp_note(rep)));
      if (p == 2.0) {  // field snapshot, the mesh serialization interface
        std::ofstream snap(ctx.out_dir / "abp_sharp_field_p2.csv",
                           std::ios::binary);
        mesh::write_csv(u, snap);
      }
    }
  }

  {  // randomized supersolution suite: the inequality must never fail
    const int n_r = ctx.config.get_int("abp.n_r", 64);
    const int n_theta = ctx.config.get_int("abp.n_theta", 4 * n_r);
    const double e_radius = ctx.config.get_double("abp.e_radius", 0.3);
    const int instances = ctx.config.get_int("abp.instances", 30);

    for (double curv : curvature_list(ctx)) {
      const geom::Model m = geom::make_model(n, curv);
      const auto grid = mesh::BallMesh::build(m, 1.0, n_r, n_theta);
      for (double p : ps) {
        const auto prm = plain_params(p);
        std::vector<rep::Row> slot(instances);
        parallel_for(instances, ctx.jobs, [&](int k) {
          const auto profile = cycle_profile(k);
          const std::string where =
              fmt::format("p={};curv={};k={};profile={}", p, curv, k,
                          profile_name(profile));
          try {
            const auto inst = solver::make_instance(
                grid, prm, profile,
                static_cast<unsigned>(mix_seed(ctx.seed, 1000 + k) % 100000));
            const auto rep =
                abp::abp_check(inst.u, m.base(), e_radius,
                               {m.base(), grid.radius()}, abp::variant_for(prm),
                               prm, 1);
            rep::Row row =
                row_leq("abp-suite", where, rep.ratio, 1.0 + rep.tol, abp_note(rep));
            row.status = rep.status;  // inconclusive when every contact escapes
            slot[k] = std::move(row);
          } catch (const solver::SolveFailure&) {
            slot[k] = row_status("abp-suite", where, kNaN, 0.0,
                                 Status::Inconclusive, "solver stalled");
          }
        });
        rows.insert(rows.end(), slot.begin(), slot.end());

        // two instances against the Pucci-forcing variants
        for (int k = 0; k < 2; ++k) {
          ops::EllipticParams nl = prm;
          nl.lambda = 0.8;
          nl.Lambda = 1.25;
          const auto profile = k == 0 ? solver::Profile::RadialShell
                                      : solver::Profile::PerturbedRadial;
          const auto inst = solver::make_instance(
              grid, nl, profile,
              static_cast<unsigned>(mix_seed(ctx.seed, 2000 + k) % 100000));
          const auto rep =
              abp::abp_check(inst.u, m.base(), e_radius,
                             {m.base(), grid.radius()}, abp::variant_for(nl),
                             nl, ctx.jobs);
          rep::Row row = row_leq(
              "abp-suite-nonlinear",
              fmt::format("p={};curv={};k={};profile={}", p, curv, k,
                          profile_name(profile)),
              rep.ratio, 1.0 + rep.tol, abp_note(rep));
          row.status = rep.status;
          rows.push_back(std::move(row));  // analytic profiles: no solve here
        }
      }
    }
  }

  return rows;
}

// --- measure-estimate -------------------------------------------------------------

std::vector<rep::Row> suite_measure(const RunContext& ctx) {
  std::vector<rep::Row> rows;

  // threshold constants (p-1)/p 3^{p/(p-1)} against hand-derived values
  rows.push_back(row_near("measure-mtilde", "p=1.5", abp::mtilde(1.5), 9.0,
                          1e-12));
  rows.push_back(
      row_near("measure-mtilde", "p=2", abp::mtilde(2.0), 4.5, 1e-12));
  rows.push_back(row_near("measure-mtilde", "p=3", abp::mtilde(3.0),
                          3.4641016151377544, 1e-12));

  const int n = ctx.config.get_int("model.n", 2);
  const int n_r = ctx.config.get_int("measure.n_r", 64);
  const int n_theta = ctx.config.get_int("measure.n_theta", 4 * n_r);
  const double r = ctx.config.get_double("measure.r", 0.2);
  const int instances = ctx.config.get_int("measure.instances", 6);

  // solved well with a decisive center dip: constant forcing beats the
  // boundary oscillation, so the global minimum sits inside B_r and the
  // positivity/smallness hypotheses survive the normalizing shift
  auto dipped_well =
      [&](const mesh::BallMesh& grid, const ops::EllipticParams& prm,
          std::uint64_t seed) -> std::optional<mesh::ScalarField> {
    const geom::Model& m = grid.model();
    std::mt19937_64 rng(seed);
    const double c = 1.5 + 0.5 * u01(rng);
    const double b0 = 0.5 + 0.5 * u01(rng);
    const double mod = 0.15 * u01(rng);
    const double ph = 6.28 * u01(rng);
    auto f = mesh::make_field(grid, "f");
    for (double& v : f.values) v = c;
    try {
      mesh::ScalarField u =
          solver::solve_dirichlet(grid, prm, f, [&](const Vec& x) {
            const auto pc = geom::chart_of(m, x);
            return b0 * (1.0 + mod * std::cos(pc.theta + ph));
          });
      const double shift =
          0.9 * (prm.p - 1.0) / prm.p - mesh::min_in(u, m.base(), r);
      for (double& v : u.values) v += shift;
      return u;
    } catch (const solver::SolveFailure&) {
      return std::nullopt;
    }
  };

  auto density_row = [&](const mesh::BallMesh& grid,
                         const ops::EllipticParams& prm, std::uint64_t seed,
                         const std::string& tag,
                         const std::string& par) -> rep::Row {
    const auto u = dipped_well(grid, prm, seed);
    if (!u)
      return row_status(tag, par, kNaN, 0.0, Status::Inconclusive,
                        "solver stalled");
    const auto rep = abp::measure_estimate_check(*u, r, grid.model().base(),
                                                 abp::variant_for(prm), prm);
    rep::Row row = row_geq(
        tag, par, rep.fraction, rep.delta,
        fmt::format("worst_forcing={:.3g};min_outside={:.3g};inf_inner={:.4g}",
                    rep.worst_forcing, rep.min_outside, rep.inf_inner));
    row.status = rep.status;  // Skip when a hypothesis audit fails
    if (rep.status == Status::Skip) row.margin = kNaN;
    return row;
  };

  for (double curv : curvature_list(ctx)) {
    const geom::Model m = geom::make_model(n, curv);
    const auto grid = mesh::BallMesh::build(m, 1.0, n_r, n_theta);
    for (double p : p_list(ctx)) {
      const auto prm = plain_params(p);
      std::vector<rep::Row> slot(instances);
      parallel_for(instances, ctx.jobs, [&](int k) {
        slot[k] = density_row(grid, prm, mix_seed(ctx.seed, 3000 + k),
                              "measure-density",
                              fmt::format("p={};curv={};k={}", p, curv, k));
      });
      rows.insert(rows.end(), slot.begin(), slot.end());

      // the critical-density alternative on one instance at theta = 1
      if (const auto u = dipped_well(grid, prm, mix_seed(ctx.seed, 3600))) {
        const auto dr = harnack::critical_density_check(*u, r, m.base(), 1.0,
                                                        prm);
        rep::Row row = row_status(
            "critical-density", fmt::format("p={};curv={}", p, curv),
            dr.fraction, 1.0 - dr.delta, dr.status,
            fmt::format("mtilde={:.4g};delta={:.4g};min_inner={:.4g}",
                        dr.mtilde, dr.delta, dr.min_inner));
        rows.push_back(std::move(row));
      }
    }

    ops::EllipticParams nl = plain_params(2.0);
    nl.lambda = 0.8;
    nl.Lambda = 1.25;
    nl.beta = 0.5;
    rows.push_back(density_row(grid, nl, mix_seed(ctx.seed, 3500),
                               "measure-density-nonlinear",
                               fmt::format("p=2;curv={}", curv)));
  }

  return rows;
}

// --- level-decay ------------------------------------------------------------------

namespace {

// deterministic positive boundary spike: levels 2^1..2^5 all populated
double spike_boundary(double theta, double center) {
  double d = std::remainder(theta - center, 2.0 * 3.14159265358979323846);
  const double w = 0.35;
  return 0.25 + 38.0 * std::exp(-(d / w) * (d / w));
}

struct DecayCase {
  std::string label;
  harnack::DecayReport report;
};

}  // namespace

std::vector<rep::Row> suite_decay(const RunContext& ctx) {
  std::vector<rep::Row> rows;
  std::vector<DecayCase> curves;
  const int n = ctx.config.get_int("model.n", 2);
  const double base = ctx.config.get_double("levels.base", 2.0);
  const double delta_min = ctx.config.get_double("levels.delta_min", 0.02);

  {  // analytic power profile: per-level measure ratio base^{-2} exactly
    const geom::Model m = geom::make_model(n, 0.0);
    const int n_r = 128;
    const auto grid = mesh::BallMesh::build(m, 1.0, n_r, 4 * n_r);
    const double h = grid.h_r();
    const double D = 96.5 * h;  // level radii fall between mesh rings
    const auto u = mesh::sample(
        grid,
        [&](const Vec& x) {
          const double d = geom::distance(m, m.base(), x);
          return D / std::max(d, 0.25 * h);
        },
        "power");
    const auto prm = plain_params(2.0);
    const auto dec = harnack::level_decay(u, grid.radius(), m.base(), prm,
                                          base, delta_min);
    curves.push_back({"analytic-flat", dec});

    const double expect = 1.0 / (base * base);
    for (int k = 0; k + 1 < static_cast<int>(dec.measures.size()) && k < 3;
         ++k) {
      if (dec.measures[k] <= 0.0) break;
      rows.push_back(row_near(
          "decay-analytic-ratio", fmt::format("k={};base={}", k + 1, base),
          dec.measures[k + 1] / dec.measures[k], expect, 0.1 * expect));
    }
    rows.push_back(row_near("decay-analytic-exponent", "base=2", dec.eps_fit,
                            2.0, 0.2));

    // threshold scaling: multiplying u by base^2 shifts the ladder two slots
    auto u4 = u;
    for (double& v : u4.values) v *= base * base;
    const auto dec4 = harnack::level_decay(u4, grid.radius(), m.base(), prm,
                                           base, delta_min);
    double worst = 0.0;
    for (std::size_t k = 0; k + 2 < dec4.measures.size(); ++k) {
      if (k < dec.measures.size())
        worst = std::max(worst, std::abs(dec4.measures[k + 2] -
                                         dec.measures[k]));
    }
    rows.push_back(row_leq("decay-scaling-exact", "s=base^2", worst, 0.0));
  }

  {  // audited instances: homogeneous solutions with a boundary spike
    const int n_r = ctx.config.get_int("levels.n_r", 96);
    const int n_theta = ctx.config.get_int("levels.n_theta", 3 * n_r);
    const auto ps = p_list(ctx);
    const auto curvs = curvature_list(ctx);

    struct Item {
      double p, curv;
    };
    std::vector<Item> items;
    for (double curv : curvs)
      for (double p : ps) items.push_back({p, curv});

    std::vector<rep::Row> slot(items.size());
    std::vector<DecayCase> curve_slot(items.size());
    std::vector<std::optional<mesh::ScalarField>> fields(items.size());
    std::vector<const mesh::BallMesh*> grids(items.size());

    std::vector<mesh::BallMesh> meshes;
    meshes.reserve(curvs.size());
    for (double curv : curvs)
      meshes.push_back(
          mesh::BallMesh::build(geom::make_model(n, curv), 1.0, n_r, n_theta));

    parallel_for(static_cast<int>(items.size()), ctx.jobs, [&](int i) {
      const auto [p, curv] = items[i];
      std::size_t ci = 0;
      while (curvs[ci] != curv) ++ci;
      const mesh::BallMesh& grid = meshes[ci];
      grids[i] = &grid;
      const geom::Model& m = grid.model();
      const auto prm = plain_params(p);
      const double center = 1.3 + 0.2 * static_cast<double>(i);
      auto u = solve_homogeneous(grid, prm, [&](const Vec& x) {
        return spike_boundary(geom::chart_of(m, x).theta, center);
      });
      const std::string par = fmt::format("p={};curv={}", p, curv);
      if (!u) {
        slot[i] = row_status("decay-audited", par, kNaN, 1.0 - delta_min,
                             Status::Inconclusive, "solver stalled");
        return;
      }
      fields[i] = u;
      const auto dec = harnack::level_decay(*u, grid.radius(), m.base(), prm,
                                            base, delta_min);
      rep::Row row =
          row_leq("decay-audited", par, dec.max_ratio, 1.0 - delta_min,
                  fmt::format("audited={};nonempty={};eps_fit={:.3g}",
                              dec.audited, dec.nonempty, dec.eps_fit));
      row.status = dec.status;
      if (dec.status != Status::Pass && dec.status != Status::Fail)
        row.margin = kNaN;
      slot[i] = std::move(row);
      curve_slot[i] = {fmt::format("audited-p{}-curv{}", p, curv), dec};
    });
    rows.insert(rows.end(), slot.begin(), slot.end());
    for (auto& c : curve_slot)
      if (!c.report.thresholds.empty()) curves.push_back(std::move(c));

    // covering dichotomy between two consecutive super-level sets
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].p != 2.0 || !fields[i]) continue;
      const mesh::BallMesh& grid = *grids[i];
      const mesh::ScalarField& u = *fields[i];
      auto e_ind = mesh::make_field(grid, "E");
      auto f_ind = mesh::make_field(grid, "F");
      for (int id = 0; id < grid.count(); ++id) {
        e_ind[id] = u[id] > base * base ? 1.0 : 0.0;
        f_ind[id] = u[id] > base ? 1.0 : 0.0;
      }
      const double delta = ctx.config.get_double("levels.dichotomy_delta", 0.5);
      const auto rep = harnack::ball_dichotomy_check(
          e_ind, f_ind, grid.radius(), grid.model().base(), delta,
          ctx.config.get_int("levels.center_budget", 200));
      rep::Row row = row_status(
          "decay-dichotomy", fmt::format("p=2;curv={}", items[i].curv), rep.c0,
          0.0, rep.status,
          fmt::format("balls={};dense={};measE={:.4g};measF={:.4g}",
                      rep.balls_sampled, rep.dense_balls, rep.measure_e,
                      rep.measure_f));
      rows.push_back(std::move(row));
    }
  }

  {  // plot-ready decay curves (threshold, measure)
    rep::CsvWriter curve({"case", "k", "threshold", "measure"});
    for (const auto& c : curves)
      for (std::size_t k = 0; k < c.report.thresholds.size(); ++k)
        curve.add({c.label, std::to_string(k + 1),
                   rep::format_double(c.report.thresholds[k]),
                   rep::format_double(c.report.measures[k])});
    curve.write(ctx.out_dir / "decay_curve.csv");
  }

  return rows;
}

// --- harnack-sweep ----------------------------------------------------------------

std::vector<rep::Row> suite_harnack(const RunContext& ctx) {
  std::vector<rep::Row> rows;
  const int n = ctx.config.get_int("model.n", 2);
  const double R = ctx.config.get_double("harnack.R", 1.0);
  const int n_r = ctx.config.get_int("harnack.n_r", 128);
  const int n_refined = ctx.config.get_int("harnack.n_r_refined", 2 * n_r);

  auto build = [&](double curv, int rings) {
    return mesh::BallMesh::build(geom::make_model(n, curv), 2.0 * R, rings,
                                 2 * rings);
  };

  {  // explicit p = 2 case: harmonic 2 + x on B_2, quotient 3 on B_1
    const auto grid = build(0.0, n_r);
    const geom::Model& m = grid.model();
    const auto prm = plain_params(2.0);
    auto u = solve_homogeneous(grid, prm,
                               [](const Vec& x) { return 2.0 + x[1]; });
    if (u) {
      const auto q = harnack::harnack_quotient(*u, R, m.base(), prm, 0.0);
      rows.push_back(row_near("harnack-explicit", "p=2;curv=0", q.c_emp, 3.0,
                              0.06,
                              fmt::format("sup={:.6g};inf={:.6g};tau={:.3g}",
                                          q.sup_inner, q.inf_inner,
                                          q.tau_touch)));
    } else {
      rows.push_back(row_status("harnack-explicit", "p=2;curv=0", kNaN, 0.06,
                                Status::Inconclusive, "solver stalled"));
    }
  }

  {  // explicit p = 3 case: radial p-harmonic 2 - sqrt(d), quotient exactly 2
    const auto grid = build(0.0, n_r);
    const geom::Model& m = grid.model();
    const auto u = mesh::sample(
        grid,
        [&](const Vec& x) {
          return 2.0 - std::sqrt(geom::distance(m, m.base(), x));
        },
        "radial");
    const auto q =
        harnack::harnack_quotient(u, R, m.base(), plain_params(3.0), 0.0);
    rows.push_back(row_near("harnack-explicit", "p=3;curv=0", q.c_emp, 2.0,
                            0.04,
                            fmt::format("sup={:.6g};inf={:.6g};tau={:.3g}",
                                        q.sup_inner, q.inf_inner,
                                        q.tau_touch)));
  }

  {  // random positive-boundary sweep with one refinement step
    const int modes = ctx.config.get_int("harnack.modes", 4);
    const double cond = ctx.config.get_double("harnack.cond", 1000.0);
    const int seeds = ctx.config.get_int("harnack.seeds", 2);

    struct Item {
      double p, curv;
      int seed_idx;
    };
    std::vector<Item> items;
    for (double curv : curvature_list(ctx))
      for (double p : p_list(ctx))
        for (int s = 0; s < seeds; ++s) items.push_back({p, curv, s});

    std::vector<std::array<rep::Row, 2>> slot(items.size());
    parallel_for(static_cast<int>(items.size()), ctx.jobs, [&](int i) {
      const auto [p, curv, sidx] = items[i];
      const auto prm = plain_params(p);
      const auto g = harnack::random_positive_trig(
          mix_seed(ctx.seed, 4000 + i), modes, cond);
      const std::string par =
          fmt::format("p={};curv={};seed={}", p, curv, sidx);

      double c_coarse = kNaN, c_fine = kNaN, tau = kNaN;
      Status st = Status::Inconclusive;
      std::string note = "solver stalled";
      const auto coarse = build(curv, n_r);
      auto bd = [&g](const geom::Model& mm) {
        return [&g, &mm](const Vec& x) {
          return g(geom::chart_of(mm, x).theta);
        };
      };
      if (auto u = solve_homogeneous(coarse, prm, bd(coarse.model()))) {
        const auto q =
            harnack::harnack_quotient(*u, R, coarse.model().base(), prm, 0.0);
        c_coarse = q.c_emp;
        tau = q.tau_touch;
        st = q.status;
        const auto fine = build(curv, n_refined);
        if (auto uf = solve_homogeneous(fine, prm, bd(fine.model()))) {
          const auto qf = harnack::harnack_quotient(
              *uf, R, fine.model().base(), prm, 0.0);
          c_fine = qf.c_emp;
          note = fmt::format("c_fine={:.6g};tau={:.3g};cond={}", c_fine, tau,
                             cond);
        }
      }

      rep::Row quot = row_status("harnack-cemp", par, c_coarse, 0.0, st,
                                 fmt::format("tau={:.3g}", tau));
      rep::Row drift =
          std::isfinite(c_coarse) && std::isfinite(c_fine)
              ? row_leq("harnack-refine", par,
                        std::abs(c_coarse / c_fine - 1.0), 0.05, note)
              : row_status("harnack-refine", par, kNaN, 0.05,
                           Status::Inconclusive, note);
      slot[i] = {std::move(quot), std::move(drift)};
    });
    for (auto& pair : slot) {
      rows.push_back(std::move(pair[0]));
      rows.push_back(std::move(pair[1]));
    }
  }

  {  // exact scaling identities of the quotient: (su, s^{p-1} f) -> same C
    const auto grid = build(0.0, 64);
    const geom::Model& m = grid.model();

    auto scaled_pair = [&](const mesh::ScalarField& u, double p, double f_sup,
                           double s) {
      const auto prm = plain_params(p);
      const auto q0 = harnack::harnack_quotient(u, R, m.base(), prm, f_sup);
      auto su = u;
      for (double& v : su.values) v *= s;
      const double sf = std::pow(s, p - 1.0) * f_sup;
      const auto q1 = harnack::harnack_quotient(su, R, m.base(), prm, sf);
      return std::abs(q1.c_emp - q0.c_emp);
    };

    {  // p = 2: solved field with unit forcing
      const auto prm = plain_params(2.0);
      auto f = mesh::make_field(grid, "f");
      for (double& v : f.values) v = 1.0;
      try {
        const auto u = solver::solve_dirichlet(
            grid, prm, f, [](const Vec& x) { return 2.0 + x[1]; });
        rows.push_back(row_leq("harnack-scaling-exact", "p=2;s=2",
                               scaled_pair(u, 2.0, 1.0, 2.0), 0.0));
      } catch (const solver::SolveFailure&) {
        rows.push_back(row_status("harnack-scaling-exact", "p=2;s=2", kNaN,
                                  0.0, Status::Inconclusive,
                                  "solver stalled"));
      }
    }
    {  // p = 3: analytic radial profile, nominal forcing bound
      const auto u = mesh::sample(
          grid,
          [&](const Vec& x) {
            return 2.0 - std::sqrt(geom::distance(m, m.base(), x));
          },
          "radial");
      rows.push_back(row_leq("harnack-scaling-exact", "p=3;s=2",
                             scaled_pair(u, 3.0, 0.5, 2.0), 0.0));
    }
    {  // p = 3/2: shell instance, s = 4 so that s^{p-1} is exact
      const auto inst = solver::make_instance(
          grid, plain_params(1.5), solver::Profile::RadialShell,
          static_cast<unsigned>(mix_seed(ctx.seed, 4500) % 100000));
      auto u = inst.u;
      for (double& v : u.values) v += 0.25;  // strictly positive quotient
      rows.push_back(row_leq("harnack-scaling-exact", "p=1.5;s=4",
                             scaled_pair(u, 1.5, 0.7, 4.0), 0.0));
    }
  }

  return rows;
}

// --- hoelder ----------------------------------------------------------------------

std::vector<rep::Row> suite_hoelder(const RunContext& ctx) {
  std::vector<rep::Row> rows;
  const int n = ctx.config.get_int("model.n", 2);
  const double R = ctx.config.get_double("harnack.R", 1.0);
  const int n_r = ctx.config.get_int("hoelder.n_r", 128);
  const int modes = ctx.config.get_int("hoelder.modes", 6);
  const double cond = ctx.config.get_double("hoelder.cond", 40.0);

  struct Curve {
    std::string label;
    harnack::OscillationReport rep;
  };
  std::vector<Curve> curves;

  auto build = [&](double curv, int rings) {
    return mesh::BallMesh::build(geom::make_model(n, curv), 2.0 * R, rings,
                                 2 * rings);
  };

  {  // Lipschitz field: exponent 1
    const auto grid = build(0.0, n_r);
    const geom::Model& m = grid.model();
    const auto u = mesh::sample(
        grid, [](const Vec& x) { return 2.0 + x[1]; }, "linear");
    const auto rep = harnack::hoelder_decay(u, R, m.base());
    rows.push_back(
        row_near("hoelder-linear", "p=2;curv=0", rep.alpha_fit, 1.0, 0.1));
    curves.push_back({"linear-flat", rep});
  }
  {  // constant field: infinite-exponent flag
    const auto grid = build(0.0, 32);
    auto u = mesh::make_field(grid, "const");
    for (double& v : u.values) v = 3.0;
    const auto rep = harnack::hoelder_decay(u, R, grid.model().base());
    const bool flagged = std::isinf(rep.alpha_fit) && rep.status == Status::Pass;
    rows.push_back(row_status("hoelder-const", "n/a", rep.alpha_fit, 0.0,
                              flagged ? Status::Pass : Status::Fail,
                              "oscillation identically zero"));
  }

  struct Item {
    double p, curv;
  };
  std::vector<Item> items;
  for (double curv : curvature_list(ctx))
    for (double p : p_list(ctx)) items.push_back({p, curv});

  std::vector<std::vector<rep::Row>> slot(items.size());
  std::vector<Curve> curve_slot(items.size());
  parallel_for(static_cast<int>(items.size()), ctx.jobs, [&](int i) {
    const auto [p, curv] = items[i];
    const auto prm = plain_params(p);
    const auto g =
        harnack::random_positive_trig(mix_seed(ctx.seed, 5000 + i), modes,
                                      cond);
    const std::string par = fmt::format("p={};curv={}", p, curv);
    const auto grid = build(curv, n_r);
    const geom::Model& m = grid.model();
    auto u = solve_homogeneous(grid, prm, [&](const Vec& x) {
      return g(geom::chart_of(m, x).theta);
    });
    if (!u) {
      slot[i].push_back(row_status("hoelder-alpha", par, kNaN, 0.0,
                                   Status::Inconclusive, "solver stalled"));
      return;
    }
    const auto rep = harnack::hoelder_decay(*u, R, m.base());
    rep::Row row = row_geq("hoelder-alpha", par, rep.alpha_fit, 0.0,
                           fmt::format("scales={}", rep.osc.size()));
    row.status = rep.status;
    slot[i].push_back(std::move(row));
    curve_slot[i] = {fmt::format("p{}-curv{}", p, curv), rep};

    if (p == 3.0) {  // refinement stability of the fitted exponent
      const auto fine = build(curv, 2 * n_r);
      const geom::Model& mf = fine.model();
      if (auto uf = solve_homogeneous(fine, prm, [&](const Vec& x) {
            return g(geom::chart_of(mf, x).theta);
          })) {
        const auto repf = harnack::hoelder_decay(*uf, R, mf.base());
        slot[i].push_back(row_leq("hoelder-refine", par,
                                  std::abs(rep.alpha_fit - repf.alpha_fit),
                                  0.1));
      } else {
        slot[i].push_back(row_status("hoelder-refine", par, kNaN, 0.1,
                                     Status::Inconclusive, "solver stalled"));
      }
    }
  });
  for (auto& group : slot)
    for (auto& row : group) rows.push_back(std::move(row));
  for (auto& c : curve_slot)
    if (!c.rep.radii.empty()) curves.push_back(std::move(c));

  {  // plot-ready oscillation curves (k, osc)
    rep::CsvWriter curve({"case", "k", "radius", "osc"});
    for (const auto& c : curves)
      for (std::size_t k = 0; k < c.rep.radii.size(); ++k)
        curve.add({c.label, std::to_string(k),
                   rep::format_double(c.rep.radii[k]),
                   rep::format_double(c.rep.osc[k])});
    curve.write(ctx.out_dir / "hoelder_curve.csv");
  }

  return rows;
}

}  // namespace hlab::cli
