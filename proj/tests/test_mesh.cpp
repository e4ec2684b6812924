#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hlab/geometry.hpp"
#include "hlab/mesh.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

const geom::Model kFlat2 = geom::make_model(2, 0.0);
const geom::Model kHyp2 = geom::make_model(2, -1.0);
const geom::Model kSph2 = geom::make_model(2, 1.0);

mesh::ScalarField chart_sample(const mesh::BallMesh& m,
                               const std::function<double(double, double)>& f) {
  auto u = mesh::make_field(m);
  for (int id = 0; id < m.count(); ++id) {
    const auto& nd = m.node(id);
    u[id] = f(nd.r, nd.theta);
  }
  return u;
}

}  // namespace

TEST_CASE("quadrature weights sum to the exact ball volume") {
  struct Case {
    const geom::Model* m;
    double closed;  // hand value of Vol(B_1)
  } cases[] = {
      {&kFlat2, kPi},
      {&kHyp2, 2.0 * kPi * (std::cosh(1.0) - 1.0)},
      {&kSph2, 2.0 * kPi * (1.0 - std::cos(1.0))},
  };
  for (const auto& c : cases) {
    const auto grid = mesh::BallMesh::build(*c.m, 1.0, 32, 128);
    CHECK(grid.total_measure() == doctest::Approx(c.closed).epsilon(1e-12));
    CHECK(grid.total_measure() ==
          doctest::Approx(oracle::ball_volume_ref(2, c.m->curvature, 1.0))
              .epsilon(1e-9));
    double acc = 0.0;
    for (int id = 0; id < grid.count(); ++id) {
      CHECK(grid.node(id).weight > 0.0);
      acc += grid.node(id).weight;
    }
    CHECK(acc == doctest::Approx(grid.total_measure()).epsilon(1e-12));
  }
}

TEST_CASE("volumetric mesh (n = 3) reproduces the shell-integral volume") {
  for (double curv : {0.0, -1.0, 1.0}) {
    const geom::Model m = geom::make_model(3, curv);
    const auto grid = mesh::BallMesh::build(m, 0.8, 8, 8, 16);
    CHECK(grid.total_measure() ==
          doctest::Approx(oracle::ball_volume_ref(3, curv, 0.8)).epsilon(1e-9));
    // cell-centered polar angle: nothing may sit on the chart axis
    for (int id = 1; id < grid.count(); ++id) {
      const auto& nd = grid.node(id);
      CHECK(std::sin(nd.theta) > 1e-3);
    }
  }
}

TEST_CASE("node layout, ids and boundary mask") {
  const auto grid = mesh::BallMesh::build(kHyp2, 1.0, 16, 48);
  CHECK(grid.count() == 1 + 16 * 48);
  CHECK(grid.node(0).r == 0.0);
  CHECK(mesh::BallMesh::pole() == 0);
  CHECK(grid.h_r() == doctest::Approx(1.0 / 16));
  CHECK(grid.h_theta() == doctest::Approx(2.0 * kPi / 48));

  int boundary_count = 0;
  for (int id = 0; id < grid.count(); ++id) {
    const auto& nd = grid.node(id);
    if (id > 0) {
      CHECK(grid.id_of(nd.i, nd.j) == id);
      CHECK(nd.r == doctest::Approx(nd.i * grid.h_r()));
    }
    const double d = geom::distance(kHyp2, kHyp2.base(), nd.pos);
    CHECK(d <= 1.0 + 1e-12);
    CHECK(grid.boundary(id) == (nd.i == 16));
    boundary_count += grid.boundary(id) ? 1 : 0;
    if (grid.boundary(id)) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(boundary_count == 48);

  CHECK(grid.wrap_j(-1) == 47);
  CHECK(grid.wrap_j(48) == 0);
  CHECK(grid.id_of(3, 5) == grid.id_of(3, 5 + 48 * 2 - 48 * 2));
}

TEST_CASE("build rejects bad parameters") {
  CHECK_THROWS_AS(mesh::BallMesh::build(kSph2, 2.0, 16, 64),
                  std::domain_error);  // beyond the spherical radius cap
  CHECK_THROWS_AS(mesh::BallMesh::build(kFlat2, 1.0, 2, 64),
                  std::domain_error);
  CHECK_THROWS_AS(mesh::BallMesh::build(kFlat2, 1.0, 16, 7),
                  std::domain_error);
  CHECK_THROWS_AS(mesh::BallMesh::build(kFlat2, 1.0, 16, 64, 8),
                  std::domain_error);
}

TEST_CASE("stencils: exact on constants and radial linears, tight on flat linears") {
  const auto grid = mesh::BallMesh::build(kFlat2, 1.0, 24, 96);

  auto ones = mesh::make_field(grid);
  for (auto& v : ones.values) v = 7.5;
  auto ramp = chart_sample(grid, [](double r, double) { return 0.3 + 2.0 * r; });
  auto linear = mesh::sample(grid, [](const Vec& x) {
    return 2.0 * x[1] - 0.75 * x[2];
  });

  for (int id = 0; id < grid.count(); ++id) {
    if (!grid.stencil_ok(id)) continue;
    CHECK(mesh::gradient(ones, id).norm() == 0.0);
    CHECK(mesh::hessian(ones, id).norm() <= 1e-11);

    // linear in the radial chart variable: differentiated exactly
    const VecN gr = mesh::gradient(ramp, id).comps;
    CHECK(gr[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gr[1] == doctest::Approx(0.0).epsilon(1e-12));

    // linear in Cartesian coordinates is trigonometric in theta, so the
    // stencil sees it through its truncation error; frame components,
    // radial first
    const auto& nd = grid.node(id);
    if (nd.r < 0.2) continue;
    const VecN g = mesh::gradient(linear, id).comps;
    const double grad_r = 2.0 * std::cos(nd.theta) - 0.75 * std::sin(nd.theta);
    const double grad_t = -2.0 * std::sin(nd.theta) - 0.75 * std::cos(nd.theta);
    CHECK(g[0] == doctest::Approx(grad_r).epsilon(2e-3));
    CHECK(g[1] == doctest::Approx(grad_t).epsilon(2e-3));
    CHECK(mesh::hessian(linear, id).norm() <= 5e-3);
  }
}

TEST_CASE("stencil consistency is second order on a smooth field") {
  // flat model, u = exp(0.3 x) cos(0.4 y): all derivatives in closed form
  auto exact_grad = [](double x, double y) {
    return std::array<double, 2>{0.3 * std::exp(0.3 * x) * std::cos(0.4 * y),
                                 -0.4 * std::exp(0.3 * x) * std::sin(0.4 * y)};
  };
  auto exact_hess = [](double x, double y) {
    const double e = std::exp(0.3 * x);
    return std::array<double, 3>{0.09 * e * std::cos(0.4 * y),
                                 -0.12 * e * std::sin(0.4 * y),
                                 -0.16 * e * std::cos(0.4 * y)};
  };

  // the Hessian loses one order on the first rings (angular corrections carry
  // 1/r), so its ladder is measured away from the pole; the gradient is
  // second order everywhere
  double prev_g = 0.0, prev_h = 0.0, prev_h_pole = 0.0;
  for (int n_r : {16, 32, 64}) {
    const auto grid = mesh::BallMesh::build(kFlat2, 1.0, n_r, 4 * n_r);
    auto u = mesh::sample(grid, [](const Vec& q) {
      return std::exp(0.3 * q[1]) * std::cos(0.4 * q[2]);
    });
    double worst_g = 0.0, worst_h = 0.0, worst_h_pole = 0.0;
    for (int id = 0; id < grid.count(); ++id) {
      if (!grid.stencil_ok(id)) continue;
      const auto& nd = grid.node(id);
      const double x = nd.pos[1], y = nd.pos[2];
      const double ct = std::cos(nd.theta), st = std::sin(nd.theta);

      const auto [gx, gy] = exact_grad(x, y);
      const VecN g = mesh::gradient(u, id).comps;
      worst_g = std::max(worst_g, std::abs(g[0] - (gx * ct + gy * st)));
      worst_g = std::max(worst_g, std::abs(g[1] - (-gx * st + gy * ct)));

      const auto [hxx, hxy, hyy] = exact_hess(x, y);
      const MatN H = mesh::hessian(u, id);
      // rotate the Cartesian Hessian into the (radial, angular) frame
      const double hrr = ct * ct * hxx + 2 * ct * st * hxy + st * st * hyy;
      const double hrt = ct * (-st * hxx + ct * hxy) + st * (-st * hxy + ct * hyy);
      const double htt = st * st * hxx - 2 * ct * st * hxy + ct * ct * hyy;
      CHECK(H(0, 1) == doctest::Approx(H(1, 0)).epsilon(1e-12));
      const double err = std::max({std::abs(H(0, 0) - hrr),
                                   std::abs(H(0, 1) - hrt),
                                   std::abs(H(1, 1) - htt)});
      (nd.r >= 0.2 ? worst_h : worst_h_pole) =
          std::max(nd.r >= 0.2 ? worst_h : worst_h_pole, err);
    }
    if (prev_g > 0.0) {
      CHECK(worst_g < 0.35 * prev_g);  // ~4x drop per refinement
      CHECK(worst_h < 0.35 * prev_h);
      CHECK(worst_h_pole < 0.6 * prev_h_pole);  // first order near the pole
    }
    prev_g = worst_g;
    prev_h = worst_h;
    prev_h_pole = worst_h_pole;
  }
  CHECK(prev_g < 2e-4);
  CHECK(prev_h < 3e-4);
  CHECK(prev_h_pole < 2e-3);
}

TEST_CASE("Hessian of half squared distance matches the geometry closed form") {
  for (const auto* m : {&kHyp2, &kSph2}) {
    const auto grid = mesh::BallMesh::build(*m, 1.0, 48, 192);
    const Vec y = geom::exp_map(
        *m, {m->base(), (VecN(2) << 0.21, -0.36).finished()});
    auto u = mesh::sample(grid, [&](const Vec& x) {
      const double d = geom::distance(*m, x, y);
      return 0.5 * d * d;
    });
    double worst = 0.0;
    for (int id = 0; id < grid.count(); ++id) {
      if (!grid.stencil_ok(id)) continue;
      const auto& nd = grid.node(id);
      if (geom::distance(*m, nd.pos, y) < 0.1) continue;  // kink-free zone only
      const MatN closed = geom::hess_half_dist_sq(*m, nd.pos, y);
      worst = std::max(worst, (mesh::hessian(u, id) - closed).norm());
    }
    CHECK(worst < 6e-3);  // O(h^2) at h = 1/48 with curvature constants
  }
}

TEST_CASE("pole fit: exact on flat quadratics, second order on curved fields") {
  const auto grid = mesh::BallMesh::build(kFlat2, 1.0, 32, 128);
  auto quad = mesh::sample(grid, [](const Vec& q) {
    const double x = q[1], y = q[2];
    return 0.4 - 1.2 * x + 0.7 * y + 0.5 * (2.0 * x * x - x * y + 3.0 * y * y);
  });
  const auto fit = mesh::pole_fit(quad);
  CHECK(fit.grad[0] == doctest::Approx(-1.2).epsilon(1e-9));
  CHECK(fit.grad[1] == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(fit.hess(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.hess(0, 1) == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(fit.hess(1, 1) == doctest::Approx(3.0).epsilon(1e-8));

  double prev = 0.0;
  for (int n_r : {16, 32, 64}) {
    const auto fine = mesh::BallMesh::build(kHyp2, 0.5, n_r, 4 * n_r);
    auto u = mesh::sample(fine, [](const Vec& q) {
      return std::cosh(q[1]) * std::cos(0.8 * q[2]);
    });
    const auto pf = mesh::pole_fit(u);
    // at the base point: grad = 0, hess = diag(1, -0.64) for this product
    const double err =
        std::max((pf.grad - VecN::Zero(2)).norm(),
                 (pf.hess - (MatN(2, 2) << 1.0, 0.0, 0.0, -0.64).finished())
                     .norm());
    if (prev > 0.0) CHECK(err < 0.5 * prev);
    prev = err;
  }
  CHECK(prev < 5e-3);
}

TEST_CASE("measure_where: additive, monotone, and correct on a disc") {
  const auto grid = mesh::BallMesh::build(kFlat2, 1.0, 64, 256);
  auto dist = mesh::sample(grid, [&](const Vec& x) {
    return geom::distance(kFlat2, kFlat2.base(), x);
  });

  const double below = mesh::measure_where(dist, [](double v) { return v < 0.5; });
  const double above = mesh::measure_where(dist, [](double v) { return v >= 0.5; });
  CHECK(below + above ==
        doctest::Approx(grid.total_measure()).epsilon(1e-12));
  CHECK(below == doctest::Approx(kPi / 4.0).epsilon(2.0 / 64));
  CHECK(mesh::measure_where(dist, [](double) { return false; }) == 0.0);
  CHECK(mesh::measure_where(dist, [](double) { return true; }) ==
        doctest::Approx(grid.total_measure()).epsilon(1e-12));

  // restriction to a subball can only shrink the measure
  const double in_sub = mesh::measure_where(
      dist, [](double v) { return v < 0.5; }, kFlat2.base(), 0.25);
  CHECK(in_sub <= below);
  CHECK(in_sub ==
        doctest::Approx(mesh::ball_measure(grid, kFlat2.base(), 0.25))
            .epsilon(1e-12));
}

TEST_CASE("nodes_within: closed-ball semantics on ring boundaries") {
  const auto grid = mesh::BallMesh::build(kFlat2, 1.0, 16, 48);
  const auto all = grid.nodes_within(kFlat2.base(), 1.0);
  CHECK(static_cast<int>(all.size()) == grid.count());

  // rho exactly on ring 8: the ring must be kept
  const auto half = grid.nodes_within(kFlat2.base(), 0.5);
  CHECK(static_cast<int>(half.size()) == 1 + 8 * 48);
  for (int id : half)
    CHECK(geom::distance(kFlat2, grid.node(id).pos, kFlat2.base()) <=
          0.5 * (1.0 + 1e-10));

  // off-center ball: compare against a direct scan
  const Vec c = geom::exp_map(
      kFlat2, {kFlat2.base(), (VecN(2) << 0.3, 0.1).finished()});
  const auto sub = grid.nodes_within(c, 0.4);
  int direct = 0;
  for (int id = 0; id < grid.count(); ++id)
    direct += geom::distance(kFlat2, grid.node(id).pos, c) <= 0.4 ? 1 : 0;
  CHECK(static_cast<int>(sub.size()) == direct);
}

TEST_CASE("field extrema helpers agree with direct scans") {
  const auto grid = mesh::BallMesh::build(kHyp2, 1.0, 16, 48);
  auto u = chart_sample(grid, [](double r, double t) {
    return std::sin(5.0 * r) * std::cos(3.0 * t) - 0.2;
  });
  double lo = u[0], hi = u[0], amax = std::abs(u[0]);
  for (double v : u.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    amax = std::max(amax, std::abs(v));
  }
  CHECK(mesh::min_value(u) == lo);
  CHECK(mesh::max_value(u) == hi);
  CHECK(mesh::max_abs(u) == amax);

  const double rho = 0.3;
  double lo_in = std::numeric_limits<double>::infinity(), hi_in = -lo_in;
  for (int id = 0; id < grid.count(); ++id) {
    if (geom::distance(kHyp2, grid.node(id).pos, kHyp2.base()) > rho) continue;
    lo_in = std::min(lo_in, u[id]);
    hi_in = std::max(hi_in, u[id]);
  }
  CHECK(mesh::min_in(u, kHyp2.base(), rho) == lo_in);
  CHECK(mesh::max_in(u, kHyp2.base(), rho) == hi_in);
}

TEST_CASE("CSV snapshot round-trips node data") {
  const auto grid = mesh::BallMesh::build(kFlat2, 0.5, 4, 8);
  auto u = chart_sample(grid, [](double r, double t) { return r * t + 1.0; });
  std::ostringstream out;
  mesh::write_csv(u, out);

  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "id,r,theta,weight,value\r");

  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    const int id = std::stoi(tok);
    std::getline(ls, tok, ',');
    CHECK(std::stod(tok) == doctest::Approx(grid.node(id).r).epsilon(1e-15));
    std::getline(ls, tok, ',');
    CHECK(std::stod(tok) ==
          doctest::Approx(grid.node(id).theta).epsilon(1e-15));
    std::getline(ls, tok, ',');
    CHECK(std::stod(tok) ==
          doctest::Approx(grid.node(id).weight).epsilon(1e-15));
    std::getline(ls, tok, ',');
    CHECK(std::stod(tok) == doctest::Approx(u[id]).epsilon(1e-15));
    ++rows;
  }
  CHECK(rows == grid.count());
}

TEST_CASE("stencil_ok delimits exactly where derivatives exist") {
  const auto grid = mesh::BallMesh::build(kSph2, 1.0, 12, 36);
  auto u = chart_sample(grid, [](double r, double t) { return r + t; });
  for (int id = 0; id < grid.count(); ++id) {
    if (grid.stencil_ok(id)) {
      CHECK_NOTHROW(mesh::gradient(u, id));
      CHECK_NOTHROW(mesh::hessian(u, id));
    } else {
      CHECK_THROWS_AS(mesh::gradient(u, id), std::domain_error);
      CHECK_THROWS_AS(mesh::hessian(u, id), std::domain_error);
    }
  }
  CHECK(!grid.stencil_ok(0));  // pole goes through the ring fit instead
  CHECK_NOTHROW(mesh::pole_fit(u));
}
