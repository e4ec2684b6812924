#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hlab/geometry.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

std::mt19937_64 rng(91);

double u01() {
  return (rng() >> 11) * 0x1.0p-53;
}

geom::TangentVector random_tangent(const geom::Model& m, const Vec& x,
                                   double max_norm) {
  VecN w(m.n);
  for (int i = 0; i < m.n; ++i) w[i] = 2.0 * u01() - 1.0;
  w *= max_norm * u01() / std::max(1e-12, w.norm());
  return {x, w};
}

Vec random_point(const geom::Model& m, double rad) {
  return geom::exp_map(m, random_tangent(m, m.base(), rad));
}

// independent law-of-cosines distance for chart-constructed points (n = 2)
double loc_distance(const geom::Model& m, double r1, double t1, double r2,
                    double t2) {
  const double dt = t1 - t2;
  if (m.flat())
    return std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 -
                                       2.0 * r1 * r2 * std::cos(dt)));
  if (m.hyperbolic()) {
    const double s = std::sqrt(-m.curvature);
    const double ch = std::cosh(s * r1) * std::cosh(s * r2) -
                      std::sinh(s * r1) * std::sinh(s * r2) * std::cos(dt);
    return std::acosh(std::max(1.0, ch)) / s;
  }
  const double s = std::sqrt(m.curvature);
  const double cs = std::cos(s * r1) * std::cos(s * r2) +
                    std::sin(s * r1) * std::sin(s * r2) * std::cos(dt);
  return std::acos(std::clamp(cs, -1.0, 1.0)) / s;
}

const geom::Model kModels[] = {
    geom::make_model(2, 0.0), geom::make_model(2, -1.0),
    geom::make_model(2, 1.0), geom::make_model(3, -1.0),
    geom::make_model(3, 1.0)};

}  // namespace

TEST_CASE("comparison functions: values and limits") {
  CHECK(geom::comparison_S(0.0) == 1.0);
  CHECK(geom::comparison_H(0.0) == 1.0);
  for (double t : {0.25, 1.0, 2.0, 5.5}) {
    CHECK(geom::comparison_S(t) == doctest::Approx(std::sinh(t) / t).epsilon(1e-14));
    CHECK(geom::comparison_H(t) ==
          doctest::Approx(t * std::cosh(t) / std::sinh(t)).epsilon(1e-14));
  }
  for (double t : {0.25, 1.0, 2.0}) {
    CHECK(geom::circ_S(t) == doctest::Approx(std::sin(t) / t).epsilon(1e-14));
    CHECK(geom::circ_H(t) ==
          doctest::Approx(t * std::cos(t) / std::sin(t)).epsilon(1e-14));
  }
  // monotonicity on a fine ladder
  double prev_s = 1.0, prev_h = 1.0;
  for (int k = 1; k <= 600; ++k) {
    const double t = k * 0.01;
    CHECK(geom::comparison_S(t) >= prev_s);
    CHECK(geom::comparison_H(t) >= prev_h);
    prev_s = geom::comparison_S(t);
    prev_h = geom::comparison_H(t);
  }
}

TEST_CASE("exp_map matches the geodesic ODE flow") {
  for (const auto& m : kModels) {
    for (int k = 0; k < 25; ++k) {
      const Vec x = random_point(m, 0.8);
      const auto tv = random_tangent(m, x, 1.5);
      const Vec lib = geom::exp_map(m, tv);

      const FrameMat F = geom::frame_at(m, x);
      Eigen::VectorXd v0 = Eigen::VectorXd::Zero(4);
      for (int i = 0; i < m.n; ++i) v0 += tv.comps[i] * Eigen::VectorXd(F.col(i));
      const Eigen::VectorXd ode = oracle::geodesic_rk4(m.curvature, x, v0);

      CHECK((lib - Vec(ode)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("log_map inverts exp_map and reports the distance") {
  for (const auto& m : kModels) {
    for (int k = 0; k < 40; ++k) {
      const Vec x = random_point(m, 0.7);
      const Vec y = random_point(m, 0.7);
      const auto v = geom::log_map(m, x, y);
      CHECK(geom::distance(m, geom::exp_map(m, v), y) < 1e-10);
      CHECK(v.norm() == doctest::Approx(geom::distance(m, x, y)).epsilon(1e-11));
    }
  }
}

TEST_CASE("distance against the law of cosines (n = 2)") {
  for (const auto& m : kModels) {
    if (m.n != 2) continue;
    for (int k = 0; k < 60; ++k) {
      const double r1 = 1.2 * u01(), t1 = 6.283185307179586 * u01();
      const double r2 = 1.2 * u01(), t2 = 6.283185307179586 * u01();
      const Vec x = geom::point_of(m, {r1, t1, 0.0});
      const Vec y = geom::point_of(m, {r2, t2, 0.0});
      CHECK(geom::distance(m, x, y) ==
            doctest::Approx(loc_distance(m, r1, t1, r2, t2)).epsilon(1e-10));
    }
  }
}

TEST_CASE("chart round-trip") {
  for (const auto& m : kModels) {
    for (int k = 0; k < 40; ++k) {
      const Vec x = random_point(m, 1.1);
      const auto pc = geom::chart_of(m, x);
      CHECK(geom::distance(m, geom::point_of(m, pc), x) < 1e-10);
      CHECK(pc.r == doctest::Approx(geom::distance(m, m.base(), x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("jac_exp against finite differences of the ODE flow") {
  for (const auto& m : kModels) {
    if (m.flat()) {
      const Vec x = random_point(m, 0.5);
      CHECK(geom::jac_exp(m, random_tangent(m, x, 1.0)) == 1.0);
      continue;
    }
    for (int k = 0; k < 8; ++k) {
      const Vec x = random_point(m, 0.4);
      auto tv = random_tangent(m, x, 1.2);
      if (tv.norm() < 0.2) tv.comps *= 0.2 / tv.norm() * (1.0 + u01());

      const FrameMat F = geom::frame_at(m, x);
      auto flow = [&](const VecN& w) {
        Eigen::VectorXd v0 = Eigen::VectorXd::Zero(4);
        for (int i = 0; i < m.n; ++i) v0 += w[i] * Eigen::VectorXd(F.col(i));
        return Vec(oracle::geodesic_rk4(m.curvature, x, v0, 1200));
      };

      const Vec img = flow(tv.comps);
      const FrameMat G = geom::frame_at(m, img);
      const double eps = 1e-5;
      MatN J(m.n, m.n);
      for (int i = 0; i < m.n; ++i) {
        VecN wp = tv.comps, wm = tv.comps;
        wp[i] += eps;
        wm[i] -= eps;
        const Vec diff = (flow(wp) - flow(wm)) / (2.0 * eps);
        for (int j = 0; j < m.n; ++j)
          J(j, i) = geom::ambient_inner(m, G.col(j), diff);
      }
      CHECK(std::abs(J.determinant()) ==
            doctest::Approx(geom::jac_exp(m, tv)).epsilon(2e-6));
    }
  }
}

TEST_CASE("hess_half_dist_sq: eigenvalues and quadratic probe") {
  for (const auto& m : kModels) {
    for (int k = 0; k < 10; ++k) {
      const Vec y = random_point(m, 0.6);
      const Vec x = random_point(m, 0.6);
      const double d = geom::distance(m, x, y);
      if (d < 0.05) continue;
      const MatN H = geom::hess_half_dist_sq(m, x, y);
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12);

      // eigenvalues: 1 radially, sn'(d) d / sn(d) tangentially
      Eigen::SelfAdjointEigenSolver<MatN> eig(H);
      std::vector<double> expected(m.n, 0.0);
      const double tang = m.flat() ? 1.0
                                   : (m.hyperbolic()
                                          ? geom::comparison_H(std::sqrt(-m.curvature) * d)
                                          : geom::circ_H(std::sqrt(m.curvature) * d));
      expected[0] = 1.0;
      for (int i = 1; i < m.n; ++i) expected[i] = tang;
      std::sort(expected.begin(), expected.end());
      for (int i = 0; i < m.n; ++i)
        CHECK(eig.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-9));

      // second difference of d(., y)^2/2 along a random geodesic through x
      const auto w = random_tangent(m, x, 1.0);
      if (w.norm() < 0.1) continue;
      auto q = [&](double t) {
        geom::TangentVector tw{x, t * w.comps};
        const double dd = geom::distance(m, geom::exp_map(m, tw), y);
        return 0.5 * dd * dd;
      };
      const double t = 1e-4;
      const double second = (q(t) - 2.0 * q(0.0) + q(-t)) / (t * t);
      const double quad = w.comps.dot(H * w.comps);
      CHECK(second == doctest::Approx(quad).epsilon(5e-4));
    }
  }
}

TEST_CASE("hess interpolation stays monotone in t (PSD certificate input)") {
  for (const auto& m : kModels) {
    for (int k = 0; k < 10; ++k) {
      const Vec x = random_point(m, 0.5);
      const Vec y = random_point(m, 0.5);
      if (geom::distance(m, x, y) < 0.05) continue;
      for (double t : {0.25, 0.5, 0.75, 1.0}) {
        const Vec gt = geom::geodesic_point(m, x, y, t);
        const MatN A = geom::hess_half_dist_sq(m, x, gt);
        const MatN B = geom::hess_half_dist_sq(m, x, y);
        Eigen::SelfAdjointEigenSolver<MatN> eig(A - t * B);
        CHECK(eig.eigenvalues().minCoeff() > -1e-9);
      }
    }
  }
}

TEST_CASE("ball volumes against adaptive quadrature") {
  for (const auto& m : kModels) {
    for (double r : {0.3, 0.8, 1.2}) {
      CHECK(geom::ball_volume(m, r) ==
            doctest::Approx(oracle::ball_volume_ref(m.n, m.curvature, r))
                .epsilon(1e-11));
    }
  }
  // hand anchors
  CHECK(geom::ball_volume(geom::make_model(2, 0.0), 1.0) ==
        doctest::Approx(M_PI).epsilon(1e-14));
  // hyperbolic plane: |B_r| = 2 pi (cosh r - 1)
  CHECK(geom::ball_volume(geom::make_model(2, -1.0), 1.0) ==
        doctest::Approx(2.0 * M_PI * (std::cosh(1.0) - 1.0)).epsilon(1e-13));
  // sphere: |B_r| = 2 pi (1 - cos r)
  CHECK(geom::ball_volume(geom::make_model(2, 1.0), 1.0) ==
        doctest::Approx(2.0 * M_PI * (1.0 - std::cos(1.0))).epsilon(1e-13));
}

TEST_CASE("doubling constant dominates measured volume doubling") {
  for (const auto& m : kModels) {
    const double R = m.spherical() ? 1.0 : 1.2;
    const double D = geom::doubling_constant(m, R);
    CHECK(D >= (m.n == 2 ? 4.0 : 8.0) - 1e-12);  // at least the flat value
    for (double fr : {0.1, 0.2, 0.3, 0.5}) {
      const double v1 = geom::ball_volume(m, fr * R);
      const double v2 = geom::ball_volume(m, 2.0 * fr * R);
      CHECK(v2 <= D * v1 * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("pucci_ricci_lower hand values") {
  CHECK(geom::pucci_ricci_lower(geom::make_model(2, 0.0), 0.5, 2.0) == 0.0);
  CHECK(geom::pucci_ricci_lower(geom::make_model(3, -1.0), 1.0, 2.0) ==
        doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(geom::pucci_ricci_lower(geom::make_model(2, 1.0), 0.5, 2.0) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("frame_at is orthonormal in the ambient metric") {
  for (const auto& m : kModels) {
    for (int k = 0; k < 20; ++k) {
      const Vec x = random_point(m, 1.0);
      const FrameMat F = geom::frame_at(m, x);
      for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
          const double g = geom::ambient_inner(m, F.col(i), F.col(j));
          CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
  }
}
