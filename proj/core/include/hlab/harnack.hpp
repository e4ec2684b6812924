#pragma once

// The chain from the measure bounds to the Harnack inequality, each link
// checkable on a discrete instance: an explicit annulus barrier, the
// critical-density alternative, geometric decay of super-level sets, the
// ball-dichotomy covering step, and the Harnack quotient itself together
// with the Hoelder oscillation decay it implies.

#include <cstdint>
#include <vector>

#include "hlab/abp.hpp"
#include "hlab/mesh.hpp"
#include "hlab/operators.hpp"
#include "hlab/status.hpp"

namespace hlab::harnack {

// radial barrier v(d) = Mtilde (r^alpha d^-alpha - 5^-alpha) on the annulus
// r <= d <= 5r: a supersolution with drift whose scaled excess
// r^p D_p v - beta r^p |grad v|^{p-1} stays >= 2
struct BarrierSpec {
  double alpha = 2.0;
  double mtilde = 1.0;
  double r = 1.0;
  double beta = 0.0;
  double slack = 0.0;  // achieved minimum of the scaled excess
  Vec z0 = Vec::Zero();
};

[[nodiscard]] double barrier_value(const BarrierSpec& b, double d);

// scaled excess at radius d, evaluated through the closed-form radial
// operator (exact on the space form)
[[nodiscard]] double barrier_slack(const geom::Model& m, const BarrierSpec& b,
                                   double p, double d);

// smallest alpha on a doubling ladder, then the smallest amplitude making
// all four barrier invariants hold on a 10^4-point radial sample of (r, 5r]
[[nodiscard]] BarrierSpec calibrate_barrier(const geom::Model& m,
                                            const ops::EllipticParams& prm,
                                            double r, const Vec& z0);

// threshold of the critical-density alternative at scale r inside B_{R0}:
// (p/(p-1)) * Mtilde_p * (barrier amplitude at scale r/4 with drift 1/R0 + 1)
[[nodiscard]] double critical_mtilde(const geom::Model& m,
                                     const ops::EllipticParams& prm, double r,
                                     double r0);

struct DensityReport {
  double theta = 1.0;
  double mtilde = 0.0;    // critical_mtilde used for the super-level set
  double delta = 0.0;     // imported critical density
  double fraction = 0.0;  // |{u > theta mtilde} cap B_r| / |B_r|
  double min_inner = 0.0;
  Status status = Status::Skip;
  bool hypotheses_ok = false;
  double worst_forcing = 0.0;  // r^p (op u)+   (<= theta^{p-1})
  double min_value = 0.0;      // global minimum (>= 0)
};

// the alternative: either the super-level fraction stays <= 1 - delta, or
// u exceeds theta on all of B_r
[[nodiscard]] DensityReport critical_density_check(
    const mesh::ScalarField& u, double r, const Vec& z0, double theta,
    const ops::EllipticParams& prm, double tol = 0.0);

struct DecayReport {
  std::vector<double> thresholds;  // base^k
  std::vector<double> measures;    // |{u > base^k} cap B_R|
  double base = 2.0;
  double max_ratio = 0.0;  // worst consecutive |A_{k+1}|/|A_k|
  double eps_fit = 0.0;    // exponent of the fitted power law t^{-eps}
  double delta_min = 0.0;
  int nonempty = 0;
  Status status = Status::Inconclusive;
  bool audited = false;  // u >= 0, inf_{B_R} u <= 1, R^p forcing <= 1
};

// geometric decay of super-level measures along thresholds base^k
[[nodiscard]] DecayReport level_decay(const mesh::ScalarField& u, double R,
                                      const Vec& x0,
                                      const ops::EllipticParams& prm,
                                      double base = 2.0,
                                      double delta_min = 0.02);

struct DichotomyReport {
  double measure_e = 0.0;
  double measure_f = 0.0;
  double measure_ball = 0.0;
  double c0 = 0.0;  // fitted (1 - |E|/|F|)/delta, capped at 1
  int balls_sampled = 0;
  int dense_balls = 0;  // sampled balls with |E cap B| > (1-delta)|B|
  bool hypothesis_ok = false;
  Status status = Status::Skip;
};

// covering dichotomy: if every sampled ball that is delta-dense in E lies
// inside F, then |E| <= (1 - c0 delta)|F| with the reported c0
[[nodiscard]] DichotomyReport ball_dichotomy_check(
    const mesh::ScalarField& e_ind, const mesh::ScalarField& f_ind, double R,
    const Vec& x0, double delta, int center_budget = 200);

struct QuotientResult {
  double sup_inner = 0.0;
  double inf_inner = 0.0;
  double forcing_term = 0.0;  // R^{p/(p-1)} ||f||^{1/(p-1)}
  double c_emp = 0.0;         // sup / (inf + forcing term)
  double min_value = 0.0;
  double tau_touch = 0.0;  // diagnostic: touching level of the sliding profile
  Status status = Status::Skip;
};

// empirical Harnack quotient of a nonnegative solution on B_{2R}; eps_diag
// feeds the diagnostic exponent of the sliding profile only
[[nodiscard]] QuotientResult harnack_quotient(const mesh::ScalarField& u,
                                              double R, const Vec& z0,
                                              const ops::EllipticParams& prm,
                                              double f_sup,
                                              double eps_diag = 1.0);

// strictly positive trigonometric boundary data with sup/inf close to the
// requested condition number, drawn deterministically from the seed
struct TrigPoly {
  double c0 = 1.0;
  std::vector<double> a, b;

  [[nodiscard]] double operator()(double theta) const;
};
[[nodiscard]] TrigPoly random_positive_trig(std::uint64_t seed, int modes,
                                            double cond);

struct OscillationReport {
  std::vector<double> radii;
  std::vector<double> osc;
  double alpha_fit = 0.0;  // infinity for constant fields
  Status status = Status::Inconclusive;
};

// oscillation over the dyadic balls B_{2^-k R}, k = 0..5, and the fitted
// Hoelder exponent
[[nodiscard]] OscillationReport hoelder_decay(const mesh::ScalarField& u,
                                              double R, const Vec& z0);

}  // namespace hlab::harnack
