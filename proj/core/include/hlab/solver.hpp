#pragma once

// Dirichlet solver for the nondivergence p-Laplace equation D_p u = f on a
// polar ball mesh (dimension 2).
//
// Fixed-point scheme: freeze the diffusion matrix A(grad u_k) of the current
// iterate (regularized with delta = h_r^2 when p != 2), solve the linear
// nondivergence problem tr(A D^2 u) = f with a sparse LU factorization, and
// damp the update by halving whenever the nonlinear residual grows.  The
// initial iterate solves the p = 2 problem.  Convergence is declared when
// max |D_p u - f| over derivative-carrying nodes drops below
// tol_factor * (1 + max |f|).

#include <functional>
#include <stdexcept>
#include <vector>

#include "hlab/mesh.hpp"
#include "hlab/operators.hpp"

namespace hlab::solver {

struct Controls {
  int max_iter = 200;
  double tol_factor = 1e-6;
  double damping_min = 1.0 / 64.0;
};

struct Diagnostics {
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  std::vector<double> residual_history;
  std::vector<double> damping_history;
};

struct SolveFailure : std::runtime_error {
  Diagnostics diag;
  SolveFailure(const std::string& what, Diagnostics d)
      : std::runtime_error(what), diag(std::move(d)) {}
};

// pointwise D_p u - f; zero where no derivatives exist (boundary ring).  The
// pole uses the ring fit.  Wherever |grad u| < h_r the operator is evaluated
// in the regularized form with delta = h_r^2.
[[nodiscard]] mesh::ScalarField residual_field(const mesh::ScalarField& u,
                                               const ops::EllipticParams& prm,
                                               const mesh::ScalarField& f);

[[nodiscard]] double max_residual(const mesh::ScalarField& u,
                                  const ops::EllipticParams& prm,
                                  const mesh::ScalarField& f);

[[nodiscard]] mesh::ScalarField solve_dirichlet(
    const mesh::BallMesh& mesh, const ops::EllipticParams& prm,
    const mesh::ScalarField& f,
    const std::function<double(const Vec&)>& boundary,
    const Controls& ctl = {}, Diagnostics* diag = nullptr);

// --- manufactured supersolution instances -----------------------------------

enum class Profile { RadialShell, SolvedWell, PerturbedRadial };

struct Instance {
  mesh::ScalarField u;  // nonnegative field on the mesh
  mesh::ScalarField f;  // its pointwise operator value (forcing)
  Profile profile;
  double audit_excess = 0.0;  // max positive part of D_p u - f
};

// deterministic family of smooth nonnegative test fields together with their
// discrete forcing, parameterized by a seed
[[nodiscard]] Instance make_instance(const mesh::BallMesh& mesh,
                                     const ops::EllipticParams& prm,
                                     Profile profile, unsigned seed);

}  // namespace hlab::solver
