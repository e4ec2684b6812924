#pragma once

// Structured polar meshes on geodesic balls B_R centered at the chart base.
//
// Node 0 is the pole; ring i = 1..N_r sits at radius r_i = i h_r.  In
// dimension 2 the angles are theta_j = j h_theta (periodic); in dimension 3
// the polar angle is cell-centered, theta_j = (j + 1/2) pi / N_theta, and the
// azimuth phi_l = l h_phi is periodic, so no node sits on the chart axis.
//
// Each node carries the exact Riemannian measure of its dual cell, computed
// from the closed primitives of sn and sn^2 -- the weights sum to the exact
// ball volume.  Derivative stencils return components in the canonical
// orthonormal frame of the geometry module (radial first), using covariant
// corrections, and are defined away from the pole, the boundary ring and (in
// dimension 3) the two polar-angle edge rings; everywhere else they throw.
// The pole has a dedicated least-squares ring fit used by the solver and the
// contact searches (consistency O(h^2) for both gradient and Hessian, by the
// symmetry of the ring direction set).

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/geometry.hpp"
#include "hlab/types.hpp"

namespace hlab::mesh {

struct Node {
  int i = 0, j = 0, l = 0;  // ring, angular, azimuthal index (l: n = 3 only)
  double r = 0.0, theta = 0.0, phi = 0.0;
  Vec pos = Vec::Zero();
  double weight = 0.0;
};

class BallMesh {
 public:
  static BallMesh build(const geom::Model& model, double radius, int n_r,
                        int n_theta, int n_phi = 0);

  [[nodiscard]] const geom::Model& model() const { return model_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] int count() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const Node& node(int id) const { return nodes_[id]; }
  [[nodiscard]] static int pole() { return 0; }

  [[nodiscard]] int n_r() const { return n_r_; }
  [[nodiscard]] int n_theta() const { return n_theta_; }
  [[nodiscard]] int n_phi() const { return n_phi_; }
  [[nodiscard]] double h_r() const { return h_r_; }
  [[nodiscard]] double h_theta() const { return h_theta_; }
  [[nodiscard]] double h_phi() const { return h_phi_; }

  [[nodiscard]] int id_of(int i, int j, int l = 0) const;
  [[nodiscard]] int wrap_j(int j) const;
  [[nodiscard]] int wrap_l(int l) const;

  [[nodiscard]] bool boundary(int id) const { return nodes_[id].i == n_r_; }
  [[nodiscard]] bool stencil_ok(int id) const;

  [[nodiscard]] double total_measure() const { return total_measure_; }

  // ids of nodes with d(node, center) <= rho (closed ball, relative slack
  // 1e-12 so that nodes landing exactly on the sphere are kept)
  [[nodiscard]] std::vector<int> nodes_within(const Vec& center,
                                              double rho) const;

 private:
  geom::Model model_;
  double radius_ = 0.0;
  int n_r_ = 0, n_theta_ = 0, n_phi_ = 0;
  double h_r_ = 0.0, h_theta_ = 0.0, h_phi_ = 0.0;
  double total_measure_ = 0.0;
  std::vector<Node> nodes_;
};

// --- fields -------------------------------------------------------------------

struct ScalarField {
  const BallMesh* mesh = nullptr;
  std::vector<double> values;
  std::string name;

  double& operator[](int id) { return values[id]; }
  double operator[](int id) const { return values[id]; }
};

[[nodiscard]] ScalarField make_field(const BallMesh& mesh,
                                     std::string name = "u");
[[nodiscard]] ScalarField sample(const BallMesh& mesh,
                                 const std::function<double(const Vec&)>& f,
                                 std::string name = "u");

// --- derivative stencils --------------------------------------------------------

// contribution of u(node) to the Hessian (resp. gradient) at a stencil node
struct HessEntry {
  int node;
  MatN coeff;
};
struct GradEntry {
  int node;
  VecN coeff;
};

[[nodiscard]] std::vector<GradEntry> gradient_stencil(const BallMesh& mesh,
                                                      int id);
[[nodiscard]] std::vector<HessEntry> hessian_stencil(const BallMesh& mesh,
                                                     int id);

[[nodiscard]] geom::TangentVector gradient(const ScalarField& u, int id);
[[nodiscard]] MatN hessian(const ScalarField& u, int id);

// least-squares quadratic fit on the first ring: derivatives at the pole in
// the Cartesian pole frame, linear in the nodal values
struct PoleStencil {
  std::vector<GradEntry> grad;  // entries reference pole and ring-1 nodes
  std::vector<HessEntry> hess;
};
[[nodiscard]] PoleStencil pole_stencil(const BallMesh& mesh);

struct PoleFit {
  VecN grad;
  MatN hess;
};
[[nodiscard]] PoleFit pole_fit(const ScalarField& u);

// --- measures -------------------------------------------------------------------

[[nodiscard]] double measure_where(const ScalarField& u,
                                   const std::function<bool(double)>& pred);
[[nodiscard]] double measure_where(const ScalarField& u,
                                   const std::function<bool(double)>& pred,
                                   const Vec& center, double rho);
// quadrature measure of the discrete ball (consistent denominator for
// density fractions)
[[nodiscard]] double ball_measure(const BallMesh& mesh, const Vec& center,
                                  double rho);

// field snapshot as CSV (id, r, theta[, phi], weight, value), RFC-4180
void write_csv(const ScalarField& u, std::ostream& out);

[[nodiscard]] double min_value(const ScalarField& u);
[[nodiscard]] double max_value(const ScalarField& u);
[[nodiscard]] double max_abs(const ScalarField& u);
// extrema over the closed subball
[[nodiscard]] double min_in(const ScalarField& u, const Vec& center,
                            double rho);
[[nodiscard]] double max_in(const ScalarField& u, const Vec& center,
                            double rho);

}  // namespace hlab::mesh
