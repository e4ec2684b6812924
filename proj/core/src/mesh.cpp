#include "hlab/mesh.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <ostream>

#include "hlab/report.hpp"

namespace hlab::mesh {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& what) {
  throw std::domain_error("mesh: " + what);
}

}  // namespace

BallMesh BallMesh::build(const geom::Model& model, double radius, int n_r,
                         int n_theta, int n_phi) {
  if (!model.admissible_radius(radius))
    fail("inadmissible ball radius for this model");
  if (n_r < 4) fail("need at least 4 radial rings");
  if (model.n == 2) {
    if (n_theta < 8 || n_theta % 2 != 0)
      fail("dimension 2 needs an even angular count >= 8");
    if (n_phi != 0) fail("dimension 2 takes no azimuthal count");
  } else {
    if (n_theta < 4) fail("dimension 3 needs at least 4 polar cells");
    if (n_phi < 8) fail("dimension 3 needs at least 8 azimuthal cells");
  }

  BallMesh m;
  m.model_ = model;
  m.radius_ = radius;
  m.n_r_ = n_r;
  m.n_theta_ = n_theta;
  m.n_phi_ = model.n == 3 ? n_phi : 0;
  m.h_r_ = radius / n_r;
  m.h_theta_ = (model.n == 2 ? 2.0 * kPi : kPi) / n_theta;
  m.h_phi_ = model.n == 3 ? 2.0 * kPi / n_phi : 0.0;

  const int per_ring = model.n == 2 ? n_theta : n_theta * n_phi;
  m.nodes_.reserve(1 + static_cast<std::size_t>(n_r) * per_ring);

  Node pole;
  pole.pos = model.base();
  pole.weight = model.n == 2
                    ? 2.0 * kPi * geom::sn_primitive(model, 0.5 * m.h_r_)
                    : 4.0 * kPi * geom::sn2_primitive(model, 0.5 * m.h_r_);
  m.nodes_.push_back(pole);
  m.total_measure_ = pole.weight;

  for (int i = 1; i <= n_r; ++i) {
    const double r = i * m.h_r_;
    const double r_lo = r - 0.5 * m.h_r_;
    const double r_hi = std::min(radius, r + 0.5 * m.h_r_);
    const double radial =
        model.n == 2
            ? geom::sn_primitive(model, r_hi) - geom::sn_primitive(model, r_lo)
            : geom::sn2_primitive(model, r_hi) -
                  geom::sn2_primitive(model, r_lo);
    if (model.n == 2) {
      for (int j = 0; j < n_theta; ++j) {
        Node nd;
        nd.i = i;
        nd.j = j;
        nd.r = r;
        nd.theta = j * m.h_theta_;
        nd.pos = geom::point_of(model, {r, nd.theta, 0.0});
        nd.weight = m.h_theta_ * radial;
        m.total_measure_ += nd.weight;
        m.nodes_.push_back(nd);
      }
    } else {
      for (int j = 0; j < n_theta; ++j) {
        const double th_lo = j * m.h_theta_, th_hi = (j + 1) * m.h_theta_;
        const double band = std::cos(th_lo) - std::cos(th_hi);
        for (int l = 0; l < n_phi; ++l) {
          Node nd;
          nd.i = i;
          nd.j = j;
          nd.l = l;
          nd.r = r;
          nd.theta = (j + 0.5) * m.h_theta_;
          nd.phi = l * m.h_phi_;
          nd.pos = geom::point_of(model, {r, nd.theta, nd.phi});
          nd.weight = radial * band * m.h_phi_;
          m.total_measure_ += nd.weight;
          m.nodes_.push_back(nd);
        }
      }
    }
  }
  return m;
}

int BallMesh::wrap_j(int j) const {
  const int n = n_theta_;
  return ((j % n) + n) % n;
}

int BallMesh::wrap_l(int l) const {
  const int n = n_phi_;
  return ((l % n) + n) % n;
}

int BallMesh::id_of(int i, int j, int l) const {
  if (i == 0) return 0;
  if (i < 0 || i > n_r_) fail("ring index out of range");
  if (model_.n == 2) return 1 + (i - 1) * n_theta_ + wrap_j(j);
  if (j < 0 || j >= n_theta_) fail("polar index out of range");
  return 1 + ((i - 1) * n_theta_ + j) * n_phi_ + wrap_l(l);
}

bool BallMesh::stencil_ok(int id) const {
  const Node& nd = nodes_[id];
  if (id == 0 || nd.i >= n_r_) return false;
  if (model_.n == 3 && (nd.j == 0 || nd.j == n_theta_ - 1)) return false;
  return true;
}

std::vector<int> BallMesh::nodes_within(const Vec& center, double rho) const {
  std::vector<int> out;
  const double cap = rho * (1.0 + 1e-12);
  for (int id = 0; id < count(); ++id)
    if (geom::distance(model_, nodes_[id].pos, center) <= cap)
      out.push_back(id);
  return out;
}

// --- fields -------------------------------------------------------------------

ScalarField make_field(const BallMesh& mesh, std::string name) {
  ScalarField f;
  f.mesh = &mesh;
  f.values.assign(mesh.count(), 0.0);
  f.name = std::move(name);
  return f;
}

ScalarField sample(const BallMesh& mesh,
                   const std::function<double(const Vec&)>& f,
                   std::string name) {
  ScalarField out = make_field(mesh, std::move(name));
  for (int id = 0; id < mesh.count(); ++id)
    out.values[id] = f(mesh.node(id).pos);
  return out;
}

// --- stencils -----------------------------------------------------------------

std::vector<GradEntry> gradient_stencil(const BallMesh& mesh, int id) {
  if (!mesh.stencil_ok(id)) fail("gradient stencil undefined at this node");
  const Node& nd = mesh.node(id);
  const geom::Model& mo = mesh.model();
  const int n = mo.n;
  const double S = geom::sn(mo, nd.r);
  std::vector<GradEntry> out;
  auto add = [&](int i, int j, int l, int comp, double val) {
    GradEntry e;
    e.node = mesh.id_of(i, j, l);
    e.coeff = VecN::Zero(n);
    e.coeff[comp] = val;
    out.push_back(e);
  };
  add(nd.i + 1, nd.j, nd.l, 0, 0.5 / mesh.h_r());
  add(nd.i - 1, nd.j, nd.l, 0, -0.5 / mesh.h_r());
  add(nd.i, nd.j + 1, nd.l, 1, 0.5 / (mesh.h_theta() * S));
  add(nd.i, nd.j - 1, nd.l, 1, -0.5 / (mesh.h_theta() * S));
  if (n == 3) {
    const double den = 2.0 * mesh.h_phi() * S * std::sin(nd.theta);
    add(nd.i, nd.j, nd.l + 1, 2, 1.0 / den);
    add(nd.i, nd.j, nd.l - 1, 2, -1.0 / den);
  }
  return out;
}

std::vector<HessEntry> hessian_stencil(const BallMesh& mesh, int id) {
  if (!mesh.stencil_ok(id)) fail("hessian stencil undefined at this node");
  const Node& nd = mesh.node(id);
  const geom::Model& mo = mesh.model();
  const int n = mo.n;
  const double S = geom::sn(mo, nd.r);
  const double Sp = geom::sn_prime(mo, nd.r);
  const double hr = mesh.h_r(), ht = mesh.h_theta();

  std::map<int, MatN> acc;
  auto add = [&](int i, int j, int l, int row, int col, double val) {
    const int nid = mesh.id_of(i, j, l);
    auto [it, fresh] = acc.try_emplace(nid, MatN::Zero(n, n));
    it->second(row, col) += val;
    if (row != col) it->second(col, row) += val;
  };
  const int i = nd.i, j = nd.j, l = nd.l;

  // H_rr = u_rr
  add(i + 1, j, l, 0, 0, 1.0 / (hr * hr));
  add(i, j, l, 0, 0, -2.0 / (hr * hr));
  add(i - 1, j, l, 0, 0, 1.0 / (hr * hr));

  // H_tt = u_tt / S^2 + (S'/S) u_r
  add(i, j + 1, l, 1, 1, 1.0 / (ht * ht * S * S));
  add(i, j, l, 1, 1, -2.0 / (ht * ht * S * S));
  add(i, j - 1, l, 1, 1, 1.0 / (ht * ht * S * S));
  add(i + 1, j, l, 1, 1, Sp / S * 0.5 / hr);
  add(i - 1, j, l, 1, 1, -Sp / S * 0.5 / hr);

  // H_rt = (u_rt - (S'/S) u_t) / S
  add(i + 1, j + 1, l, 0, 1, 0.25 / (hr * ht * S));
  add(i + 1, j - 1, l, 0, 1, -0.25 / (hr * ht * S));
  add(i - 1, j + 1, l, 0, 1, -0.25 / (hr * ht * S));
  add(i - 1, j - 1, l, 0, 1, 0.25 / (hr * ht * S));
  add(i, j + 1, l, 0, 1, -Sp / (S * S) * 0.5 / ht);
  add(i, j - 1, l, 0, 1, Sp / (S * S) * 0.5 / ht);

  if (n == 3) {
    const double hp = mesh.h_phi();
    const double st = std::sin(nd.theta), ct = std::cos(nd.theta);

    // H_pp = u_pp / (S^2 st^2) + (S'/S) u_r + (ct/st) u_t / S^2
    const double wpp = 1.0 / (hp * hp * S * S * st * st);
    add(i, j, l + 1, 2, 2, wpp);
    add(i, j, l, 2, 2, -2.0 * wpp);
    add(i, j, l - 1, 2, 2, wpp);
    add(i + 1, j, l, 2, 2, Sp / S * 0.5 / hr);
    add(i - 1, j, l, 2, 2, -Sp / S * 0.5 / hr);
    add(i, j + 1, l, 2, 2, ct / st / (S * S) * 0.5 / ht);
    add(i, j - 1, l, 2, 2, -ct / st / (S * S) * 0.5 / ht);

    // H_rp = (u_rp - (S'/S) u_p) / (S st)
    const double wrp = 0.25 / (hr * hp * S * st);
    add(i + 1, j, l + 1, 0, 2, wrp);
    add(i + 1, j, l - 1, 0, 2, -wrp);
    add(i - 1, j, l + 1, 0, 2, -wrp);
    add(i - 1, j, l - 1, 0, 2, wrp);
    add(i, j, l + 1, 0, 2, -Sp / (S * S * st) * 0.5 / hp);
    add(i, j, l - 1, 0, 2, Sp / (S * S * st) * 0.5 / hp);

    // H_tp = (u_tp - (ct/st) u_p) / (S^2 st)
    const double wtp = 0.25 / (ht * hp * S * S * st);
    add(i, j + 1, l + 1, 1, 2, wtp);
    add(i, j + 1, l - 1, 1, 2, -wtp);
    add(i, j - 1, l + 1, 1, 2, -wtp);
    add(i, j - 1, l - 1, 1, 2, wtp);
    add(i, j, l + 1, 1, 2, -ct / (S * S * st * st) * 0.5 / hp);
    add(i, j, l - 1, 1, 2, ct / (S * S * st * st) * 0.5 / hp);
  }

  std::vector<HessEntry> out;
  out.reserve(acc.size());
  for (auto& [nid, coeff] : acc) out.push_back({nid, std::move(coeff)});
  return out;
}

geom::TangentVector gradient(const ScalarField& u, int id) {
  const BallMesh& mesh = *u.mesh;
  geom::TangentVector g;
  g.base = mesh.node(id).pos;
  g.comps = VecN::Zero(mesh.model().n);
  for (const auto& e : gradient_stencil(mesh, id))
    g.comps += e.coeff * u.values[e.node];
  return g;
}

MatN hessian(const ScalarField& u, int id) {
  const BallMesh& mesh = *u.mesh;
  const int n = mesh.model().n;
  MatN H = MatN::Zero(n, n);
  for (const auto& e : hessian_stencil(mesh, id)) H += e.coeff * u.values[e.node];
  return H;
}

PoleStencil pole_stencil(const BallMesh& mesh) {
  const geom::Model& mo = mesh.model();
  const int n = mo.n;
  const double h = mesh.h_r();

  std::vector<int> ring;
  if (n == 2) {
    for (int j = 0; j < mesh.n_theta(); ++j) ring.push_back(mesh.id_of(1, j));
  } else {
    for (int j = 0; j < mesh.n_theta(); ++j)
      for (int l = 0; l < mesh.n_phi(); ++l) ring.push_back(mesh.id_of(1, j, l));
  }

  const int m = n == 2 ? 5 : 9;  // g followed by the upper triangle of H
  Eigen::MatrixXd A(static_cast<int>(ring.size()), m);
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const Node& nd = mesh.node(ring[k]);
    const Vec dir = geom::chart_direction(mo, nd.theta, nd.phi);
    VecN u(n);
    for (int c = 0; c < n; ++c) u[c] = dir[c + 1];
    int col = 0;
    for (int c = 0; c < n; ++c) A(k, col++) = h * u[c];
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c)
        A(k, col++) = (r == c ? 0.5 : 1.0) * h * h * u[r] * u[c];
  }
  // influence matrix of the least-squares fit: beta = M (u_ring - u_pole)
  const Eigen::MatrixXd M =
      (A.transpose() * A).ldlt().solve(A.transpose()).eval();

  PoleStencil st;
  VecN gsum = VecN::Zero(n);
  MatN hsum = MatN::Zero(n, n);
  auto unpack = [&](const Eigen::VectorXd& beta_col) {
    MatN H = MatN::Zero(n, n);
    int col = n;
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) {
        H(r, c) = beta_col[col];
        H(c, r) = beta_col[col];
        ++col;
      }
    return H;
  };
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const Eigen::VectorXd col = M.col(static_cast<int>(k));
    GradEntry ge;
    ge.node = ring[k];
    ge.coeff = col.head(n);
    gsum += ge.coeff;
    st.grad.push_back(ge);
    HessEntry he;
    he.node = ring[k];
    he.coeff = unpack(col);
    hsum += he.coeff;
    st.hess.push_back(he);
  }
  st.grad.push_back({BallMesh::pole(), -gsum});
  st.hess.push_back({BallMesh::pole(), -hsum});
  return st;
}

PoleFit pole_fit(const ScalarField& u) {
  const BallMesh& mesh = *u.mesh;
  const int n = mesh.model().n;
  const PoleStencil st = pole_stencil(mesh);
  PoleFit out;
  out.grad = VecN::Zero(n);
  out.hess = MatN::Zero(n, n);
  for (const auto& e : st.grad) out.grad += e.coeff * u.values[e.node];
  for (const auto& e : st.hess) out.hess += e.coeff * u.values[e.node];
  return out;
}

// --- measures -------------------------------------------------------------------

double measure_where(const ScalarField& u,
                     const std::function<bool(double)>& pred) {
  double s = 0.0;
  for (int id = 0; id < u.mesh->count(); ++id)
    if (pred(u.values[id])) s += u.mesh->node(id).weight;
  return s;
}

double measure_where(const ScalarField& u,
                     const std::function<bool(double)>& pred,
                     const Vec& center, double rho) {
  double s = 0.0;
  const BallMesh& mesh = *u.mesh;
  for (int id : mesh.nodes_within(center, rho))
    if (pred(u.values[id])) s += mesh.node(id).weight;
  return s;
}

double ball_measure(const BallMesh& mesh, const Vec& center, double rho) {
  double s = 0.0;
  for (int id : mesh.nodes_within(center, rho)) s += mesh.node(id).weight;
  return s;
}

double min_value(const ScalarField& u) {
  double v = u.values[0];
  for (double x : u.values) v = std::min(v, x);
  return v;
}

void write_csv(const ScalarField& u, std::ostream& out) {
  const BallMesh& m = *u.mesh;
  const bool volumetric = m.model().n == 3;
  out << (volumetric ? "id,r,theta,phi,weight,value\r\n"
                     : "id,r,theta,weight,value\r\n");
  for (int id = 0; id < m.count(); ++id) {
    const Node& nd = m.node(id);
    out << id << ',' << rep::format_double(nd.r) << ','
        << rep::format_double(nd.theta) << ',';
    if (volumetric) out << rep::format_double(nd.phi) << ',';
    out << rep::format_double(nd.weight) << ','
        << rep::format_double(u.values[id]) << "\r\n";
  }
}

double max_value(const ScalarField& u) {
  double v = u.values[0];
  for (double x : u.values) v = std::max(v, x);
  return v;
}

double max_abs(const ScalarField& u) {
  double v = 0.0;
  for (double x : u.values) v = std::max(v, std::abs(x));
  return v;
}

double min_in(const ScalarField& u, const Vec& center, double rho) {
  const auto ids = u.mesh->nodes_within(center, rho);
  if (ids.empty()) fail("empty subball");
  double v = u.values[ids[0]];
  for (int id : ids) v = std::min(v, u.values[id]);
  return v;
}

double max_in(const ScalarField& u, const Vec& center, double rho) {
  const auto ids = u.mesh->nodes_within(center, rho);
  if (ids.empty()) fail("empty subball");
  double v = u.values[ids[0]];
  for (int id : ids) v = std::max(v, u.values[id]);
  return v;
}

}  // namespace hlab::mesh
