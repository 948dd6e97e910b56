#pragma once

// FEM + PML solvers for the two exterior problems behind the far field data:
//
//  screen:    Delta u + k^2 u = 0 off Gamma, [d_nu u] + sigma u = 0, [u] = 0,
//             solved for the scattered field on the full disk mesh (Gamma is
//             an interior interface, continuity gives [u] = 0):
//               a_pml(us, v) - <sigma us, v>_Gamma = <sigma ui, v>_Gamma
//
//  auxiliary: Delta w + k^2 w = 0 outside D, d_nu w + lambda w = 0 on Gamma,
//             d_nu w = 0 on dD \ Gamma (nu = outward normal of D), solved on
//             the mesh restricted to the exterior of D:
//               a_pml(ws, v) - lambda <ws, v>_Gamma
//                   = <d_nu ui + lambda ui, v>_Gamma + <d_nu ui, v>_{dD\Gamma}
//
// The radial PML stretches r -> r + (i s0/k) (r - R_inner) (constant
// absorption by default) with a homogeneous Dirichlet condition on the outer
// circle. Far fields are read off by the Green representation on the tagged
// interior circle; the whole pipeline is complex symmetric, so transpose
// (not adjoint) solves are reused for the far field functionals.

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "screensig/farfield.hpp"
#include "screensig/fem.hpp"
#include "screensig/mesh.hpp"
#include "screensig/sigma.hpp"

namespace screensig {

struct PmlConfig {
  double R_inner = 3.0;
  double R_outer = 4.0;
  double s0 = 2.0;           // absorption strength
  int profile_exponent = 0;  // 0 = constant absorption in the collar

  void validate() const {
    if (!(R_inner < R_outer) || !(s0 > 0.0) || profile_exponent < 0)
      throw std::invalid_argument("PmlConfig: requires R_inner < R_outer, s0 > 0, p >= 0");
  }
};

struct IncidentField {
  enum class Kind { PlaneWave, PointSource };
  Kind kind = Kind::PlaneWave;
  Vec2 d{1.0, 0.0};          // unit direction (plane wave)
  Vec2 z{0.0, 0.0};          // source location (point source)
  double k = 1.0;
  complexd amplitude{1.0, 0.0};

  static IncidentField plane_wave(const Vec2& d, double k, complexd amplitude = 1.0) {
    if (std::abs(d.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("IncidentField: direction must be a unit vector");
    IncidentField f;
    f.kind = Kind::PlaneWave;
    f.d = d;
    f.k = k;
    f.amplitude = amplitude;
    return f;
  }
  static IncidentField point_source(const Vec2& z, double k, complexd amplitude = 1.0) {
    IncidentField f;
    f.kind = Kind::PointSource;
    f.z = z;
    f.k = k;
    f.amplitude = amplitude;
    return f;
  }

  complexd value(const Vec2& x) const {
    if (kind == Kind::PlaneWave) return amplitude * std::exp(complexd(0.0, k * d.dot(x)));
    return amplitude * fundamental_solution(k, x, z);
  }
  Eigen::Vector2cd gradient(const Vec2& x) const {
    if (kind == Kind::PlaneWave) {
      const complexd v = complexd(0.0, k) * value(x);
      return {v * d.x(), v * d.y()};
    }
    const double r = (x - z).norm();
    const complexd dr = -amplitude * complexd(0.0, 0.25) * k * hankel(1, 1.0, k * r);
    const Vec2 e = (x - z) / r;
    return {dr * e.x(), dr * e.y()};
  }
};

// A FEM field together with the mesh it lives on.
struct DiscreteField {
  const Mesh2D* mesh = nullptr;
  VecXc values;
  double k = 0.0;
};

namespace detail {

struct PmlCoeff {
  complexd d_rad, d_tan, mass;
};

inline PmlCoeff pml_coefficients(const Vec2& x, double k, const PmlConfig& pml) {
  const double r = x.norm();
  if (r <= pml.R_inner) return {1.0, 1.0, 1.0};
  const double w = pml.R_outer - pml.R_inner;
  const double t = (r - pml.R_inner) / w;
  const int p = pml.profile_exponent;
  const complexd i_s0_k(0.0, pml.s0 / k);
  const complexd s = 1.0 + i_s0_k * std::pow(t, p);
  const complexd rt = r + i_s0_k * (r - pml.R_inner) * std::pow(t, p) / (p + 1.0);
  return {rt / (s * r), s * r / rt, s * rt / r};
}

// Adjacency from tagged edges to their owning triangles.
struct EdgeAdjacency {
  struct Side {
    int tri = -1;
    int local_edge = -1;  // (0,1)->0, (1,2)->1, (2,0)->2
  };
  std::unordered_map<std::uint64_t, std::array<Side, 2>> sides;

  explicit EdgeAdjacency(const Mesh2D& mesh) {
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      for (int e = 0; e < 3; ++e) {
        const auto key = Mesh2D::edge_key(tri[e], tri[(e + 1) % 3]);
        auto& entry = sides[key];
        entry[entry[0].tri < 0 ? 0 : 1] = {t, e};
      }
    }
  }
};

} // namespace detail

// Complex P2 Helmholtz form with radial PML:
//   integral( D(x) grad u . grad v - k^2 m(x) u v )
inline SpMatC assemble_helmholtz_pml(const Mesh2D& mesh, double k, const PmlConfig& pml) {
  pml.validate();
  std::vector<Eigen::Triplet<complexd>> tr;
  tr.reserve(36 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto dofs = mesh.element_dofs(t);
    Eigen::Matrix<complexd, 6, 6> ke = Eigen::Matrix<complexd, 6, 6>::Zero();
    for (const auto& q : fem::tri_quadrature()) {
      const auto mp = fem::map_point(mesh, dofs, q.xi, q.eta, q.w);
      const auto c = detail::pml_coefficients(mp.x, k, pml);
      const double r = mp.x.norm();
      const Vec2 er = r > 1e-14 ? Vec2(mp.x / r) : Vec2(1.0, 0.0);
      for (int i = 0; i < 6; ++i) {
        const double gri = er.dot(mp.grad[i]);
        const Vec2 gti = mp.grad[i] - gri * er;
        for (int j = 0; j < 6; ++j) {
          const double grj = er.dot(mp.grad[j]);
          const Vec2 gtj = mp.grad[j] - grj * er;
          const complexd diff = c.d_rad * (gri * grj) + c.d_tan * gti.dot(gtj);
          ke(i, j) += mp.jac_weight * (diff - k * k * c.mass * mp.N[i] * mp.N[j]);
        }
      }
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) tr.emplace_back(dofs[i], dofs[j], ke(i, j));
  }
  SpMatC K(mesh.n_dofs(), mesh.n_dofs());
  K.setFromTriplets(tr.begin(), tr.end());
  return K;
}

// Keep the triangles selected by `keep` (called with the centroid); tagged
// edges whose endpoints survive and that border a kept triangle come along.
inline Mesh2D extract_submesh(const Mesh2D& mesh,
                              const std::function<bool(const Vec2&)>& keep) {
  Mesh2D out;
  std::vector<int> vmap(mesh.n_vertices(), -1);
  std::vector<char> tri_kept(mesh.n_triangles(), 0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    if (!keep(c)) continue;
    tri_kept[t] = 1;
    std::array<int, 3> nt;
    for (int e = 0; e < 3; ++e) {
      if (vmap[tri[e]] < 0) {
        vmap[tri[e]] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[tri[e]]);
      }
      nt[e] = vmap[tri[e]];
    }
    out.triangles.push_back(nt);
  }
  if (out.triangles.empty()) throw std::invalid_argument("extract_submesh: empty selection");

  // p2 nodes for surviving edges, positions copied from the parent
  std::unordered_map<std::uint64_t, int> seen;
  for (const auto& tri : out.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      const auto key = Mesh2D::edge_key(a, b);
      if (!seen.emplace(key, static_cast<int>(out.p2_positions.size())).second) continue;
      out.p2_edges.push_back({std::min(a, b), std::max(a, b)});
      out.p2_positions.push_back(Vec2::Zero());
    }
  // recover parent positions through the vertex map
  {
    std::vector<int> back(out.vertices.size(), -1);
    for (int v = 0; v < mesh.n_vertices(); ++v)
      if (vmap[v] >= 0) back[vmap[v]] = v;
    for (int i = 0; i < static_cast<int>(out.p2_edges.size()); ++i) {
      const int pa = back[out.p2_edges[i][0]], pb = back[out.p2_edges[i][1]];
      out.p2_positions[i] = mesh.p2_positions[mesh.p2_index(pa, pb)];
    }
  }

  detail::EdgeAdjacency adj(mesh);
  for (const auto& e : mesh.boundary_edges) {
    if (vmap[e.a] < 0 || vmap[e.b] < 0) continue;
    const auto it = adj.sides.find(Mesh2D::edge_key(e.a, e.b));
    bool borders_kept = false;
    for (const auto& s : it->second)
      if (s.tri >= 0 && tri_kept[s.tri]) borders_kept = true;
    if (borders_kept) out.boundary_edges.push_back({vmap[e.a], vmap[e.b], e.tag});
  }
  out.finalize();
  return out;
}

// Far field samples of a radiating discrete field by the Green representation
//   u_inf(xhat) = gamma_2 * integral_{C} ( u d_n e^{-ik xhat.y} - d_n u e^{-ik xhat.y} )
// over the tagged far field circle C (5-point Gauss per quadratic edge,
// normal gradients from the inner neighbour element).
inline VecXc extract_farfield(const DiscreteField& field, double R_ff,
                              const std::vector<Vec2>& directions) {
  const Mesh2D& mesh = *field.mesh;
  const double k = field.k;
  detail::EdgeAdjacency adj(mesh);
  const complexd gamma2 = farfield_constant(k);

  VecXc out = VecXc::Zero(static_cast<Eigen::Index>(directions.size()));
  bool found = false;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::FARFIELD_CIRCLE) continue;
    if (std::abs(mesh.vertices[e.a].norm() - R_ff) > 1e-9 * std::max(1.0, R_ff)) continue;
    found = true;

    // inner neighbour triangle provides the gradient
    const auto& sides = adj.sides.at(Mesh2D::edge_key(e.a, e.b));
    detail::EdgeAdjacency::Side inner{};
    for (const auto& s : sides) {
      if (s.tri < 0) continue;
      const auto& tri = mesh.triangles[s.tri];
      const Vec2 c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
      if (c.norm() < R_ff) inner = s;
    }
    if (inner.tri < 0)
      throw std::invalid_argument("extract_farfield: field not defined inside the circle");
    const auto& tri = mesh.triangles[inner.tri];
    const auto dofs = mesh.element_dofs(inner.tri);
    const int first = tri[inner.local_edge];

    for (const auto& q : fem::edge_quadrature()) {
      const auto ep = fem::map_edge_point(mesh, e, q.t, q.w);
      Vec2 n(ep.tangent.y(), -ep.tangent.x());
      n.normalize();
      if (n.dot(ep.x) < 0.0) n = -n;

      // reference coordinates of the same point inside the neighbour element
      const double s = (e.a == first) ? q.t : 1.0 - q.t;
      double xi = 0.0, eta = 0.0;
      switch (inner.local_edge) {
        case 0: xi = s; eta = 0.0; break;
        case 1: xi = 1.0 - s; eta = s; break;
        case 2: xi = 0.0; eta = 1.0 - s; break;
      }
      const auto mp = fem::map_point(mesh, dofs, xi, eta, 1.0);
      complexd u(0.0, 0.0), dun(0.0, 0.0);
      for (int i = 0; i < 6; ++i) {
        u += mp.N[i] * field.values[dofs[i]];
        dun += n.dot(mp.grad[i]) * field.values[dofs[i]];
      }

      for (std::size_t j = 0; j < directions.size(); ++j) {
        const Vec2& xhat = directions[j];
        const complexd phase = std::exp(complexd(0.0, -k * xhat.dot(ep.x)));
        const complexd dn_phase = complexd(0.0, -k * xhat.dot(n)) * phase;
        out[static_cast<Eigen::Index>(j)] += ep.line_weight * (u * dn_phase - dun * phase);
      }
    }
  }
  if (!found)
    throw std::invalid_argument("extract_farfield: no FARFIELD_CIRCLE edges at this radius");
  return gamma2 * out;
}

// Precomputed auxiliary-problem machinery: one factorization of the
// lambda-independent block, reduced onto the Gamma trace, from which the
// N x N far field matrix B(lambda) follows by a small dense solve per lambda.
class AuxFarFieldFamily {
 public:
  FarFieldMatrix matrix(complexd lambda) const {
    FarFieldMatrix F;
    F.k = k_;
    F.provenance = FarFieldProvenance::Aux;
    {
      std::ostringstream ss;
      ss << "lambda=" << lambda.real() << (lambda.imag() < 0 ? "-" : "+")
         << std::abs(lambda.imag()) << "i";
      F.params = ss.str();
    }
    const Eigen::MatrixXcd A = S0_ - lambda * T_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::MatrixXcd rhs = R0g_ + lambda * R1g_ - C0_;
    const Eigen::MatrixXcd ug = lu.solve(rhs);
    F.entries = alpha_ + G_.transpose() * ug;
    return F;
  }

  int directions() const { return static_cast<int>(alpha_.rows()); }

 private:
  friend class ExteriorModel;
  double k_ = 0.0;
  Eigen::MatrixXcd S0_, T_;          // n_g x n_g
  Eigen::MatrixXcd G_;               // n_g x N, column l: reduced functional
  Eigen::MatrixXcd alpha_;           // N x N, lambda-independent part
  Eigen::MatrixXcd R0g_, R1g_, C0_;  // n_g x N right-hand-side blocks
};

// Shared context for the scattering solves on one exterior geometry: the
// tagged mesh, the PML form, and the far field circle.
class ExteriorModel {
 public:
  ExteriorModel(const DomainSpec& inner, double k, double R_farfield = 2.0,
                const PmlConfig& pml = {}, double h_target = 0.0)
      : inner_(inner), k_(k), R_ff_(R_farfield), pml_(pml) {
    if (!(k > 0.0)) throw std::invalid_argument("ExteriorModel: requires k > 0");
    pml_.validate();
    if (h_target <= 0.0) h_target = (2.0 * pi / k) / 32.0;
    spec_ = DomainSpec::exterior_of(inner, R_farfield, pml_.R_inner, pml_.R_outer);
    mesh_ = generate_mesh(spec_, h_target);
    aux_mesh_ = extract_submesh(mesh_, [&](const Vec2& c) { return !domain_contains(spec_, c); });
    centroid_ = domain_centroid(inner);
  }

  const Mesh2D& mesh() const { return mesh_; }
  const Mesh2D& aux_mesh() const { return aux_mesh_; }
  const DomainSpec& inner() const { return inner_; }
  double k() const { return k_; }
  double R_farfield() const { return R_ff_; }
  const PmlConfig& pml() const { return pml_; }

  // ---- screen problem -------------------------------------------------

  using SigmaEval = std::function<complexd(const Vec2&)>;

  DiscreteField solve_screen(const SigmaProfile& sigma, const IncidentField& inc) const {
    return solve_screen(
        [&sigma](const Vec2& x) { return complexd(sigma_eval_point(sigma, x), 0.0); },
        inc, sigma.describe());
  }

  // general (possibly complex, Im >= 0) surface parameter
  DiscreteField solve_screen(const SigmaEval& sigma, const IncidentField& inc,
                             const std::string& key = "custom") const {
    const auto sys = screen_system(sigma, key);
    const VecXc rhs = sys->red.reduce_vector(screen_rhs(inc, sigma));
    const VecXc u = sys->lu.solve(rhs);
    if (sys->lu.info() != Eigen::Success)
      throw std::runtime_error("solve_screen: linear solve failed");
    return {&mesh_, sys->red.expand_vector(u), k_};
  }

  FarFieldMatrix screen_farfield_matrix(const SigmaProfile& sigma, int N) const {
    require_directions(N);
    const SigmaEval ev = [&sigma](const Vec2& x) {
      return complexd(sigma_eval_point(sigma, x), 0.0);
    };
    const auto sys = screen_system(ev, sigma.describe());
    const auto dirs = all_directions(N);
    FarFieldMatrix F;
    F.k = k_;
    F.provenance = FarFieldProvenance::Screen;
    F.params = "sigma=" + sigma.describe();
    F.entries.resize(N, N);
    for (int m = 0; m < N; ++m) {
      const auto inc = IncidentField::plane_wave(unit_direction(m, N), k_);
      const VecXc rhs = sys->red.reduce_vector(screen_rhs(inc, ev));
      const VecXc ur = sys->lu.solve(rhs);
      const VecXc u = sys->red.expand_vector(ur);
      F.entries.col(m) = extract_farfield({&mesh_, u, k_}, R_ff_, dirs);
    }
    return F;
  }

  // ---- auxiliary problem ----------------------------------------------

  DiscreteField solve_auxiliary(complexd lambda, const IncidentField& inc) const {
    if (lambda.imag() < 0.0)
      throw std::invalid_argument("solve_auxiliary: requires Im(lambda) >= 0");
    const auto& base = aux_system();
    VecXc rhs = base.red.reduce_vector(aux_rhs(inc, lambda));
    // K0 - lambda B on the reduced space, factored per call
    SpMatC K = base.K0 - lambda * base.B;
    Eigen::SparseLU<SpMatC> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve_auxiliary: factorization failed");
    const VecXc u = lu.solve(rhs);
    return {&aux_mesh_, base.red.expand_vector(u), k_};
  }

  FarFieldMatrix aux_farfield_matrix(complexd lambda, int N) const {
    return aux_family(N).matrix(lambda);
  }

  // Precompute the reduction for N incident directions; B(lambda) is then a
  // dense n_g solve per lambda.
  const AuxFarFieldFamily& aux_family(int N) const {
    require_directions(N);
    if (family_ && family_->directions() == N) return *family_;
    family_ = build_family(N);
    return *family_;
  }

 private:
  struct ScreenSystem {
    DofReduction red;
    Eigen::SparseLU<SpMatC> lu;
  };
  struct AuxBase {
    DofReduction red;
    SpMatC K0, B;  // reduced
    std::vector<int> gdofs_reduced;
  };

  void require_directions(int N) const {
    if (N < 2 || N % 2 != 0)
      throw std::invalid_argument("far field matrices require even N >= 2");
  }

  static std::vector<Vec2> all_directions(int N) {
    std::vector<Vec2> d;
    d.reserve(N);
    for (int j = 0; j < N; ++j) d.push_back(unit_direction(j, N));
    return d;
  }

  // outward (away from D) unit normal at an edge quadrature point
  Vec2 outward_normal(const fem::MappedEdgePoint& ep) const {
    Vec2 n(ep.tangent.y(), -ep.tangent.x());
    n.normalize();
    if (n.dot(ep.x - centroid_) < 0.0) n = -n;
    return n;
  }

  VecXc screen_rhs(const IncidentField& inc, const SigmaEval& sigma) const {
    VecXc rhs = VecXc::Zero(mesh_.n_dofs());
    for (const auto& e : mesh_.boundary_edges) {
      if (e.tag != BoundaryTag::GAMMA) continue;
      const auto dofs = fem::edge_dofs(mesh_, e);
      for (const auto& q : fem::edge_quadrature()) {
        const auto ep = fem::map_edge_point(mesh_, e, q.t, q.w);
        const complexd s = sigma(ep.x) * inc.value(ep.x);
        for (int i = 0; i < 3; ++i) rhs[dofs[i]] += ep.line_weight * s * ep.N[i];
      }
    }
    return rhs;
  }

  // r0 + lambda r1 with r0 = <d_nu ui, v>_{dD}, r1 = <ui, v>_Gamma
  void aux_rhs_parts(const IncidentField& inc, VecXc& r0, VecXc& r1) const {
    r0 = VecXc::Zero(aux_mesh_.n_dofs());
    r1 = VecXc::Zero(aux_mesh_.n_dofs());
    for (const auto& e : aux_mesh_.boundary_edges) {
      if (e.tag != BoundaryTag::GAMMA && e.tag != BoundaryTag::NEUMANN_REST) continue;
      const auto dofs = fem::edge_dofs(aux_mesh_, e);
      for (const auto& q : fem::edge_quadrature()) {
        const auto ep = fem::map_edge_point(aux_mesh_, e, q.t, q.w);
        const Vec2 nu = outward_normal(ep);
        const Eigen::Vector2cd g = inc.gradient(ep.x);
        const complexd dnu = nu.x() * g.x() + nu.y() * g.y();
        const complexd val = inc.value(ep.x);
        for (int i = 0; i < 3; ++i) {
          r0[dofs[i]] += ep.line_weight * dnu * ep.N[i];
          if (e.tag == BoundaryTag::GAMMA) r1[dofs[i]] += ep.line_weight * val * ep.N[i];
        }
      }
    }
  }

  VecXc aux_rhs(const IncidentField& inc, complexd lambda) const {
    VecXc r0, r1;
    aux_rhs_parts(inc, r0, r1);
    return r0 + lambda * r1;
  }

  const std::shared_ptr<ScreenSystem>& screen_system(const SigmaEval& sigma,
                                                     const std::string& key) const {
    if (!screen_sys_ || screen_key_ != key || key == "custom") {
      auto sys = std::make_shared<ScreenSystem>();
      const SpMatC K = assemble_helmholtz_pml(mesh_, k_, pml_);

      std::vector<Eigen::Triplet<complexd>> tr;
      for (const auto& e : mesh_.boundary_edges) {
        if (e.tag != BoundaryTag::GAMMA) continue;
        const auto dofs = fem::edge_dofs(mesh_, e);
        Eigen::Matrix3cd me = Eigen::Matrix3cd::Zero();
        for (const auto& q : fem::edge_quadrature()) {
          const auto ep = fem::map_edge_point(mesh_, e, q.t, q.w);
          const complexd c = sigma(ep.x);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) me(i, j) += ep.line_weight * c * ep.N[i] * ep.N[j];
        }
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) tr.emplace_back(dofs[i], dofs[j], me(i, j));
      }
      SpMatC Bs(mesh_.n_dofs(), mesh_.n_dofs());
      Bs.setFromTriplets(tr.begin(), tr.end());

      const SpMatC Ks = K - Bs;
      sys->red = DofReduction::eliminate(mesh_.n_dofs(),
                                         boundary_dofs(mesh_, BoundaryTag::PML_OUTER));
      const SpMatC Kr = sys->red.reduce(Ks);
      sys->lu.compute(Kr);
      if (sys->lu.info() != Eigen::Success)
        throw std::runtime_error("screen system: factorization failed");
      screen_sys_ = sys;
      screen_key_ = key;
    }
    return screen_sys_;
  }

  const AuxBase& aux_system() const {
    if (!aux_base_) {
      auto base = std::make_unique<AuxBase>();
      const SpMatC K0f = assemble_helmholtz_pml(aux_mesh_, k_, pml_);
      const SpMat Bf = assemble_boundary_mass(aux_mesh_, BoundaryTag::GAMMA);
      base->red = DofReduction::eliminate(aux_mesh_.n_dofs(),
                                          boundary_dofs(aux_mesh_, BoundaryTag::PML_OUTER));
      base->K0 = base->red.reduce(K0f);
      base->B = base->red.reduce(SpMatC(Bf.cast<complexd>()));
      for (int d : boundary_dofs(aux_mesh_, BoundaryTag::GAMMA))
        base->gdofs_reduced.push_back(base->red.full_to_reduced[d]);
      aux_base_ = std::move(base);
    }
    return *aux_base_;
  }

  std::unique_ptr<AuxFarFieldFamily> build_family(int N) const {
    const auto& base = aux_system();
    const int n = static_cast<int>(base.K0.rows());
    const int ng = static_cast<int>(base.gdofs_reduced.size());

    // partition reduced dofs into Gamma trace (g) and the rest (o)
    std::vector<int> which(n, -1);
    for (int i = 0; i < ng; ++i) which[base.gdofs_reduced[i]] = i;
    std::vector<int> others;
    others.reserve(n - ng);
    for (int i = 0; i < n; ++i)
      if (which[i] < 0) others.push_back(i);
    std::vector<int> opos(n, -1);
    const int no = static_cast<int>(others.size());
    for (int i = 0; i < no; ++i) opos[others[i]] = i;

    std::vector<Eigen::Triplet<complexd>> too, tog;
    Eigen::MatrixXcd Kgg = Eigen::MatrixXcd::Zero(ng, ng);
    for (int col = 0; col < base.K0.outerSize(); ++col)
      for (SpMatC::InnerIterator it(base.K0, col); it; ++it) {
        const int r = static_cast<int>(it.row());
        if (which[r] < 0 && which[col] < 0)
          too.emplace_back(opos[r], opos[col], it.value());
        else if (which[r] < 0 && which[col] >= 0)
          tog.emplace_back(opos[r], which[col], it.value());
        else if (which[r] >= 0 && which[col] >= 0)
          Kgg(which[r], which[col]) += it.value();
      }
    SpMatC Koo(no, no), Kog(no, ng);
    Koo.setFromTriplets(too.begin(), too.end());
    Kog.setFromTriplets(tog.begin(), tog.end());

    Eigen::SparseLU<SpMatC> lu;
    lu.compute(Koo);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("aux family: base factorization failed");

    auto fam = std::make_unique<AuxFarFieldFamily>();
    fam->k_ = k_;

    // Schur complement S0 = Kgg - Kog^T Koo^{-1} Kog, chunked to bound memory
    fam->S0_ = Kgg;
    const SpMatC KogT = Kog.transpose();
    const int chunk = 48;
    for (int c0 = 0; c0 < ng; c0 += chunk) {
      const int nc = std::min(chunk, ng - c0);
      const Eigen::MatrixXcd rhs_chunk = Eigen::MatrixXcd(Kog.middleCols(c0, nc));
      const Eigen::MatrixXcd X = lu.solve(rhs_chunk);
      fam->S0_.middleCols(c0, nc) -= KogT * X;
    }

    // T = B restricted to the trace block
    fam->T_ = Eigen::MatrixXcd::Zero(ng, ng);
    for (int col = 0; col < base.B.outerSize(); ++col)
      for (SpMatC::InnerIterator it(base.B, col); it; ++it) {
        const int r = static_cast<int>(it.row());
        if (which[r] >= 0 && which[col] >= 0)
          fam->T_(which[r], which[col]) += it.value();
      }

    // right-hand sides for all incident directions
    fam->R0g_.resize(ng, N);
    fam->R1g_.resize(ng, N);
    fam->C0_.resize(ng, N);
    fam->alpha_.resize(N, N);
    Eigen::MatrixXcd W0(no, N);  // Koo^{-1} r0_o
    for (int m = 0; m < N; ++m) {
      const auto inc = IncidentField::plane_wave(unit_direction(m, N), k_);
      VecXc r0f, r1f;
      aux_rhs_parts(inc, r0f, r1f);
      const VecXc r0 = base.red.reduce_vector(r0f);
      const VecXc r1 = base.red.reduce_vector(r1f);
      VecXc r0o(no);
      for (int i = 0; i < no; ++i) r0o[i] = r0[others[i]];
      for (int i = 0; i < ng; ++i) {
        fam->R0g_(i, m) = r0[base.gdofs_reduced[i]];
        fam->R1g_(i, m) = r1[base.gdofs_reduced[i]];
      }
      W0.col(m) = lu.solve(r0o);
    }
    fam->C0_ = KogT * W0;

    // far field functionals per observation direction, restricted and reduced
    const auto dirs = all_directions(N);
    Eigen::MatrixXcd Fg(ng, N);
    for (int l = 0; l < N; ++l) {
      const VecXc f = farfield_functional(dirs[l]);
      const VecXc fr = base.red.reduce_vector(f);
      VecXc fo(no);
      for (int i = 0; i < no; ++i) fo[i] = fr[others[i]];
      for (int i = 0; i < ng; ++i) Fg(i, l) = fr[base.gdofs_reduced[i]];
      const VecXc y = lu.solve(fo);
      fam->alpha_.row(l) = (W0.transpose() * fo).transpose();
      Fg.col(l) -= KogT * y;
    }
    fam->G_ = Fg;
    return fam;
  }

  // linear functional f with u_inf(xhat) = f^T u for fields on the aux mesh
  VecXc farfield_functional(const Vec2& xhat) const {
    VecXc f = VecXc::Zero(aux_mesh_.n_dofs());
    detail::EdgeAdjacency adj(aux_mesh_);
    const complexd gamma2 = farfield_constant(k_);
    for (const auto& e : aux_mesh_.boundary_edges) {
      if (e.tag != BoundaryTag::FARFIELD_CIRCLE) continue;
      const auto& sides = adj.sides.at(Mesh2D::edge_key(e.a, e.b));
      detail::EdgeAdjacency::Side inner{};
      for (const auto& s : sides) {
        if (s.tri < 0) continue;
        const auto& tri = aux_mesh_.triangles[s.tri];
        const Vec2 c =
            (aux_mesh_.vertices[tri[0]] + aux_mesh_.vertices[tri[1]] + aux_mesh_.vertices[tri[2]]) /
            3.0;
        if (c.norm() < R_ff_) inner = s;
      }
      const auto& tri = aux_mesh_.triangles[inner.tri];
      const auto dofs = aux_mesh_.element_dofs(inner.tri);
      const int first = tri[inner.local_edge];
      for (const auto& q : fem::edge_quadrature()) {
        const auto ep = fem::map_edge_point(aux_mesh_, e, q.t, q.w);
        Vec2 n(ep.tangent.y(), -ep.tangent.x());
        n.normalize();
        if (n.dot(ep.x) < 0.0) n = -n;
        const double s = (e.a == first) ? q.t : 1.0 - q.t;
        double xi = 0.0, eta = 0.0;
        switch (inner.local_edge) {
          case 0: xi = s; eta = 0.0; break;
          case 1: xi = 1.0 - s; eta = s; break;
          case 2: xi = 0.0; eta = 1.0 - s; break;
        }
        const auto mp = fem::map_point(aux_mesh_, dofs, xi, eta, 1.0);
        const complexd phase = std::exp(complexd(0.0, -k_ * xhat.dot(ep.x)));
        const complexd dn_phase = complexd(0.0, -k_ * xhat.dot(n)) * phase;
        for (int i = 0; i < 6; ++i)
          f[dofs[i]] += gamma2 * ep.line_weight *
                        (mp.N[i] * dn_phase - n.dot(mp.grad[i]) * phase);
      }
    }
    return f;
  }

  DomainSpec inner_;
  DomainSpec spec_;
  double k_;
  double R_ff_;
  PmlConfig pml_;
  Mesh2D mesh_, aux_mesh_;
  Vec2 centroid_;

  mutable std::shared_ptr<ScreenSystem> screen_sys_;
  mutable std::string screen_key_;
  mutable std::unique_ptr<AuxBase> aux_base_;
  mutable std::unique_ptr<AuxFarFieldFamily> family_;
};

} // namespace screensig
