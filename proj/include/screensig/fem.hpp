#pragma once

// Scalar P2 Lagrange elements on Mesh2D. Elements are isoparametric: the
// geometry map uses the same quadratic shape functions as the field, so
// triangles with a projected arc midpoint follow the circle to O(h^3) while
// ordinary triangles reduce to the affine map.

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "screensig/mesh.hpp"

namespace screensig {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<complexd>;
using VecXc = Eigen::VectorXcd;
using VecX = Eigen::VectorXd;

namespace fem {

// reference shape functions; dof order (v0, v1, v2, m01, m12, m20)
inline std::array<double, 6> shape(double xi, double eta) {
  const double l1 = 1.0 - xi - eta, l2 = xi, l3 = eta;
  return {l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1),
          4 * l1 * l2,       4 * l2 * l3,       4 * l3 * l1};
}

inline std::array<std::array<double, 2>, 6> shape_grad(double xi, double eta) {
  const double l1 = 1.0 - xi - eta;
  return {{{1 - 4 * l1, 1 - 4 * l1},
           {4 * xi - 1, 0.0},
           {0.0, 4 * eta - 1},
           {4 * (l1 - xi), -4 * xi},
           {4 * eta, 4 * xi},
           {-4 * eta, 4 * (l1 - eta)}}};
}

// 7-point degree-5 rule on the reference triangle (weights sum to 1/2)
struct TriQuad {
  double xi, eta, w;
};
inline const std::array<TriQuad, 7>& tri_quadrature() {
  static const std::array<TriQuad, 7> q = [] {
    const double a = 0.059715871789770, b = 0.470142064105115;
    const double c = 0.797426985353087, d = 0.101286507323456;
    const double wc = 0.225, wa = 0.132394152788506, wb = 0.125939180544827;
    std::array<TriQuad, 7> r = {{{1.0 / 3.0, 1.0 / 3.0, wc},
                                 {a, b, wa},
                                 {b, a, wa},
                                 {b, b, wa},
                                 {c, d, wb},
                                 {d, c, wb},
                                 {d, d, wb}}};
    for (auto& p : r) p.w *= 0.5;
    return r;
  }();
  return q;
}

// 5-point Gauss rule on [0,1] (weights sum to 1)
struct LineQuad {
  double t, w;
};
inline const std::array<LineQuad, 5>& edge_quadrature() {
  static const std::array<LineQuad, 5> q = {{{0.046910077030668, 0.118463442528095},
                                             {0.230765344947158, 0.239314335249683},
                                             {0.5, 0.284444444444444},
                                             {0.769234655052841, 0.239314335249683},
                                             {0.953089922969332, 0.118463442528095}}};
  return q;
}

// 1D quadratic trace shapes on an edge, dof order (a, b, midpoint)
inline std::array<double, 3> edge_shape(double t) {
  return {(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)};
}
inline std::array<double, 3> edge_shape_dt(double t) {
  return {4 * t - 3, 4 * t - 1, 4 - 8 * t};
}

// Geometry of one isoparametric element at one quadrature point.
struct MappedPoint {
  Vec2 x;                          // physical position
  double jac_weight;               // |det J| * quadrature weight
  std::array<double, 6> N;         // shape values
  std::array<Vec2, 6> grad;        // physical gradients
};

inline MappedPoint map_point(const Mesh2D& mesh, const std::array<int, 6>& dofs,
                             double xi, double eta, double w) {
  MappedPoint mp;
  mp.N = shape(xi, eta);
  const auto dN = shape_grad(xi, eta);
  Vec2 x(0, 0), dxi(0, 0), deta(0, 0);
  for (int i = 0; i < 6; ++i) {
    const Vec2 p = mesh.node_position(dofs[i]);
    x += mp.N[i] * p;
    dxi += dN[i][0] * p;
    deta += dN[i][1] * p;
  }
  const double det = dxi.x() * deta.y() - dxi.y() * deta.x();
  if (det <= 0.0) throw std::runtime_error("fem: element with non-positive Jacobian");
  // grad N = (dN/dxi * rot(deta) + dN/deta * rot(-dxi)) / det
  const Vec2 gxi(deta.y() / det, -deta.x() / det);
  const Vec2 geta(-dxi.y() / det, dxi.x() / det);
  for (int i = 0; i < 6; ++i) mp.grad[i] = dN[i][0] * gxi + dN[i][1] * geta;
  mp.x = x;
  mp.jac_weight = det * w;
  return mp;
}

// Geometry of one (possibly curved) tagged edge at one quadrature point.
struct MappedEdgePoint {
  Vec2 x;
  Vec2 tangent;      // unnormalized dx/dt
  double line_weight;  // |dx/dt| * quadrature weight
  std::array<double, 3> N;
};

inline MappedEdgePoint map_edge_point(const Mesh2D& mesh, const BoundaryEdge& e,
                                      double t, double w) {
  MappedEdgePoint mp;
  mp.N = edge_shape(t);
  const auto dN = edge_shape_dt(t);
  const Vec2 pa = mesh.vertices[e.a];
  const Vec2 pb = mesh.vertices[e.b];
  const Vec2 pm = mesh.p2_positions[mesh.p2_index(e.a, e.b)];
  mp.x = mp.N[0] * pa + mp.N[1] * pb + mp.N[2] * pm;
  mp.tangent = dN[0] * pa + dN[1] * pb + dN[2] * pm;
  mp.line_weight = mp.tangent.norm() * w;
  return mp;
}

inline std::array<int, 3> edge_dofs(const Mesh2D& mesh, const BoundaryEdge& e) {
  return {e.a, e.b, mesh.n_vertices() + mesh.p2_index(e.a, e.b)};
}

} // namespace fem

// Stiffness and mass matrices (coefficient one) assembled together.
inline void assemble_stiffness_mass(const Mesh2D& mesh, SpMat& stiffness, SpMat& mass) {
  const int n = mesh.n_dofs();
  std::vector<Eigen::Triplet<double>> ts, tm;
  ts.reserve(36 * mesh.n_triangles());
  tm.reserve(36 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto dofs = mesh.element_dofs(t);
    Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> me = Eigen::Matrix<double, 6, 6>::Zero();
    for (const auto& q : fem::tri_quadrature()) {
      const auto mp = fem::map_point(mesh, dofs, q.xi, q.eta, q.w);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          ke(i, j) += mp.jac_weight * mp.grad[i].dot(mp.grad[j]);
          me(i, j) += mp.jac_weight * mp.N[i] * mp.N[j];
        }
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        ts.emplace_back(dofs[i], dofs[j], ke(i, j));
        tm.emplace_back(dofs[i], dofs[j], me(i, j));
      }
  }
  stiffness.resize(n, n);
  stiffness.setFromTriplets(ts.begin(), ts.end());
  mass.resize(n, n);
  mass.setFromTriplets(tm.begin(), tm.end());
}

// Boundary mass on edges with the given tag, weighted by `weight(x)`.
inline SpMat assemble_boundary_mass(const Mesh2D& mesh, BoundaryTag tag,
                                    const std::function<double(const Vec2&)>& weight = {}) {
  const int n = mesh.n_dofs();
  std::vector<Eigen::Triplet<double>> tr;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    const auto dofs = fem::edge_dofs(mesh, e);
    Eigen::Matrix3d me = Eigen::Matrix3d::Zero();
    for (const auto& q : fem::edge_quadrature()) {
      const auto mp = fem::map_edge_point(mesh, e, q.t, q.w);
      const double c = weight ? weight(mp.x) : 1.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) me(i, j) += mp.line_weight * c * mp.N[i] * mp.N[j];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tr.emplace_back(dofs[i], dofs[j], me(i, j));
  }
  SpMat B(n, n);
  B.setFromTriplets(tr.begin(), tr.end());
  return B;
}

// Sorted unique dof indices supported on edges with the given tag.
inline std::vector<int> boundary_dofs(const Mesh2D& mesh, BoundaryTag tag) {
  std::vector<char> mark(mesh.n_dofs(), 0);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    for (int d : fem::edge_dofs(mesh, e)) mark[d] = 1;
  }
  std::vector<int> out;
  for (int d = 0; d < mesh.n_dofs(); ++d)
    if (mark[d]) out.push_back(d);
  return out;
}

// Elimination of a set of dofs (homogeneous Dirichlet): keeps the complement
// and provides scatter/gather between full and reduced vectors.
struct DofReduction {
  std::vector<int> full_to_reduced;  // -1 where eliminated
  std::vector<int> reduced_to_full;

  static DofReduction eliminate(int n_full, const std::vector<int>& eliminated) {
    DofReduction r;
    r.full_to_reduced.assign(n_full, 0);
    for (int d : eliminated) r.full_to_reduced[d] = -1;
    for (int d = 0; d < n_full; ++d)
      if (r.full_to_reduced[d] == 0) {
        r.full_to_reduced[d] = static_cast<int>(r.reduced_to_full.size());
        r.reduced_to_full.push_back(d);
      }
    return r;
  }

  int n_reduced() const { return static_cast<int>(reduced_to_full.size()); }

  template <typename Scalar>
  Eigen::SparseMatrix<Scalar> reduce(const Eigen::SparseMatrix<Scalar>& K) const {
    std::vector<Eigen::Triplet<Scalar>> tr;
    tr.reserve(K.nonZeros());
    for (int col = 0; col < K.outerSize(); ++col) {
      const int jc = full_to_reduced[col];
      if (jc < 0) continue;
      for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(K, col); it; ++it) {
        const int ir = full_to_reduced[it.row()];
        if (ir >= 0) tr.emplace_back(ir, jc, it.value());
      }
    }
    Eigen::SparseMatrix<Scalar> R(n_reduced(), n_reduced());
    R.setFromTriplets(tr.begin(), tr.end());
    return R;
  }

  // concrete vector arguments: lazy Eigen expressions must be evaluated
  // before element-wise gathering
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
  reduce_vector(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r(n_reduced());
    for (int i = 0; i < n_reduced(); ++i) r[i] = v[reduced_to_full[i]];
    return r;
  }

  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
  expand_vector(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(full_to_reduced.size());
    for (int i = 0; i < n_reduced(); ++i) r[reduced_to_full[i]] = v[i];
    return r;
  }
};

} // namespace screensig
