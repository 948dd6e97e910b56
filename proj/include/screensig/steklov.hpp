#pragma once

// Finite element solution of the mixed Steklov eigenvalue problem
//   Delta h + k^2 h = 0 in D,  d_nu h - sigma h = -lambda h on Gamma,
//   d_nu h = 0 on dD \ Gamma,
// discretized with P2 elements:
//   (grad w, grad v) - k^2 (w, v) - <sigma w, v>_Gamma = -lambda <w, v>_Gamma.
// The pencil K w = -lambda B w is reduced by a Schur complement onto the
// Gamma trace dofs (B is supported there and positive definite on its
// support), then solved densely. Also: the mixed Dirichlet/Neumann
// admissibility check, the first Robin-Neumann eigenvalue, and the first
// order perturbation of the top eigenvalue in sigma.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "screensig/fem.hpp"
#include "screensig/rng.hpp"
#include "screensig/sigma.hpp"

namespace screensig {

struct SteklovPencil {
  SpMat K;  // stiffness - k^2 mass - Gamma-weighted sigma mass
  SpMat B;  // Gamma boundary mass
  std::vector<int> gamma_dofs;
};

inline SteklovPencil assemble_pencil(const Mesh2D& mesh, double k, const SigmaProfile& sigma) {
  if (!(k > 0.0)) throw std::invalid_argument("assemble_pencil: requires k > 0");
  SteklovPencil p;
  p.gamma_dofs = boundary_dofs(mesh, BoundaryTag::GAMMA);
  if (p.gamma_dofs.empty())
    throw std::invalid_argument("assemble_pencil: mesh has no GAMMA edges");
  SpMat A, M;
  assemble_stiffness_mass(mesh, A, M);
  p.B = assemble_boundary_mass(mesh, BoundaryTag::GAMMA);
  const SpMat Bs = assemble_boundary_mass(
      mesh, BoundaryTag::GAMMA, [&](const Vec2& x) { return sigma_eval_point(sigma, x); });
  p.K = A - k * k * M - Bs;
  return p;
}

struct EigenSpectrum {
  std::vector<complexd> values;     // sorted by descending real part
  Eigen::MatrixXd gamma_traces;     // column j: trace of eigenvector j on Gamma
  std::vector<int> gamma_dofs;      // rows of gamma_traces, as mesh dof ids
  double mesh_h = 0.0;
  double k = 0.0;
  std::string sigma;
  std::vector<std::string> warnings;
};

namespace detail {

// Dense Schur complement of K onto `gdofs` plus the reduced B block.
inline void schur_reduce(const SpMat& K, const SpMat& B, const std::vector<int>& gdofs,
                         Eigen::MatrixXd& S, Eigen::MatrixXd& Bg) {
  const int n = static_cast<int>(K.rows());
  const int ng = static_cast<int>(gdofs.size());
  std::vector<int> which(n, -1);  // >=0: gamma index
  for (int i = 0; i < ng; ++i) which[gdofs[i]] = i;
  std::vector<int> others;
  others.reserve(n - ng);
  for (int i = 0; i < n; ++i)
    if (which[i] < 0) others.push_back(i);
  std::vector<int> opos(n, -1);
  for (std::size_t i = 0; i < others.size(); ++i) opos[others[i]] = static_cast<int>(i);
  const int no = static_cast<int>(others.size());

  std::vector<Eigen::Triplet<double>> too;
  Eigen::MatrixXd Kog = Eigen::MatrixXd::Zero(no, ng);
  Eigen::MatrixXd Kgg = Eigen::MatrixXd::Zero(ng, ng);
  for (int col = 0; col < K.outerSize(); ++col)
    for (SpMat::InnerIterator it(K, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = col;
      if (which[r] < 0 && which[c] < 0)
        too.emplace_back(opos[r], opos[c], it.value());
      else if (which[r] < 0 && which[c] >= 0)
        Kog(opos[r], which[c]) += it.value();
      else if (which[r] >= 0 && which[c] >= 0)
        Kgg(which[r], which[c]) += it.value();
    }
  SpMat Koo(no, no);
  Koo.setFromTriplets(too.begin(), too.end());

  Eigen::SparseLU<SpMat> lu;
  lu.compute(Koo);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error(
        "steklov: interior block is singular (k^2 at a mixed Dirichlet-Neumann "
        "eigenvalue of the domain?)");
  const Eigen::MatrixXd X = lu.solve(Kog);
  S = Kgg - Kog.transpose() * X;
  S = 0.5 * (S + S.transpose()).eval();

  Bg = Eigen::MatrixXd::Zero(ng, ng);
  for (int col = 0; col < B.outerSize(); ++col)
    for (SpMat::InnerIterator it(B, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (which[r] >= 0 && which[col] >= 0) Bg(which[r], which[col]) += it.value();
    }
}

} // namespace detail

struct AdmissibilityReport {
  bool admissible = false;
  double nearest_mixed_eig = 0.0;
  std::vector<double> mixed_eigs;  // ascending
};

// Smallest eigenvalues of A x = mu M x (both symmetric, A + shift*M SPD) by
// inverse subspace iteration with Rayleigh-Ritz.
inline std::vector<double> smallest_generalized_eigs(const SpMat& A, const SpMat& M, int nev,
                                                     double shift = 0.0, double tol = 1e-9,
                                                     int maxit = 60) {
  const int n = static_cast<int>(A.rows());
  const int q = std::min(n, std::max(2 * nev, nev + 6));
  SpMat As = A;
  if (shift != 0.0) As = A + shift * M;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(As);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("smallest_generalized_eigs: factorization failed");

  Rng rng(20240901u);
  Eigen::MatrixXd X(n, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.uniform() - 0.5;

  std::vector<double> prev(nev, 1e300);
  Eigen::VectorXd ritz;
  for (int it = 0; it < maxit; ++it) {
    const Eigen::MatrixXd Z = lu.solve(M * X);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Z)
                                  .householderQ() *
                              Eigen::MatrixXd::Identity(n, q);
    const Eigen::MatrixXd GA = Q.transpose() * (A.selfadjointView<Eigen::Lower>() * Q);
    const Eigen::MatrixXd GM = Q.transpose() * (M.selfadjointView<Eigen::Lower>() * Q);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (GA + GA.transpose()), 0.5 * (GM + GM.transpose()));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("smallest_generalized_eigs: dense solve failed");
    ritz = es.eigenvalues();
    X = Q * es.eigenvectors();

    double change = 0.0;
    for (int i = 0; i < nev; ++i)
      change = std::max(change, std::abs(ritz[i] - prev[i]) /
                                    std::max(1.0, std::abs(ritz[i])));
    for (int i = 0; i < nev; ++i) prev[i] = ritz[i];
    if (change < tol && it >= 3) break;
  }
  return std::vector<double>(prev.begin(), prev.end());
}

// Assumption check: k^2 must stay away from the eigenvalues of -Delta with
// u = 0 on Gamma and d_nu u = 0 on the rest of the boundary.
inline AdmissibilityReport check_wavenumber_admissible(const Mesh2D& mesh, double k,
                                                       int nev = 10) {
  SpMat A, M;
  assemble_stiffness_mass(mesh, A, M);
  const auto gdofs = boundary_dofs(mesh, BoundaryTag::GAMMA);
  if (gdofs.empty())
    throw std::invalid_argument("check_wavenumber_admissible: mesh has no GAMMA edges");
  const auto red = DofReduction::eliminate(mesh.n_dofs(), gdofs);
  const SpMat Ar = red.reduce(A), Mr = red.reduce(M);

  AdmissibilityReport rep;
  rep.mixed_eigs = smallest_generalized_eigs(Ar, Mr, nev, 0.0, 1e-8, 40);
  const double k2 = k * k;
  double best = 1e300;
  for (double mu : rep.mixed_eigs)
    if (std::abs(mu - k2) < std::abs(best - k2)) best = mu;
  rep.nearest_mixed_eig = best;
  rep.admissible = std::abs(best - k2) > 1e-2 * k2;
  // if k^2 is beyond all computed eigenvalues the answer is unreliable;
  // extend the window rather than report a false positive
  if (!rep.mixed_eigs.empty() && k2 > rep.mixed_eigs.back()) {
    rep.mixed_eigs = smallest_generalized_eigs(Ar, Mr, 4 * nev, 0.0, 1e-8, 60);
    best = 1e300;
    for (double mu : rep.mixed_eigs)
      if (std::abs(mu - k2) < std::abs(best - k2)) best = mu;
    rep.nearest_mixed_eig = best;
    rep.admissible = std::abs(best - k2) > 1e-2 * k2;
  }
  return rep;
}

// The `count` largest-real-part eigenvalues of K w = -lambda B w with
// B-normalized Gamma traces.
inline EigenSpectrum solve_steklov(const Mesh2D& mesh, double k, const SigmaProfile& sigma,
                                   int count, bool check_admissible = true) {
  if (count < 1) throw std::invalid_argument("solve_steklov: count must be >= 1");
  if (check_admissible) {
    const auto rep = check_wavenumber_admissible(mesh, k);
    if (!rep.admissible)
      throw std::runtime_error(
          "solve_steklov: k^2 is within 1% of a mixed Dirichlet-Neumann eigenvalue (" +
          std::to_string(rep.nearest_mixed_eig) + "); pass check_admissible=false to force");
  }

  const SteklovPencil p = assemble_pencil(mesh, k, sigma);
  EigenSpectrum out;
  out.gamma_dofs = p.gamma_dofs;
  out.mesh_h = mesh.h_max;
  out.k = k;
  out.sigma = sigma.describe();

  const int ng = static_cast<int>(p.gamma_dofs.size());
  int want = count;
  if (want > ng) {
    out.warnings.push_back("count capped to " + std::to_string(ng) + " Gamma dofs");
    want = ng;
  }

  Eigen::MatrixXd S, Bg;
  detail::schur_reduce(p.K, p.B, p.gamma_dofs, S, Bg);

  // K w = -lambda B w restricted to the trace: S wg = -lambda Bg wg
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Bg);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_steklov: dense generalized eigensolver failed");

  // mu ascending => lambda = -mu descending
  out.values.reserve(want);
  out.gamma_traces.resize(ng, want);
  for (int j = 0; j < want; ++j) {
    out.values.emplace_back(-es.eigenvalues()[j], 0.0);
    out.gamma_traces.col(j) = es.eigenvectors().col(j);
  }
  return out;
}

// First mixed Robin-Neumann eigenvalue
//   tau_1 = inf ( |grad u|^2 + alpha |u|^2_Gamma ) / |u|^2.
inline double robin_neumann_tau1(const Mesh2D& mesh, double alpha_robin) {
  if (!(alpha_robin >= 0.0))
    throw std::invalid_argument("robin_neumann_tau1: requires alpha >= 0");
  SpMat A, M;
  assemble_stiffness_mass(mesh, A, M);
  const SpMat Bg = assemble_boundary_mass(mesh, BoundaryTag::GAMMA);
  const SpMat R = A + alpha_robin * Bg;
  // shift by M to keep the factorized operator definite at alpha = 0
  const auto eigs = smallest_generalized_eigs(R, M, 1, 1.0, 1e-10, 60);
  return eigs[0];
}

// First order change of the largest eigenvalue under sigma0 -> sigma0 + eps*sigma1:
//   lambda_dot = <sigma1 h0, h0>_Gamma / <h0, h0>_Gamma.
inline double perturb_first_order(const Mesh2D& mesh, double k, const SigmaProfile& sigma0,
                                  const SigmaProfile& sigma1) {
  const EigenSpectrum sp = solve_steklov(mesh, k, sigma0, 2, false);
  if (sp.values.size() >= 2 &&
      std::abs(sp.values[0].real() - sp.values[1].real()) < 1e-6)
    throw std::runtime_error("perturb_first_order: largest eigenvalue is (nearly) multiple");

  const SpMat B1 = assemble_boundary_mass(
      mesh, BoundaryTag::GAMMA, [&](const Vec2& x) { return sigma_eval_point(sigma1, x); });
  const SpMat B = assemble_boundary_mass(mesh, BoundaryTag::GAMMA);

  VecX h0 = VecX::Zero(mesh.n_dofs());
  for (std::size_t i = 0; i < sp.gamma_dofs.size(); ++i)
    h0[sp.gamma_dofs[i]] = sp.gamma_traces(static_cast<int>(i), 0);
  const double num = h0.dot(B1.selfadjointView<Eigen::Lower>() * h0);
  const double den = h0.dot(B.selfadjointView<Eigen::Lower>() * h0);
  return num / den;
}

// Trace of an eigenvector as a curve over the arc-length parameter of the
// screen (sector screens: s = r2 * theta).
inline std::vector<std::pair<double, double>> trace_curve(const Mesh2D& mesh,
                                                          const EigenSpectrum& sp, int j) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(sp.gamma_dofs.size());
  for (std::size_t i = 0; i < sp.gamma_dofs.size(); ++i) {
    const Vec2 x = mesh.node_position(sp.gamma_dofs[i]);
    double th = std::atan2(x.y(), x.x());
    if (th < -pi / 2) th += 2.0 * pi;
    pts.emplace_back(th * x.norm(), sp.gamma_traces(static_cast<int>(i), j));
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

} // namespace screensig
