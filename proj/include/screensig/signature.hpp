#pragma once

// Target-signature detection from far field matrices. The modified far field
// operator is M = A - B(lambda); for sampling points z inside D the Tikhonov
// regularized far field equation
//   g_z = (M* M + gamma I)^{-1} M* b_z,   b_{z,l} = Phi_inf(d_l, z)
// is solved and the quadrature-weighted L2(S) norm of g_z, averaged over the
// z sample, spikes when lambda hits a mixed Steklov eigenvalue. F_# and the
// quadratic GLSM surrogate provide the penalty-based variant.

#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "screensig/farfield.hpp"
#include "screensig/rng.hpp"
#include "screensig/sigma.hpp"
#include "screensig/steklov.hpp"

namespace screensig {

// entrywise A - B of far field matrices with matching discretizations
inline Eigen::MatrixXcd modified_operator(const FarFieldMatrix& A, const FarFieldMatrix& B) {
  if (A.N() != B.N())
    throw std::invalid_argument("modified_operator: direction counts differ");
  if (std::abs(A.k - B.k) > 1e-12 * std::max(1.0, A.k))
    throw std::invalid_argument("modified_operator: wavenumbers differ");
  return A.entries - B.entries;
}

// Tikhonov-regularized solution of M g = b_z and its weighted L2(S) norm.
struct TikhonovSolution {
  VecXc g;
  double norm = 0.0;  // sqrt(2 pi / N) * |g|_2
};

inline VecXc point_source_rhs(double k, int N, const Vec2& z) {
  VecXc b(N);
  for (int l = 0; l < N; ++l) b[l] = farfield_point_source(k, unit_direction(l, N), z);
  return b;
}

inline TikhonovSolution tikhonov_gz(const Eigen::MatrixXcd& M, const Vec2& z, double gamma,
                                    double k) {
  if (!(gamma > 0.0)) throw std::invalid_argument("tikhonov_gz: gamma must be positive");
  if (!M.allFinite()) throw std::invalid_argument("tikhonov_gz: non-finite entries in M");
  const int N = static_cast<int>(M.rows());
  const VecXc b = point_source_rhs(k, N, z);
  Eigen::MatrixXcd normal = M.adjoint() * M;
  normal.diagonal().array() += gamma;
  const Eigen::LLT<Eigen::MatrixXcd> llt(normal);
  TikhonovSolution sol;
  sol.g = llt.solve(M.adjoint() * b);
  sol.norm = std::sqrt(2.0 * pi / N) * sol.g.norm();
  return sol;
}

struct SweepConfig {
  double lambda_min = -8.0;
  double lambda_max = 8.0;
  double step = 0.05;
  double gamma = 1e-10;
  int n_z = 20;
  Vec2 z_center{0.0, 0.0};
  double z_radius = 0.1;
  std::uint64_t seed = 1;
  int N = 60;
  double min_prominence_ratio = 0.5;

  void validate() const {
    if (!(lambda_min < lambda_max) || !(step > 0.0) || !(gamma > 0.0) || n_z < 1 ||
        !(z_radius > 0.0) || N < 2)
      throw std::invalid_argument("SweepConfig: invalid parameters");
  }

  std::vector<double> grid() const {
    const int n = static_cast<int>(std::round((lambda_max - lambda_min) / step));
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = lambda_min + i * step;
    return g;
  }

  std::vector<Vec2> sample_points() const {
    Rng rng(seed);
    std::vector<Vec2> z(n_z);
    for (auto& p : z) p = rng.in_disk(z_center, z_radius);
    return z;
  }
};

struct Peak {
  double lambda = 0.0;   // sub-grid position (parabolic fit)
  double height = 0.0;
  bool unresolved = false;  // another peak within two grid steps
};

struct SweepCurve {
  std::vector<double> lambdas;
  std::vector<double> indicator;  // averaged ||g_z||, zero where invalid
  std::vector<char> valid;        // provider failures leave gaps
  std::vector<Peak> peaks;
  SweepConfig config;
};

// Local maxima whose topographic prominence exceeds ratio * median(indicator),
// refined by a three-point parabolic fit. Peaks closer than two grid steps
// are flagged unresolved.
inline std::vector<Peak> detect_peaks(const SweepCurve& curve, double min_prominence_ratio) {
  const auto& y = curve.indicator;
  const auto& x = curve.lambdas;
  const int n = static_cast<int>(y.size());
  if (n < 5) throw std::invalid_argument("detect_peaks: need at least 5 grid points");

  std::vector<double> vals;
  for (int i = 0; i < n; ++i)
    if (curve.valid.empty() || curve.valid[i]) vals.push_back(y[i]);
  if (vals.empty()) return {};
  std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
  const double median = vals[vals.size() / 2];

  auto ok = [&](int i) { return curve.valid.empty() || curve.valid[i]; };

  std::vector<Peak> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    if (!ok(i - 1) || !ok(i) || !ok(i + 1)) continue;
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;

    // prominence: drop to the highest of the two base valleys
    double left_min = y[i], right_min = y[i];
    for (int j = i - 1; j >= 0 && ok(j); --j) {
      if (y[j] > y[i]) break;
      left_min = std::min(left_min, y[j]);
    }
    for (int j = i + 1; j < n && ok(j); ++j) {
      if (y[j] > y[i]) break;
      right_min = std::min(right_min, y[j]);
    }
    const double prominence = y[i] - std::max(left_min, right_min);
    if (prominence < min_prominence_ratio * median) continue;

    Peak p;
    p.height = y[i];
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    p.lambda = x[i];
    if (denom < 0.0) {
      const double delta = 0.5 * (y[i - 1] - y[i + 1]) / denom;
      p.lambda = x[i] + std::clamp(delta, -0.5, 0.5) * (x[i + 1] - x[i]);
    }
    peaks.push_back(p);
  }

  const double step = n > 1 ? x[1] - x[0] : 0.0;
  for (std::size_t a = 0; a + 1 < peaks.size(); ++a)
    if (peaks[a + 1].lambda - peaks[a].lambda < 2.0 * step) {
      peaks[a].unresolved = true;
      peaks[a + 1].unresolved = true;
    }
  return peaks;
}

// Sweep the Steklov parameter: the provider yields B(lambda); the same seeded
// z sample is reused for every lambda, so curve variation reflects lambda only.
inline SweepCurve lsm_sweep(const FarFieldMatrix& A,
                            const std::function<FarFieldMatrix(double)>& aux_provider,
                            const SweepConfig& config) {
  config.validate();
  if (A.N() != config.N)
    throw std::invalid_argument("lsm_sweep: config.N does not match the screen matrix");

  SweepCurve curve;
  curve.config = config;
  curve.lambdas = config.grid();
  curve.indicator.assign(curve.lambdas.size(), 0.0);
  curve.valid.assign(curve.lambdas.size(), 0);
  const std::vector<Vec2> zs = config.sample_points();

  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    try {
      const FarFieldMatrix B = aux_provider(curve.lambdas[i]);
      const Eigen::MatrixXcd M = modified_operator(A, B);
      double acc = 0.0;
      for (const Vec2& z : zs) acc += tikhonov_gz(M, z, config.gamma, A.k).norm;
      curve.indicator[i] = acc / static_cast<double>(zs.size());
      curve.valid[i] = 1;
    } catch (const std::exception&) {
      curve.valid[i] = 0;  // gap; sweep continues
    }
  }
  curve.peaks = detect_peaks(curve, config.min_prominence_ratio);
  return curve;
}

// F_# = |Re(F)| - Im(F) with Re/Im the Hermitian parts and |.| through the
// eigendecomposition; quad_weight folds the L2(S) quadrature factor in.
inline Eigen::MatrixXcd fsharp(const Eigen::MatrixXcd& F, double quad_weight = 1.0) {
  if (F.rows() != F.cols()) throw std::invalid_argument("fsharp: matrix must be square");
  const Eigen::MatrixXcd T = quad_weight * F;
  const Eigen::MatrixXcd re = 0.5 * (T + T.adjoint());
  const Eigen::MatrixXcd im = (T - T.adjoint()) / complexd(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(re);
  if (es.info() != Eigen::Success) throw std::runtime_error("fsharp: eigendecomposition failed");
  const Eigen::MatrixXcd abs_re = es.eigenvectors() *
                                  es.eigenvalues().cwiseAbs().asDiagonal() *
                                  es.eigenvectors().adjoint();
  return abs_re - im;
}

enum class GlsmPenalty { Aux, FSharp };

struct GlsmResult {
  double penalty = 0.0;    // (W g, g) in the weighted inner product
  double exact_aux = 0.0;  // |(F^lambda g, g)|, Aux penalty only
  VecXc g;
};

// Quadratic GLSM surrogate: minimize alpha (W g, g) + |M g - b_z|^2 with
// W = fsharp(penalty_source) clipped to positive semidefinite.
inline GlsmResult glsm_indicator(const Eigen::MatrixXcd& M,
                                 const Eigen::MatrixXcd& penalty_source, GlsmPenalty kind,
                                 double alpha_reg, const Vec2& z, double k) {
  if (!(alpha_reg > 0.0)) throw std::invalid_argument("glsm_indicator: alpha must be positive");
  const int N = static_cast<int>(M.rows());

  const Eigen::MatrixXcd W0 = fsharp(penalty_source, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W0);
  if (es.info() != Eigen::Success) throw std::runtime_error("glsm_indicator: eigensolve failed");
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd W =
      es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();

  const VecXc b = point_source_rhs(k, N, z);
  Eigen::MatrixXcd lhs = alpha_reg * W + M.adjoint() * M;
  const Eigen::LDLT<Eigen::MatrixXcd> ldlt(lhs);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("glsm_indicator: singular surrogate system");
  GlsmResult res;
  res.g = ldlt.solve(M.adjoint() * b);
  if (!res.g.allFinite()) throw std::runtime_error("glsm_indicator: non-finite minimizer");
  const double w = 2.0 * pi / N;
  res.penalty = w * std::real(res.g.dot(W * res.g));
  if (kind == GlsmPenalty::Aux)
    res.exact_aux = w * std::abs(res.g.dot(penalty_source * res.g));
  return res;
}

// Relative eigenvalue changes (lambda_j(a,b) - lambda_j(0,0)) / lambda_j(0,0)
// for the banded sigma profile on a fixed mesh.
struct SensitivityRow {
  double alpha_p = 0.0, beta_p = 0.0;
  int j = 0;               // 1-based eigenvalue index
  double lambda = 0.0;
  double rel_change = 0.0;
  bool undefined = false;  // baseline eigenvalue too close to zero
};

inline std::vector<SensitivityRow> sensitivity_table(const Mesh2D& mesh, double k,
                                                     const std::vector<double>& alphas,
                                                     const std::vector<double>& betas,
                                                     int count) {
  const auto base = solve_steklov(mesh, k, SigmaProfile::angular(0.0, 0.0), count, false);
  std::vector<SensitivityRow> rows;
  for (double a : alphas)
    for (double b : betas) {
      const auto sp = solve_steklov(mesh, k, SigmaProfile::angular(a, b), count, false);
      for (int j = 0; j < static_cast<int>(sp.values.size()); ++j) {
        SensitivityRow r;
        r.alpha_p = a;
        r.beta_p = b;
        r.j = j + 1;
        r.lambda = sp.values[j].real();
        const double lam0 = base.values[j].real();
        if (std::abs(lam0) < 1e-8) {
          r.undefined = true;
        } else {
          r.rel_change = (r.lambda - lam0) / lam0;
        }
        rows.push_back(r);
      }
    }
  return rows;
}

// 1-level multiplicative complex Gaussian perturbation of the entries
inline FarFieldMatrix add_relative_noise(const FarFieldMatrix& F, double level,
                                         std::uint64_t seed) {
  Rng rng(seed);
  FarFieldMatrix out = F;
  for (int l = 0; l < F.N(); ++l)
    for (int m = 0; m < F.N(); ++m)
      out.entries(l, m) *= (1.0 + level * rng.complex_normal());
  return out;
}

// ---- CSV emission -------------------------------------------------------

inline void write_sweep_csv(const SweepCurve& curve, std::ostream& out) {
  out << "lambda,indicator,is_peak\n";
  auto near_peak = [&](double lam) {
    for (const auto& p : curve.peaks)
      if (std::abs(p.lambda - lam) <= 0.5 * curve.config.step) return true;
    return false;
  };
  char buf[96];
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    if (!curve.valid.empty() && !curve.valid[i]) continue;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", curve.lambdas[i], curve.indicator[i],
                  near_peak(curve.lambdas[i]) ? 1 : 0);
    out << buf;
  }
}

inline void write_sensitivity_csv(const std::vector<SensitivityRow>& rows, std::ostream& out) {
  out << "alpha,beta,j,lambda,rel_change\n";
  char buf[128];
  for (const auto& r : rows) {
    if (r.undefined) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,undefined\n", r.alpha_p, r.beta_p,
                    r.j, r.lambda);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g\n", r.alpha_p, r.beta_p, r.j,
                    r.lambda, r.rel_change);
    }
    out << buf;
  }
}

inline void write_spectrum_csv(const EigenSpectrum& sp, std::ostream& out) {
  out << "index,re_lambda,im_lambda\n";
  char buf[96];
  for (std::size_t j = 0; j < sp.values.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j, sp.values[j].real(),
                  sp.values[j].imag());
    out << buf;
  }
}

} // namespace screensig
