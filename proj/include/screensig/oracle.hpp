#pragma once

// Separation-of-variables reference spectra and fields used to validate the
// finite element solvers: mixed Steklov eigenvalues of circular and annular
// sectors, the corresponding sector eigenfunctions, and the far field of the
// exterior impedance disk problem.

#include <vector>

#include "screensig/farfield.hpp"
#include "screensig/specfun.hpp"

namespace screensig {

// The separable modes satisfy d_nu u = lambda0 u on the Steklov arc with
// lambda0_n = k J'_nu(k r2) / J_nu(k r2), nu = n pi / alpha. Two bookkeeping
// conventions for reporting eigenvalues with a surface parameter sigma:
//   Appendix: lambda_n = sigma + lambda0_n   (d_nu u = lambda u at sigma = 0)
//   Main:     lambda_n = sigma - lambda0_n   (d_nu h - sigma h = -lambda h)
// Main is what the finite element pencil and the detection pipeline use; see
// steklov.hpp.
enum class SignConvention { Appendix, Main };

struct SpectrumEntry {
  int n = 0;          // angular mode index
  double lambda = 0;  // eigenvalue in the requested convention
  bool pole = false;  // k^2 is a mixed eigenvalue for this mode; lambda invalid
};

namespace detail {
inline double apply_convention(double lambda0, double sigma, SignConvention conv) {
  return conv == SignConvention::Appendix ? sigma + lambda0 : sigma - lambda0;
}
} // namespace detail

// Mixed Steklov spectrum of the circular sector {0<r<r2, 0<theta<alpha};
// Steklov condition on the arc r = r2, Neumann on the radii.
inline std::vector<SpectrumEntry> sector_spectrum(double k, double alpha, double r2,
                                                  double sigma_const, int count,
                                                  SignConvention conv) {
  if (!(k > 0.0) || !(alpha > 0.0 && alpha < 2.0 * pi) || !(r2 > 0.0) || count < 1)
    throw std::invalid_argument("sector_spectrum: invalid parameters");
  std::vector<SpectrumEntry> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    SpectrumEntry e;
    e.n = n;
    const double nu = n * pi / alpha;
    const double jn = bessel_j(nu, k * r2);
    if (std::abs(jn) < 1e-12) {
      e.pole = true;
    } else {
      const double lambda0 = k * bessel_j_prime(nu, k * r2) / jn;
      e.lambda = detail::apply_convention(lambda0, sigma_const, conv);
    }
    out.push_back(e);
  }
  return out;
}

// Mixed Steklov spectrum of the annular sector {r1<r<r2, 0<theta<alpha};
// Steklov condition on the outer arc r = r2, Neumann on r = r1 and the radii.
// The Hankel-quotient eigenvalue formula is evaluated in its real J/Y form
//   lambda0 = k (J'(a)Y'(b) - Y'(a)J'(b)) / (J'(a)Y(b) - Y'(a)J(b)),
// a = k r1, b = k r2, which is algebraically identical but avoids the
// catastrophic cancellation of the H^(1)/H^(2) combination at large order.
inline std::vector<SpectrumEntry> annular_spectrum(double k, double alpha, double r1,
                                                   double r2, double sigma_const, int count,
                                                   SignConvention conv) {
  if (!(k > 0.0) || !(alpha > 0.0 && alpha < 2.0 * pi) || !(0.0 < r1 && r1 < r2) || count < 1)
    throw std::invalid_argument("annular_spectrum: invalid parameters");
  const double a = k * r1, b = k * r2;
  std::vector<SpectrumEntry> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    SpectrumEntry e;
    e.n = n;
    const double nu = n * pi / alpha;
    const double ja = bessel_j_prime(nu, a), ya = bessel_y_prime(nu, a);
    const double num = ja * bessel_y_prime(nu, b) - ya * bessel_j_prime(nu, b);
    const double den = ja * bessel_y(nu, b) - ya * bessel_j(nu, b);
    const double scale = std::abs(ja * bessel_y(nu, b)) + std::abs(ya * bessel_j(nu, b));
    if (std::abs(den) < 1e-12 * std::max(1.0, scale)) {
      e.pole = true;
    } else {
      e.lambda = detail::apply_convention(k * num / den, sigma_const, conv);
    }
    out.push_back(e);
  }
  return out;
}

// Pointwise sector eigenfunction u(r,theta) = cos(n pi theta / alpha)
// J_{n pi/alpha}(k r), normalized to max modulus 1 over the given points.
inline std::vector<double> sector_eigenfunction(int n, double k, double alpha, double r2,
                                                const std::vector<Vec2>& points) {
  if (n < 0 || !(k > 0.0) || !(alpha > 0.0 && alpha < 2.0 * pi) || !(r2 > 0.0))
    throw std::invalid_argument("sector_eigenfunction: invalid parameters");
  const double nu = n * pi / alpha;
  std::vector<double> vals;
  vals.reserve(points.size());
  double peak = 0.0;
  for (const Vec2& p : points) {
    const double r = p.norm();
    double th = std::atan2(p.y(), p.x());
    if (th < 0.0) th += 2.0 * pi;
    if (r > r2 * (1.0 + 1e-12) || th > alpha + 1e-12)
      throw std::domain_error("sector_eigenfunction: point outside the sector");
    const double u = std::cos(nu * th) * bessel_j(nu, k * r);
    vals.push_back(u);
    peak = std::max(peak, std::abs(u));
  }
  if (peak > 0.0)
    for (double& v : vals) v /= peak;
  return vals;
}

// Far field matrix of the exterior impedance problem for the disk of radius R:
//   Delta w + k^2 w = 0 outside, d_r w + lambda w = 0 on r = R, w = u^i + w^s.
// Fourier-Hankel series; entry (l,m) is w_inf(d_l; d_m). The series is
// truncated once terms fall below 1e-12; failure to converge within the cap
// reports a truncation error.
inline FarFieldMatrix impedance_disk_farfield(double k, complexd lambda_imp, double R,
                                              int N) {
  if (!(k > 0.0) || !(R > 0.0) || N < 1)
    throw std::invalid_argument("impedance_disk_farfield: invalid parameters");
  if (lambda_imp.imag() < 0.0)
    throw std::invalid_argument("impedance_disk_farfield: requires Im(lambda) >= 0");

  const double x = k * R;
  const int cap = 200 + static_cast<int>(8.0 * x);
  std::vector<complexd> q;
  int tail = 0;
  for (int n = 0; n <= cap; ++n) {
    const complexd jn(bessel_j(n, x), 0.0);
    const complexd jpn(bessel_j_prime(n, x), 0.0);
    const complexd qn = (k * jpn + lambda_imp * jn) /
                        (k * hankel_prime(1, n, x) + lambda_imp * hankel(1, n, x));
    q.push_back(qn);
    tail = std::abs(qn) < 1e-12 ? tail + 1 : 0;
    if (tail >= 3) break;
  }
  if (tail < 3)
    throw std::runtime_error("impedance_disk_farfield: series did not converge within cap");

  const complexd amp = -std::sqrt(2.0 / (pi * k)) * std::polar(1.0, -0.25 * pi);
  FarFieldMatrix F;
  F.k = k;
  F.provenance = FarFieldProvenance::Oracle;
  F.entries.resize(N, N);
  // kernel depends only on the angle between observation and incidence
  std::vector<complexd> kernel(N);
  for (int d = 0; d < N; ++d) {
    const double dtheta = 2.0 * pi * d / N;
    complexd s = q[0];
    for (std::size_t n = 1; n < q.size(); ++n)
      s += 2.0 * q[n] * std::cos(n * dtheta);
    kernel[d] = amp * s;
  }
  for (int l = 0; l < N; ++l)
    for (int m = 0; m < N; ++m) F.entries(l, m) = kernel[(l - m + N) % N];
  return F;
}

} // namespace screensig
