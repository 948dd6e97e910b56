#pragma once

// Cylinder functions of real non-negative (possibly fractional) order, the 2D
// radiating fundamental solution of the Helmholtz equation and its far field
// pattern. Orders nu = n*pi/alpha arise from separation of variables on
// sectors, so fractional order is required throughout.

#include <cmath>
#include <complex>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

#include <Eigen/Core>

namespace screensig {

using complexd = std::complex<double>;
using Vec2 = Eigen::Vector2d;

inline constexpr double pi = 3.14159265358979323846;

namespace detail {
inline void require_positive_x(double x, const char* who) {
  if (!(x > 0.0))
    throw std::domain_error(std::string(who) + ": requires x > 0");
}
inline void require_order(double nu, const char* who) {
  if (!(nu >= 0.0))
    throw std::domain_error(std::string(who) + ": requires nu >= 0");
}
} // namespace detail

// J_nu(x) for nu >= 0, x >= 0. Values below the subnormal range underflow to
// zero; pass `underflow` to observe that.
inline double bessel_j(double nu, double x, bool* underflow = nullptr) {
  detail::require_order(nu, "bessel_j");
  if (x < 0.0) throw std::domain_error("bessel_j: requires x >= 0");
  if (underflow) *underflow = false;
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  // Far below the turning point the value is ~ (x/2)^nu / nu!; detect decades
  // past the representable range and short-circuit to 0.
  if (nu > 1.0) {
    const double log10_mag =
        nu * std::log10(0.5 * x * std::exp(1.0) / nu) + 0.5 * std::log10(nu);
    if (log10_mag < -320.0) {
      if (underflow) *underflow = true;
      return 0.0;
    }
  }
  return boost::math::cyl_bessel_j(nu, x);
}

// Y_nu(x) for nu >= 0, x > 0 (singular at x = 0).
inline double bessel_y(double nu, double x) {
  detail::require_order(nu, "bessel_y");
  detail::require_positive_x(x, "bessel_y");
  return boost::math::cyl_neumann(nu, x);
}

// dJ_nu/dx via the standard recurrences:
//   J'_nu = (J_{nu-1} - J_{nu+1})/2        (nu >= 1)
//   J'_nu = J_{nu-1} - (nu/x) J_nu         (0 < nu < 1)
//   J'_0  = -J_1
inline double bessel_j_prime(double nu, double x) {
  detail::require_order(nu, "bessel_j_prime");
  detail::require_positive_x(x, "bessel_j_prime");
  if (nu == 0.0) return -bessel_j(1.0, x);
  if (nu >= 1.0) {
    bool uf1 = false, uf2 = false;
    const double lo = bessel_j(nu - 1.0, x, &uf1);
    const double hi = bessel_j(nu + 1.0, x, &uf2);
    return 0.5 * (lo - hi);
  }
  // nu in (0,1): J_{nu-1} has negative fractional order; boost evaluates it
  // through the reflection formula.
  const double jm = boost::math::cyl_bessel_j(nu - 1.0, x);
  return jm - (nu / x) * bessel_j(nu, x);
}

inline double bessel_y_prime(double nu, double x) {
  detail::require_order(nu, "bessel_y_prime");
  detail::require_positive_x(x, "bessel_y_prime");
  if (nu == 0.0) return -bessel_y(1.0, x);
  if (nu >= 1.0)
    return 0.5 * (bessel_y(nu - 1.0, x) - bessel_y(nu + 1.0, x));
  const double ym = boost::math::cyl_neumann(nu - 1.0, x);
  return ym - (nu / x) * bessel_y(nu, x);
}

// Hankel functions H^(1) = J + iY, H^(2) = J - iY for real order and x > 0.
inline complexd hankel(int kind, double nu, double x) {
  detail::require_order(nu, "hankel");
  detail::require_positive_x(x, "hankel");
  if (kind != 1 && kind != 2) throw std::invalid_argument("hankel: kind must be 1 or 2");
  const double sign = kind == 1 ? 1.0 : -1.0;
  return {bessel_j(nu, x), sign * bessel_y(nu, x)};
}

inline complexd hankel_prime(int kind, double nu, double x) {
  detail::require_order(nu, "hankel_prime");
  detail::require_positive_x(x, "hankel_prime");
  if (kind != 1 && kind != 2) throw std::invalid_argument("hankel_prime: kind must be 1 or 2");
  const double sign = kind == 1 ? 1.0 : -1.0;
  return {bessel_j_prime(nu, x), sign * bessel_y_prime(nu, x)};
}

// Phi(x,z) = (i/4) H_0^(1)(k |x-z|), the radiating fundamental solution in 2D.
inline complexd fundamental_solution(double k, const Vec2& x, const Vec2& z) {
  if (!(k > 0.0)) throw std::domain_error("fundamental_solution: requires k > 0");
  const double r = (x - z).norm();
  if (r <= 0.0) throw std::domain_error("fundamental_solution: singular at x == z");
  return complexd(0.0, 0.25) * hankel(1, 0.0, k * r);
}

// Far field normalization constant gamma_2 = exp(i pi/4) / sqrt(8 pi k),
// fixed by the large-argument asymptotics of H_0^(1) and the convention
// u^s = e^{ikr}/sqrt(r) (u_inf + O(1/sqrt(r))).
inline complexd farfield_constant(double k) {
  if (!(k > 0.0)) throw std::domain_error("farfield_constant: requires k > 0");
  return std::polar(1.0 / std::sqrt(8.0 * pi * k), 0.25 * pi);
}

// Far field pattern of Phi(., z): gamma_2 * exp(-i k xhat.z).
inline complexd farfield_point_source(double k, const Vec2& xhat, const Vec2& z) {
  if (std::abs(xhat.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("farfield_point_source: xhat must be a unit vector");
  return farfield_constant(k) * std::exp(complexd(0.0, -k * xhat.dot(z)));
}

} // namespace screensig
