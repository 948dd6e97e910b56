#pragma once

// Surface parameter sigma on the screen, either a constant or the banded
// angular profile
//   sigma(theta) = 1                          0 < theta < pi/3 + beta
//                  1 + alpha sin^2(3 beta - 3 theta)   pi/3 + beta < theta < 2 pi/3 + beta
//                  1                          2 pi/3 + beta < theta < pi
// on the half-circle parametrization theta in [0, pi].

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "screensig/specfun.hpp"

namespace screensig {

struct SigmaProfile {
  enum class Kind { Constant, Angular };
  Kind kind = Kind::Constant;
  double value = 0.0;    // constant case
  double alpha_p = 0.0;  // angular case: amplitude, alpha >= 0
  double beta_p = 0.0;   // angular case: band shift
  double base = 1.0;     // angular case: off-band level (1 in the standard profile)

  static SigmaProfile constant(double c) {
    SigmaProfile s;
    s.kind = Kind::Constant;
    s.value = c;
    return s;
  }
  static SigmaProfile angular(double alpha_p, double beta_p) {
    if (!(alpha_p >= 0.0))
      throw std::invalid_argument("SigmaProfile: angular profile needs alpha_p >= 0");
    SigmaProfile s;
    s.kind = Kind::Angular;
    s.alpha_p = alpha_p;
    s.beta_p = beta_p;
    return s;
  }
  // generalized banded profile base + amp sin^2(3 beta - 3 theta); covers
  // affine combinations sigma0 + eps*sigma1 of a constant with the standard
  // angular profile
  static SigmaProfile angular_scaled(double base, double amp, double beta_p) {
    SigmaProfile s;
    s.kind = Kind::Angular;
    s.alpha_p = amp;
    s.beta_p = beta_p;
    s.base = base;
    return s;
  }

  std::string describe() const {
    std::ostringstream ss;
    if (kind == Kind::Constant)
      ss << "const:" << value;
    else if (base == 1.0)
      ss << "angular:" << alpha_p << ":" << beta_p;
    else
      ss << "angular:" << alpha_p << ":" << beta_p << ":base=" << base;
    return ss.str();
  }
};

// "const:<c>" or "angular:<alpha>:<beta>"
inline SigmaProfile parse_sigma(const std::string& text) {
  const auto fail = [&] {
    throw std::invalid_argument("cannot parse sigma profile '" + text +
                                "' (expected const:<c> or angular:<a>:<b>)");
  };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) fail();
  const std::string head = text.substr(0, c1);
  try {
    if (head == "const") return SigmaProfile::constant(std::stod(text.substr(c1 + 1)));
    if (head == "angular") {
      const auto c2 = text.find(':', c1 + 1);
      if (c2 == std::string::npos) fail();
      return SigmaProfile::angular(std::stod(text.substr(c1 + 1, c2 - c1 - 1)),
                                   std::stod(text.substr(c2 + 1)));
    }
  } catch (const std::invalid_argument&) {
    fail();
  }
  fail();
  return {};
}

inline double sigma_eval(const SigmaProfile& s, double theta) {
  if (s.kind == SigmaProfile::Kind::Constant) return s.value;
  if (theta < -1e-9 || theta > pi + 1e-9)
    throw std::domain_error("sigma_eval: angular profile requires theta in [0, pi]");
  theta = std::min(std::max(theta, 0.0), pi);
  const double lo = pi / 3 + s.beta_p, hi = 2 * pi / 3 + s.beta_p;
  if (theta <= lo || theta >= hi) return s.base;
  const double sn = std::sin(3.0 * s.beta_p - 3.0 * theta);
  return s.base + s.alpha_p * sn * sn;
}

// Evaluate at a point of the screen, theta = polar angle (tolerates tiny
// negative angles from rounding at the theta = pi end of the arc).
inline double sigma_eval_point(const SigmaProfile& s, const Vec2& x) {
  if (s.kind == SigmaProfile::Kind::Constant) return s.value;
  double theta = std::atan2(x.y(), x.x());
  if (theta < -pi / 2) theta += 2.0 * pi;  // near (-1, 0^-) wrap to ~pi
  return sigma_eval(s, theta);
}

} // namespace screensig
