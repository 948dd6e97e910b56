#pragma once

// N x N far field matrices sampled at uniform directions
// d_j = (cos(2 pi j / N), sin(2 pi j / N)), rows = observation, columns =
// incidence. Plain-text serialization, version token "ffmv1".

#include <complex>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "screensig/specfun.hpp"

namespace screensig {

enum class FarFieldProvenance { Screen, Aux, Oracle };

inline const char* to_string(FarFieldProvenance p) {
  switch (p) {
    case FarFieldProvenance::Screen: return "SCREEN";
    case FarFieldProvenance::Aux: return "AUX";
    case FarFieldProvenance::Oracle: return "ORACLE";
  }
  return "?";
}

inline FarFieldProvenance provenance_from_string(const std::string& s) {
  if (s == "SCREEN") return FarFieldProvenance::Screen;
  if (s == "AUX") return FarFieldProvenance::Aux;
  if (s == "ORACLE") return FarFieldProvenance::Oracle;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

inline Vec2 unit_direction(int j, int N) {
  const double t = 2.0 * pi * j / N;
  return {std::cos(t), std::sin(t)};
}

struct FarFieldMatrix {
  Eigen::MatrixXcd entries;  // (observation, incidence)
  double k = 0.0;
  FarFieldProvenance provenance = FarFieldProvenance::Oracle;
  std::string params;  // free-form description, e.g. "sigma=const:1"

  int N() const { return static_cast<int>(entries.rows()); }
  Vec2 direction(int j) const { return unit_direction(j, N()); }
};

// max_{l,m} |F(l,m) - F(m+N/2, l+N/2)| / max|F|, i.e. the defect of the
// reciprocity relation u_inf(xhat, d) = u_inf(-d, -xhat). Requires N even.
inline double reciprocity_defect(const FarFieldMatrix& F) {
  const int N = F.N();
  if (N % 2 != 0) throw std::invalid_argument("reciprocity_defect: N must be even");
  const double scale = F.entries.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int l = 0; l < N; ++l)
    for (int m = 0; m < N; ++m) {
      const int lr = (m + N / 2) % N, mr = (l + N / 2) % N;
      worst = std::max(worst, std::abs(F.entries(l, m) - F.entries(lr, mr)));
    }
  return worst / scale;
}

inline void write_farfield_matrix(const FarFieldMatrix& F, std::ostream& out) {
  out << "ffmv1\n";
  out << "N " << F.N() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "k %.17g\n", F.k);
  out << buf;
  out << "provenance " << to_string(F.provenance) << "\n";
  out << "params " << (F.params.empty() ? "-" : F.params) << "\n";
  for (int l = 0; l < F.N(); ++l) {
    for (int m = 0; m < F.N(); ++m) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g%c", F.entries(l, m).real(),
                    F.entries(l, m).imag(), m + 1 == F.N() ? '\n' : ' ');
      out << buf;
    }
  }
}

inline void write_farfield_matrix(const FarFieldMatrix& F, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open far field file for writing: " + path);
  write_farfield_matrix(F, f);
}

inline FarFieldMatrix read_farfield_matrix(std::istream& in) {
  std::string header;
  if (!(in >> header)) throw std::invalid_argument("ffm parse error: empty file");
  if (header != "ffmv1")
    throw std::invalid_argument("ffm parse error: unknown format version '" + header + "'");
  FarFieldMatrix F;
  std::string key;
  int N = 0;
  if (!(in >> key >> N) || key != "N" || N <= 0)
    throw std::invalid_argument("ffm parse error: expected 'N <count>'");
  if (!(in >> key >> F.k) || key != "k")
    throw std::invalid_argument("ffm parse error: expected 'k <value>'");
  std::string prov;
  if (!(in >> key >> prov) || key != "provenance")
    throw std::invalid_argument("ffm parse error: expected provenance");
  F.provenance = provenance_from_string(prov);
  if (!(in >> key >> F.params) || key != "params")
    throw std::invalid_argument("ffm parse error: expected params");
  if (F.params == "-") F.params.clear();
  F.entries.resize(N, N);
  for (int l = 0; l < N; ++l)
    for (int m = 0; m < N; ++m) {
      double re, im;
      if (!(in >> re >> im))
        throw std::invalid_argument("ffm parse error: truncated entry block at row " +
                                    std::to_string(l));
      F.entries(l, m) = complexd(re, im);
    }
  return F;
}

inline FarFieldMatrix read_farfield_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open far field file: " + path);
  return read_farfield_matrix(f);
}

} // namespace screensig
