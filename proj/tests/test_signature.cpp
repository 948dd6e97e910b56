#include <catch2/catch_amalgamated.hpp>

#include "screensig/signature.hpp"

#include <sstream>

using namespace screensig;
using Catch::Matchers::WithinAbs;

namespace {

FarFieldMatrix wrap(const Eigen::MatrixXcd& m, double k = 2.0) {
  FarFieldMatrix F;
  F.entries = m;
  F.k = k;
  return F;
}

SweepConfig small_config() {
  SweepConfig c;
  c.lambda_min = 0.0;
  c.lambda_max = 3.0;
  c.step = 0.05;
  c.gamma = 1e-10;
  c.n_z = 3;
  c.z_center = Vec2(0.0, 0.4);
  c.z_radius = 0.15;
  c.seed = 7;
  c.N = 8;
  return c;
}

} // namespace

TEST_CASE("modified operator is the entrywise difference") {
  const int N = 6;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(N, N);
  const FarFieldMatrix A = wrap(a), B = wrap(a);
  CHECK(modified_operator(A, B).norm() == 0.0);

  const FarFieldMatrix C = wrap(Eigen::MatrixXcd::Identity(N, N));
  const Eigen::MatrixXcd M = modified_operator(A, C);
  CHECK((M - (a - Eigen::MatrixXcd::Identity(N, N))).norm() == 0.0);
  CHECK(M.norm() <= a.norm() + std::sqrt(double(N)) + 1e-12);

  CHECK_THROWS_AS(modified_operator(A, wrap(Eigen::MatrixXcd::Zero(4, 4))),
                  std::invalid_argument);
  FarFieldMatrix D = wrap(a, 3.0);
  CHECK_THROWS_AS(modified_operator(A, D), std::invalid_argument);
}

TEST_CASE("tikhonov regularized solve") {
  const int N = 8;
  const double k = 2.0, gamma = 1e-3;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const Vec2 z(0.2, 0.1);

  // M = identity: g = b / (1 + gamma)
  const auto sol = tikhonov_gz(I, z, gamma, k);
  const VecXc b = point_source_rhs(k, N, z);
  CHECK((sol.g - b / (1.0 + gamma)).norm() < 1e-12);
  CHECK_THAT(sol.norm, WithinAbs(std::sqrt(2.0 * pi / N) * b.norm() / (1.0 + gamma), 1e-12));

  // norm decreases monotonically in gamma
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Random(N, N);
  double prev = 1e300;
  for (double g : {1.0, 1e3, 1e6}) {
    const double n = tikhonov_gz(M, z, g, k).norm;
    CHECK(n < prev);
    prev = n;
  }

  // gauge invariance: unimodular row scaling of M and b changes nothing
  const complexd c = std::polar(1.0, 0.7);
  const auto s1 = tikhonov_gz(M, z, gamma, k);
  const auto s2 = tikhonov_gz(c * M, z, gamma, k);
  CHECK_THAT(s2.norm, WithinAbs(s1.norm, 1e-12 * std::max(1.0, s1.norm)));

  M(2, 3) = complexd(std::nan(""), 0.0);
  CHECK_THROWS_AS(tikhonov_gz(M, z, gamma, k), std::invalid_argument);
}

TEST_CASE("peak detection on synthetic curves") {
  SweepCurve curve;
  curve.config.step = 0.05;
  for (double x = 0.0; x <= 4.0 + 1e-12; x += 0.05) curve.lambdas.push_back(x);
  const int n = static_cast<int>(curve.lambdas.size());
  curve.valid.assign(n, 1);

  SECTION("monotone curve has no peaks") {
    for (int i = 0; i < n; ++i) curve.indicator.push_back(1.0 + 0.1 * i);
    CHECK(detect_peaks(curve, 0.5).empty());
  }

  SECTION("single gaussian bump is located to 0.01") {
    for (int i = 0; i < n; ++i) {
      const double x = curve.lambdas[i];
      curve.indicator.push_back(1.0 + 30.0 * std::exp(-(x - 2.0) * (x - 2.0) / 0.02));
    }
    const auto peaks = detect_peaks(curve, 0.5);
    REQUIRE(peaks.size() == 1);
    CHECK_THAT(peaks[0].lambda, WithinAbs(2.0, 0.01));
    CHECK_FALSE(peaks[0].unresolved);
  }

  SECTION("bumps closer than two grid steps are flagged unresolved") {
    for (int i = 0; i < n; ++i) {
      const double x = curve.lambdas[i];
      curve.indicator.push_back(1.0 + 30.0 * std::exp(-std::pow((x - 2.0) / 0.04, 2)) +
                                28.0 * std::exp(-std::pow((x - 2.07) / 0.04, 2)));
    }
    const auto peaks = detect_peaks(curve, 0.5);
    REQUIRE_FALSE(peaks.empty());
    bool any_unresolved = false;
    for (const auto& p : peaks) any_unresolved |= p.unresolved;
    CHECK((peaks.size() == 1 || any_unresolved));
  }

  SECTION("too few grid points") {
    SweepCurve tiny;
    tiny.lambdas = {0.0, 0.1, 0.2};
    tiny.indicator = {1.0, 2.0, 1.0};
    tiny.valid = {1, 1, 1};
    CHECK_THROWS_AS(detect_peaks(tiny, 0.5), std::invalid_argument);
  }
}

TEST_CASE("synthetic sweeps") {
  const auto config = small_config();
  const int N = config.N;
  Eigen::MatrixXcd a = 0.3 * Eigen::MatrixXcd::Identity(N, N);
  a(1, 0) = complexd(0.05, 0.1);
  const FarFieldMatrix A = wrap(a);

  SECTION("lambda-independent provider gives a flat curve and no peaks") {
    auto provider = [&](double) { return wrap(a - Eigen::MatrixXcd::Identity(N, N)); };
    const SweepCurve curve = lsm_sweep(A, provider, config);
    CHECK(curve.peaks.empty());
    for (std::size_t i = 1; i < curve.indicator.size(); ++i)
      CHECK_THAT(curve.indicator[i], WithinAbs(curve.indicator[0], 1e-10));
  }

  SECTION("injected near-rank-deficiency at lambda = 1.5 is detected") {
    auto provider = [&](double lambda) {
      const double s = std::abs(lambda - 1.5) + 1e-5;
      return wrap(a - s * Eigen::MatrixXcd::Identity(N, N));
    };
    const SweepCurve curve = lsm_sweep(A, provider, config);
    REQUIRE_FALSE(curve.peaks.empty());
    double best = 1e300, who = 0.0;
    for (const auto& p : curve.peaks)
      if (std::abs(p.lambda - 1.5) < best) {
        best = std::abs(p.lambda - 1.5);
        who = p.lambda;
      }
    INFO("nearest peak at " << who);
    CHECK(best <= config.step);
  }

  SECTION("provider failures leave gaps but the sweep continues") {
    auto provider = [&](double lambda) {
      if (std::abs(lambda - 1.0) < 1e-9) throw std::runtime_error("boom");
      const double s = std::abs(lambda - 1.5) + 1e-5;
      return wrap(a - s * Eigen::MatrixXcd::Identity(N, N));
    };
    const SweepCurve curve = lsm_sweep(A, provider, config);
    int gaps = 0;
    for (char v : curve.valid) gaps += v ? 0 : 1;
    CHECK(gaps == 1);
    REQUIRE_FALSE(curve.peaks.empty());
  }

  SECTION("identical configs give bit-identical curves") {
    auto provider = [&](double lambda) {
      const double s = std::abs(lambda - 1.5) + 1e-5;
      return wrap(a - s * Eigen::MatrixXcd::Identity(N, N));
    };
    const SweepCurve c1 = lsm_sweep(A, provider, config);
    const SweepCurve c2 = lsm_sweep(A, provider, config);
    REQUIRE(c1.indicator.size() == c2.indicator.size());
    for (std::size_t i = 0; i < c1.indicator.size(); ++i)
      CHECK(c1.indicator[i] == c2.indicator[i]);

    std::ostringstream s1, s2;
    write_sweep_csv(c1, s1);
    write_sweep_csv(c2, s2);
    CHECK(s1.str() == s2.str());
  }
}

TEST_CASE("fsharp algebra") {
  const int N = 4;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);

  // F = -i I: Re = 0, Im = -I, F_# = I
  CHECK((fsharp(complexd(0.0, -1.0) * I) - I).norm() < 1e-13);

  // real symmetric diag(2,-3): |Re| = diag(2,3), Im = 0
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = -3.0;
  const Eigen::MatrixXcd S = fsharp(D);
  CHECK_THAT(S(0, 0).real(), WithinAbs(2.0, 1e-14));
  CHECK_THAT(S(1, 1).real(), WithinAbs(3.0, 1e-14));
  CHECK(std::abs(S(0, 1)) < 1e-14);

  // result is Hermitian and scaling folds through
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Random(N, N);
  const Eigen::MatrixXcd F1 = fsharp(R, 1.0), Fw = fsharp(R, 0.25);
  CHECK((F1 - F1.adjoint()).norm() < 1e-12);
  CHECK((Fw - 0.25 * F1).norm() < 1e-12);

  CHECK_THROWS_AS(fsharp(Eigen::MatrixXcd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("glsm surrogate basics") {
  const int N = 8;
  const double k = 2.0;
  const Vec2 z(0.1, 0.3);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const Eigen::MatrixXcd Fpen = complexd(0.0, -1.0) * I;  // fsharp = I

  // closed form with M = I, W = I: g = b/(1+alpha)
  const auto res = glsm_indicator(I, Fpen, GlsmPenalty::Aux, 0.5, z, k);
  const VecXc b = point_source_rhs(k, N, z);
  CHECK((res.g - b / 1.5).norm() < 1e-12);
  CHECK_THAT(res.penalty, WithinAbs(2.0 * pi / N * b.squaredNorm() / 2.25, 1e-12));
  CHECK_THAT(res.exact_aux, WithinAbs(res.penalty, 1e-12));  // |(Fg,g)| = (Wg,g) here

  // alpha -> infinity: penalty -> 0 monotonically
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Random(N, N);
  double prev = 1e300;
  for (double alpha : {1e-2, 1.0, 1e2, 1e4}) {
    const double p = glsm_indicator(M, Fpen, GlsmPenalty::FSharp, alpha, z, k).penalty;
    CHECK(p < prev + 1e-15);
    prev = p;
  }
  CHECK(prev < 1e-6);

  CHECK_THROWS_AS(glsm_indicator(M, Fpen, GlsmPenalty::Aux, 0.0, z, k), std::invalid_argument);
}

TEST_CASE("sensitivity table on the half disk") {
  const Mesh2D mesh = generate_mesh(DomainSpec::sector(pi, 1.0), 0.12);
  const double k = 2.0;

  const auto rows0 = sensitivity_table(mesh, k, {0.0}, {0.0}, 6);
  REQUIRE(rows0.size() == 6);
  for (const auto& r : rows0) {
    CHECK_FALSE(r.undefined);
    CHECK(r.rel_change == 0.0);
  }

  // first-eigenvalue relative change strictly increases with alpha
  const auto rows = sensitivity_table(mesh, k, {0.5, 1.0, 1.5, 2.0}, {0.0}, 6);
  std::vector<double> first;
  for (const auto& r : rows)
    if (r.j == 1) first.push_back(r.rel_change);
  REQUIRE(first.size() == 4);
  CHECK(first[0] > 0.0);
  for (std::size_t i = 1; i < first.size(); ++i) CHECK(first[i] > first[i - 1]);

  std::ostringstream csv;
  write_sensitivity_csv(rows, csv);
  CHECK(csv.str().rfind("alpha,beta,j,lambda,rel_change", 0) == 0);
}

TEST_CASE("relative noise injection is seeded and sized") {
  const FarFieldMatrix F = wrap(Eigen::MatrixXcd::Ones(10, 10));
  const FarFieldMatrix n1 = add_relative_noise(F, 0.01, 42);
  const FarFieldMatrix n2 = add_relative_noise(F, 0.01, 42);
  const FarFieldMatrix n3 = add_relative_noise(F, 0.01, 43);
  CHECK((n1.entries - n2.entries).norm() == 0.0);
  CHECK((n1.entries - n3.entries).norm() > 0.0);
  const double rel = (n1.entries - F.entries).norm() / F.entries.norm();
  CHECK(rel > 0.001);
  CHECK(rel < 0.05);
}
