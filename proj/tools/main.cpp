// screensig: mixed Steklov target signatures for thin screens.
//
// Subcommands: mesh, oracle, eig, farfield, sweep, glsm, sensitivity.
// Every run writes its outputs plus a provenance JSON with the fully
// resolved configuration. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "screensig/mesh_io.hpp"
#include "screensig/oracle.hpp"
#include "screensig/provenance.hpp"
#include "screensig/scatter.hpp"
#include "screensig/signature.hpp"

using namespace screensig;

namespace {

constexpr const char* kCsvVersion = "# screensig csv v1\n";

double parse_angle(const std::string& text) {
  // accepts plain numbers and the forms "pi", "2pi", "pi/3", "2pi/3"
  const auto p = text.find("pi");
  if (p == std::string::npos) return std::stod(text);
  double mult = 1.0;
  if (p > 0) mult = std::stod(text.substr(0, p));
  double div = 1.0;
  if (p + 2 < text.size()) {
    if (text[p + 2] != '/') throw CLI::ValidationError("cannot parse angle '" + text + "'");
    div = std::stod(text.substr(p + 3));
  }
  return mult * pi / div;
}

DomainSpec parse_domain(const std::string& text) {
  if (text == "half-disk") return DomainSpec::sector(pi, 1.0);
  if (text == "quadrant") return DomainSpec::sector(pi / 2, 1.0);
  std::vector<std::string> parts;
  std::size_t from = 0;
  while (true) {
    const auto c = text.find(':', from);
    parts.push_back(text.substr(from, c - from));
    if (c == std::string::npos) break;
    from = c + 1;
  }
  try {
    if (parts[0] == "disk" && parts.size() == 2) return DomainSpec::disk(std::stod(parts[1]));
    if (parts[0] == "sector" && parts.size() == 3)
      return DomainSpec::sector(parse_angle(parts[1]), std::stod(parts[2]));
    if (parts[0] == "annular" && parts.size() == 4)
      return DomainSpec::annular_sector(parse_angle(parts[1]), std::stod(parts[2]),
                                        std::stod(parts[3]));
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError(
      "cannot parse domain '" + text +
      "' (expected half-disk, quadrant, disk:<R>, sector:<alpha>:<r2>, "
      "annular:<alpha>:<r1>:<r2>)");
}

complexd parse_complex(const std::string& text) {
  const auto c = text.find(',');
  if (c == std::string::npos) return complexd(std::stod(text), 0.0);
  return complexd(std::stod(text.substr(0, c)), std::stod(text.substr(c + 1)));
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t from = 0;
  while (from <= text.size()) {
    const auto c = text.find(',', from);
    out.push_back(std::stod(text.substr(from, c - from)));
    if (c == std::string::npos) break;
    from = c + 1;
  }
  return out;
}

std::string provenance_path(const std::string& output) {
  return output + ".provenance.json";
}

std::string mesh_hash(const Mesh2D& m) {
  std::ostringstream ss;
  write_mesh(m, ss);
  return hash_hex(ss.str());
}

// ---- shared scattering options -------------------------------------------

struct ScatterOptions {
  std::string domain = "half-disk";
  double k = 2.0;
  double h = 0.0;  // 0: wavelength/32
  double R_farfield = 2.0;
  PmlConfig pml;
  int dirs = 60;

  void attach(CLI::App* cmd) {
    cmd->add_option("--domain", domain, "screen domain D (half-disk, quadrant, disk:<R>, ...)");
    cmd->add_option("--k", k, "wave number")->check(CLI::PositiveNumber);
    cmd->add_option("--h-target", h, "target mesh size (default wavelength/32)");
    cmd->add_option("--R-farfield", R_farfield, "far field extraction radius");
    cmd->add_option("--pml-inner", pml.R_inner, "PML inner radius");
    cmd->add_option("--pml-outer", pml.R_outer, "PML outer radius");
    cmd->add_option("--pml-s0", pml.s0, "PML absorption");
    cmd->add_option("--dirs", dirs, "number of incident/observation directions");
  }

  ExteriorModel model() const {
    return ExteriorModel(parse_domain(domain), k, R_farfield, pml, h);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["domain"] = domain;
    j["k"] = k;
    j["h"] = h > 0.0 ? h : (2.0 * pi / k) / 32.0;
    j["R_farfield"] = R_farfield;
    j["pml"] = {{"R_inner", pml.R_inner},
                {"R_outer", pml.R_outer},
                {"s0", pml.s0},
                {"profile_exponent", pml.profile_exponent}};
    j["dirs"] = dirs;
    return j;
  }
};

// ---- subcommand runners ----------------------------------------------------

int run_mesh(const std::string& domain, double h, int refine, const std::string& out) {
  Mesh2D m = generate_mesh(parse_domain(domain), h);
  for (int i = 0; i < refine; ++i) m = refine_mesh(m);
  write_mesh(m, out);

  auto prov = provenance_record("mesh");
  prov["config"] = {{"domain", domain}, {"h", h}, {"refine", refine}};
  prov["mesh_hash"] = mesh_hash(m);
  prov["stats"] = {{"vertices", m.n_vertices()},
                   {"triangles", m.n_triangles()},
                   {"h_max", m.h_max},
                   {"area", mesh_area(m)}};
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));
  std::cout << "mesh: " << m.n_vertices() << " vertices, " << m.n_triangles()
            << " triangles, h_max " << m.h_max << " -> " << out << "\n";
  return 0;
}

int run_oracle_spectrum(bool annular, double k, double alpha, double r1, double r2,
                        double sigma, int count, const std::string& convention,
                        const std::string& out) {
  const SignConvention conv =
      convention == "main" ? SignConvention::Main : SignConvention::Appendix;
  const auto spec = annular ? annular_spectrum(k, alpha, r1, r2, sigma, count, conv)
                            : sector_spectrum(k, alpha, r2, sigma, count, conv);

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << kCsvVersion << "n,lambda,pole\n";
  char buf[64];
  for (const auto& e : spec) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", e.n, e.lambda, e.pole ? 1 : 0);
    f << buf;
  }

  auto prov = provenance_record(annular ? "oracle annular" : "oracle sector");
  prov["config"] = {{"k", k},   {"alpha", alpha}, {"r1", r1},
                    {"r2", r2}, {"sigma", sigma}, {"count", count},
                    {"convention", convention}};
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));
  for (const auto& e : spec) {
    if (e.pole)
      std::cout << "lambda_" << e.n << " = pole (k^2 hits this mode)\n";
    else
      std::cout << "lambda_" << e.n << " = " << e.lambda << "\n";
  }
  return 0;
}

int run_oracle_eigenfunction(int n, double k, double alpha, double r2, int nr, int ntheta,
                             const std::string& out) {
  std::vector<Vec2> pts;
  for (int i = 1; i <= nr; ++i)
    for (int j = 0; j <= ntheta; ++j) {
      const double r = r2 * i / nr, th = alpha * j / ntheta;
      pts.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  const auto vals = sector_eigenfunction(n, k, alpha, r2, pts);
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << kCsvVersion << "x,y,value\n";
  char buf[96];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pts[i].x(), pts[i].y(), vals[i]);
    f << buf;
  }
  auto prov = provenance_record("oracle eigenfunction");
  prov["config"] = {{"n", n},   {"k", k},   {"alpha", alpha},
                    {"r2", r2}, {"nr", nr}, {"ntheta", ntheta}};
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));
  return 0;
}

int run_eig(const std::string& domain, double h, int refine, double k,
            const std::string& sigma_text, int count, bool skip_admissibility,
            const std::string& trace_out, const std::string& out) {
  Mesh2D mesh = generate_mesh(parse_domain(domain), h);
  for (int i = 0; i < refine; ++i) mesh = refine_mesh(mesh);
  const SigmaProfile sigma = parse_sigma(sigma_text);

  const auto report = check_wavenumber_admissible(mesh, k);
  const auto sp = solve_steklov(mesh, k, sigma, count, !skip_admissibility);

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << kCsvVersion;
  std::ostringstream body;
  write_spectrum_csv(sp, body);
  f << body.str();

  if (!trace_out.empty()) {
    std::ofstream tf(trace_out);
    if (!tf) throw std::runtime_error("cannot open " + trace_out);
    tf << kCsvVersion << "s";
    for (std::size_t j = 0; j < sp.values.size(); ++j) tf << ",trace_" << j;
    tf << "\n";
    std::vector<std::vector<std::pair<double, double>>> curves;
    for (std::size_t j = 0; j < sp.values.size(); ++j)
      curves.push_back(trace_curve(mesh, sp, static_cast<int>(j)));
    char buf[64];
    for (std::size_t i = 0; i < curves[0].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", curves[0][i].first);
      tf << buf;
      for (const auto& c : curves) {
        std::snprintf(buf, sizeof buf, ",%.17g", c[i].second);
        tf << buf;
      }
      tf << "\n";
    }
  }

  auto prov = provenance_record("eig");
  prov["config"] = {{"domain", domain},    {"h", h},
                    {"refine", refine},    {"k", k},
                    {"sigma", sigma_text}, {"count", count},
                    {"admissibility_check", !skip_admissibility}};
  prov["mesh_hash"] = mesh_hash(mesh);
  prov["admissibility"] = {{"admissible", report.admissible},
                           {"nearest_mixed_eig", report.nearest_mixed_eig}};
  prov["outputs"].push_back(out);
  if (!trace_out.empty()) prov["outputs"].push_back(trace_out);
  for (const auto& w : sp.warnings) prov["warnings"].push_back(w);
  write_provenance(prov, provenance_path(out));

  for (std::size_t j = 0; j < sp.values.size(); ++j)
    std::cout << "lambda_" << j + 1 << " = " << sp.values[j].real() << "\n";
  std::cout << "admissible: " << (report.admissible ? "yes" : "no")
            << " (nearest mixed eigenvalue " << report.nearest_mixed_eig << ")\n";
  return 0;
}

int run_farfield(const ScatterOptions& sc, const std::string& problem,
                 const std::string& sigma_text, const std::string& lambda_text,
                 const std::string& out) {
  const ExteriorModel model = sc.model();
  FarFieldMatrix F;
  if (problem == "screen") {
    F = model.screen_farfield_matrix(parse_sigma(sigma_text), sc.dirs);
  } else {
    F = model.aux_farfield_matrix(parse_complex(lambda_text), sc.dirs);
  }
  write_farfield_matrix(F, out);

  auto prov = provenance_record("farfield");
  prov["config"] = sc.to_json();
  prov["config"]["problem"] = problem;
  if (problem == "screen") prov["config"]["sigma"] = sigma_text;
  if (problem == "aux") prov["config"]["lambda"] = lambda_text;
  prov["mesh_hash"] = mesh_hash(model.mesh());
  prov["reciprocity_defect"] = reciprocity_defect(F);
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));
  std::cout << "far field matrix " << F.N() << "x" << F.N() << " (" << to_string(F.provenance)
            << ") -> " << out << ", reciprocity defect " << reciprocity_defect(F) << "\n";
  return 0;
}

int run_sweep(const ScatterOptions& sc, const std::string& sigma_text, double lmin,
              double lmax, double step, double gamma, int zpoints, std::uint64_t seed,
              double prominence, const std::string& z_center_text, double z_radius,
              const std::string& out) {
  const DomainSpec inner = parse_domain(sc.domain);
  const ExteriorModel model = sc.model();

  SweepConfig config;
  config.lambda_min = lmin;
  config.lambda_max = lmax;
  config.step = step;
  config.gamma = gamma;
  config.n_z = zpoints;
  config.seed = seed;
  config.N = sc.dirs;
  config.min_prominence_ratio = prominence;
  if (z_center_text.empty()) {
    config.z_center = domain_centroid(inner);
    config.z_radius = 0.3 * domain_inradius(inner);
  } else {
    const complexd c = parse_complex(z_center_text);
    config.z_center = Vec2(c.real(), c.imag());
    config.z_radius = z_radius;
  }

  const FarFieldMatrix A = model.screen_farfield_matrix(parse_sigma(sigma_text), sc.dirs);
  const auto& family = model.aux_family(sc.dirs);
  const SweepCurve curve =
      lsm_sweep(A, [&](double lam) { return family.matrix(complexd(lam, 0.0)); }, config);

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << kCsvVersion;
  std::ostringstream body;
  write_sweep_csv(curve, body);
  f << body.str();

  auto prov = provenance_record("sweep");
  prov["config"] = sc.to_json();
  prov["config"]["sigma"] = sigma_text;
  prov["config"]["lambda_min"] = lmin;
  prov["config"]["lambda_max"] = lmax;
  prov["config"]["step"] = step;
  prov["config"]["gamma"] = gamma;
  prov["config"]["zpoints"] = zpoints;
  prov["config"]["seed"] = seed;
  prov["config"]["prominence"] = prominence;
  prov["config"]["z_center"] = {config.z_center.x(), config.z_center.y()};
  prov["config"]["z_radius"] = config.z_radius;
  prov["mesh_hash"] = mesh_hash(model.mesh());
  prov["peaks"] = nlohmann::json::array();
  for (const auto& p : curve.peaks)
    prov["peaks"].push_back(
        {{"lambda", p.lambda}, {"height", p.height}, {"unresolved", p.unresolved}});
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));

  std::cout << "sweep: " << curve.lambdas.size() << " lambda values, " << curve.peaks.size()
            << " peaks:";
  for (const auto& p : curve.peaks) std::cout << " " << p.lambda;
  std::cout << "\n";
  return 0;
}

int run_glsm(const ScatterOptions& sc, const std::string& sigma_text,
             const std::string& lambda_text, const std::string& penalty_text,
             const std::string& alphas_text, int zpoints, std::uint64_t seed,
             const std::string& out) {
  const DomainSpec inner = parse_domain(sc.domain);
  const ExteriorModel model = sc.model();
  const complexd lambda = parse_complex(lambda_text);
  const GlsmPenalty penalty = penalty_text == "fsharp" ? GlsmPenalty::FSharp : GlsmPenalty::Aux;

  const FarFieldMatrix A = model.screen_farfield_matrix(parse_sigma(sigma_text), sc.dirs);
  const FarFieldMatrix B = model.aux_farfield_matrix(lambda, sc.dirs);
  const Eigen::MatrixXcd M = modified_operator(A, B);
  const Eigen::MatrixXcd& source = penalty == GlsmPenalty::Aux ? B.entries : A.entries;

  SweepConfig zconf;
  zconf.z_center = domain_centroid(inner);
  zconf.z_radius = 0.3 * domain_inradius(inner);
  zconf.n_z = zpoints;
  zconf.seed = seed;
  zconf.N = sc.dirs;
  const auto zs = zconf.sample_points();

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << kCsvVersion << "alpha_reg,penalty,exact_aux\n";
  char buf[96];
  for (double a : parse_list(alphas_text)) {
    double pen = 0.0, exact = 0.0;
    for (const Vec2& z : zs) {
      const auto res = glsm_indicator(M, source, penalty, a, z, sc.k);
      pen += res.penalty;
      exact += res.exact_aux;
    }
    pen /= static_cast<double>(zs.size());
    exact /= static_cast<double>(zs.size());
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a, pen, exact);
    f << buf;
    std::cout << "alpha " << a << ": penalty " << pen << "\n";
  }

  auto prov = provenance_record("glsm");
  prov["config"] = sc.to_json();
  prov["config"]["sigma"] = sigma_text;
  prov["config"]["lambda"] = lambda_text;
  prov["config"]["penalty"] = penalty_text;
  prov["config"]["alphas"] = parse_list(alphas_text);
  prov["config"]["zpoints"] = zpoints;
  prov["config"]["seed"] = seed;
  prov["mesh_hash"] = mesh_hash(model.mesh());
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));
  return 0;
}

int run_sensitivity(const std::string& domain, double h, double k,
                    const std::string& alphas_text, const std::string& betas_text, int count,
                    const std::string& out) {
  const Mesh2D mesh = generate_mesh(parse_domain(domain), h);
  const auto rows =
      sensitivity_table(mesh, k, parse_list(alphas_text), parse_list(betas_text), count);

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << kCsvVersion;
  std::ostringstream body;
  write_sensitivity_csv(rows, body);
  f << body.str();

  auto prov = provenance_record("sensitivity");
  prov["config"] = {{"domain", domain},
                    {"h", h},
                    {"k", k},
                    {"alphas", parse_list(alphas_text)},
                    {"betas", parse_list(betas_text)},
                    {"count", count}};
  prov["mesh_hash"] = mesh_hash(mesh);
  prov["outputs"].push_back(out);
  write_provenance(prov, provenance_path(out));
  std::cout << "sensitivity table: " << rows.size() << " rows -> " << out << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed Steklov target signatures for thin screens"};
  app.require_subcommand(1);
  app.set_config("--config", "", "line-based key = value configuration file");

  int threads = 0;
  app.add_option("--threads", threads, "cap internal parallelism (0 = library default)");

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "generate and inspect tagged meshes");
  std::string mesh_domain = "half-disk", mesh_out = "mesh.txt";
  double mesh_h = 0.1;
  int mesh_refine = 0;
  mesh_cmd->add_option("--domain", mesh_domain, "domain specification");
  mesh_cmd->add_option("--h-target", mesh_h, "target mesh size")->check(CLI::PositiveNumber);
  mesh_cmd->add_option("--refine", mesh_refine, "uniform refinement levels");
  mesh_cmd->add_option("-o,--output", mesh_out, "output mesh file");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "series reference spectra and fields");
  oracle_cmd->require_subcommand(1);
  auto* osec = oracle_cmd->add_subcommand("sector", "circular sector spectrum");
  auto* oann = oracle_cmd->add_subcommand("annular", "annular sector spectrum");
  auto* oeif = oracle_cmd->add_subcommand("eigenfunction", "sector eigenfunction samples");
  double o_k = 2.0, o_r1 = 0.8, o_r2 = 1.0, o_sigma = 0.0;
  std::string o_alpha = "pi", o_conv = "appendix", o_out = "oracle.csv";
  int o_count = 9, o_n = 0, o_nr = 24, o_ntheta = 48;
  for (auto* c : {osec, oann}) {
    c->add_option("--k", o_k, "wave number")->check(CLI::PositiveNumber);
    c->add_option("--alpha", o_alpha, "opening angle (accepts pi, pi/2, ...)");
    c->add_option("--r2", o_r2, "outer radius");
    c->add_option("--sigma", o_sigma, "constant sigma");
    c->add_option("--count", o_count, "number of modes");
    c->add_option("--convention", o_conv, "appendix|main")
        ->check(CLI::IsMember({"appendix", "main"}));
    c->add_option("-o,--output", o_out, "output CSV");
  }
  oann->add_option("--r1", o_r1, "inner radius");
  oeif->add_option("--n", o_n, "angular mode index");
  oeif->add_option("--k", o_k, "wave number");
  oeif->add_option("--alpha", o_alpha, "opening angle");
  oeif->add_option("--r2", o_r2, "outer radius");
  oeif->add_option("--nr", o_nr, "radial samples");
  oeif->add_option("--ntheta", o_ntheta, "angular samples");
  oeif->add_option("-o,--output", o_out, "output CSV");

  // eig
  auto* eig_cmd = app.add_subcommand("eig", "finite element Steklov eigenvalues");
  std::string eig_domain = "half-disk", eig_sigma = "const:0", eig_out = "eig.csv", eig_trace;
  double eig_h = 0.05, eig_k = 2.0;
  int eig_count = 6, eig_refine = 0;
  bool eig_skip_adm = false;
  eig_cmd->add_option("--domain", eig_domain, "domain specification");
  eig_cmd->add_option("--h-target", eig_h, "target mesh size")->check(CLI::PositiveNumber);
  eig_cmd->add_option("--refine", eig_refine, "uniform refinement levels");
  eig_cmd->add_option("--k", eig_k, "wave number")->check(CLI::PositiveNumber);
  eig_cmd->add_option("--sigma", eig_sigma, "sigma profile (const:<c> | angular:<a>:<b>)");
  eig_cmd->add_option("--count", eig_count, "number of eigenvalues");
  eig_cmd->add_flag("--no-admissibility-check", eig_skip_adm,
                    "skip the wavenumber admissibility gate");
  eig_cmd->add_option("--trace-out", eig_trace, "eigenvector trace CSV");
  eig_cmd->add_option("-o,--output", eig_out, "output CSV");

  // farfield
  auto* ff_cmd = app.add_subcommand("farfield", "screen or auxiliary far field matrix");
  ScatterOptions ff_sc;
  std::string ff_problem = "screen", ff_sigma = "const:1", ff_lambda = "1", ff_out = "ffm.txt";
  ff_sc.attach(ff_cmd);
  ff_cmd->add_option("--problem", ff_problem, "screen|aux")
      ->check(CLI::IsMember({"screen", "aux"}));
  ff_cmd->add_option("--sigma", ff_sigma, "sigma profile (screen problem)");
  ff_cmd->add_option("--lambda", ff_lambda, "impedance parameter re[,im] (aux problem)");
  ff_cmd->add_option("-o,--output", ff_out, "output matrix file");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "LSM lambda sweep with peak detection");
  ScatterOptions sw_sc;
  std::string sw_sigma = "const:1", sw_out = "sweep.csv", sw_zcenter;
  double sw_lmin = -8.0, sw_lmax = 8.0, sw_step = 0.05, sw_gamma = 1e-10, sw_prominence = 0.5,
         sw_zradius = 0.1;
  int sw_zpoints = 20;
  std::uint64_t sw_seed = 1;
  sw_sc.attach(sweep_cmd);
  sweep_cmd->add_option("--sigma", sw_sigma, "sigma profile of the screen");
  sweep_cmd->add_option("--lmin", sw_lmin, "sweep start");
  sweep_cmd->add_option("--lmax", sw_lmax, "sweep end");
  sweep_cmd->add_option("--step", sw_step, "sweep step")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--gamma", sw_gamma, "Tikhonov parameter")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--zpoints", sw_zpoints, "number of sample points z");
  sweep_cmd->add_option("--seed", sw_seed, "RNG seed for the z sample");
  sweep_cmd->add_option("--prominence", sw_prominence, "peak prominence ratio");
  sweep_cmd->add_option("--z-center", sw_zcenter, "override z ball center 'x,y'");
  sweep_cmd->add_option("--z-radius", sw_zradius, "override z ball radius");
  sweep_cmd->add_option("-o,--output", sw_out, "output CSV");

  // glsm
  auto* glsm_cmd = app.add_subcommand("glsm", "generalized LSM penalty indicator");
  ScatterOptions gl_sc;
  std::string gl_sigma = "const:1", gl_lambda = "1", gl_penalty = "aux",
              gl_alphas = "1e-2,1e-4,1e-6", gl_out = "glsm.csv";
  int gl_zpoints = 5;
  std::uint64_t gl_seed = 1;
  gl_sc.attach(glsm_cmd);
  glsm_cmd->add_option("--sigma", gl_sigma, "sigma profile of the screen");
  glsm_cmd->add_option("--lambda", gl_lambda, "Steklov parameter re[,im]");
  glsm_cmd->add_option("--penalty", gl_penalty, "aux|fsharp")
      ->check(CLI::IsMember({"aux", "fsharp"}));
  glsm_cmd->add_option("--alphas", gl_alphas, "comma list of regularization weights");
  glsm_cmd->add_option("--zpoints", gl_zpoints, "number of sample points z");
  glsm_cmd->add_option("--seed", gl_seed, "RNG seed for the z sample");
  glsm_cmd->add_option("-o,--output", gl_out, "output CSV");

  // sensitivity
  auto* sens_cmd = app.add_subcommand("sensitivity", "eigenvalue sensitivity study");
  std::string sn_domain = "half-disk", sn_alphas = "0,0.5,1", sn_betas = "0",
              sn_out = "sensitivity.csv";
  double sn_h = 0.05, sn_k = 2.0;
  int sn_count = 6;
  sens_cmd->add_option("--domain", sn_domain, "domain specification");
  sens_cmd->add_option("--h-target", sn_h, "target mesh size")->check(CLI::PositiveNumber);
  sens_cmd->add_option("--k", sn_k, "wave number")->check(CLI::PositiveNumber);
  sens_cmd->add_option("--alphas", sn_alphas, "comma list of alpha values");
  sens_cmd->add_option("--betas", sn_betas, "comma list of beta values");
  sens_cmd->add_option("--count", sn_count, "number of eigenvalues");
  sens_cmd->add_option("-o,--output", sn_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (threads > 0) Eigen::setNbThreads(threads);

  try {
    if (*mesh_cmd) return run_mesh(mesh_domain, mesh_h, mesh_refine, mesh_out);
    if (*osec)
      return run_oracle_spectrum(false, o_k, parse_angle(o_alpha), o_r1, o_r2, o_sigma,
                                 o_count, o_conv, o_out);
    if (*oann)
      return run_oracle_spectrum(true, o_k, parse_angle(o_alpha), o_r1, o_r2, o_sigma,
                                 o_count, o_conv, o_out);
    if (*oeif)
      return run_oracle_eigenfunction(o_n, o_k, parse_angle(o_alpha), o_r2, o_nr, o_ntheta,
                                      o_out);
    if (*eig_cmd)
      return run_eig(eig_domain, eig_h, eig_refine, eig_k, eig_sigma, eig_count, eig_skip_adm,
                     eig_trace, eig_out);
    if (*ff_cmd) return run_farfield(ff_sc, ff_problem, ff_sigma, ff_lambda, ff_out);
    if (*sweep_cmd)
      return run_sweep(sw_sc, sw_sigma, sw_lmin, sw_lmax, sw_step, sw_gamma, sw_zpoints,
                       sw_seed, sw_prominence, sw_zcenter, sw_zradius, sw_out);
    if (*glsm_cmd)
      return run_glsm(gl_sc, gl_sigma, gl_lambda, gl_penalty, gl_alphas, gl_zpoints, gl_seed,
                      gl_out);
    if (*sens_cmd)
      return run_sensitivity(sn_domain, sn_h, sn_k, sn_alphas, sn_betas, sn_count, sn_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
