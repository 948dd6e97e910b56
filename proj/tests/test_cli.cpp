#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = SCREENSIG_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("screensig_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const int rc = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// parse "n,lambda,pole" CSV rows (skipping the version comment and header)
std::vector<double> csv_lambdas(const std::string& path) {
  std::ifstream f(path);
  std::string line;
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n' || line[0] == 'i') continue;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    out.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  return out;
}

} // namespace

TEST_CASE("oracle sector subcommand reproduces the reference table") {
  TempDir tmp;
  const std::string out = tmp.file("sector.csv");
  REQUIRE(run("oracle sector --k 2 --alpha pi --r2 1 --count 9 -o " + out) == 0);

  const auto lambdas = csv_lambdas(out);
  const std::vector<double> table = {-5.1518, -0.2236, 1.2691, 2.4727, 3.5859,
                                     4.6584,  5.7090,  6.7464, 7.7753};
  REQUIRE(lambdas.size() == 9);
  for (int i = 0; i < 9; ++i)
    CHECK_THAT(lambdas[i], Catch::Matchers::WithinAbs(table[i], 5e-4));

  CHECK(slurp(out).rfind("# screensig csv v1", 0) == 0);
  CHECK(fs::exists(out + ".provenance.json"));
}

TEST_CASE("eig cross-validates against the oracle after sign resolution") {
  TempDir tmp;
  const std::string eig_out = tmp.file("eig.csv");
  const std::string orc_out = tmp.file("oracle.csv");
  REQUIRE(run("eig --domain half-disk --k 2 --sigma const:0 --count 6 --h-target 0.06 -o " +
              eig_out) == 0);
  REQUIRE(run("oracle sector --k 2 --alpha pi --r2 1 --count 6 --convention main -o " +
              orc_out) == 0);

  const auto fem = csv_lambdas(eig_out);
  const auto orc = csv_lambdas(orc_out);
  REQUIRE(fem.size() == 6);
  for (int i = 0; i < 6; ++i) {
    INFO("mode " << i << ": fem " << fem[i] << " oracle " << orc[i]);
    CHECK(std::abs(fem[i] - orc[i]) <= 1e-3 * std::abs(orc[i]));
  }
}

TEST_CASE("sweep runs are byte-identical for identical configs") {
  TempDir tmp;
  const std::string args =
      " --domain half-disk --k 2 --sigma const:1 --dirs 8 --zpoints 3 --seed 1"
      " --gamma 1e-10 --lmin 5.5 --lmax 7 --step 0.15 --h-target 0.3"
      " --R-farfield 1.5 --pml-inner 2 --pml-outer 2.8 -o ";
  fs::create_directories(tmp.path / "r1");
  fs::create_directories(tmp.path / "r2");
  const std::string o1 = tmp.file("r1/sweep.csv"), o2 = tmp.file("r2/sweep.csv");
  REQUIRE(run("sweep" + args + o1) == 0);
  REQUIRE(run("sweep" + args + o2) == 0);
  const std::string a = slurp(o1), b = slurp(o2);
  REQUIRE_FALSE(a.empty());
  CHECK(a == b);
  // provenance records agree except for the embedded output paths
  std::string p1 = slurp(o1 + ".provenance.json"), p2 = slurp(o2 + ".provenance.json");
  const auto strip = [](std::string s, const std::string& what) {
    for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what))
      s.erase(pos, what.size());
    return s;
  };
  CHECK(strip(p1, "r1/") == strip(p2, "r2/"));
}

TEST_CASE("mesh subcommand writes a readable tagged mesh") {
  TempDir tmp;
  const std::string out = tmp.file("m.txt");
  REQUIRE(run("mesh --domain annular:pi/2:0.8:1 --h-target 0.1 -o " + out) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("meshv1", 0) == 0);
  CHECK(text.find("GAMMA") != std::string::npos);
  CHECK(text.find("NEUMANN_REST") != std::string::npos);
}

TEST_CASE("farfield subcommand writes a versioned matrix") {
  TempDir tmp;
  const std::string out = tmp.file("ffm.txt");
  REQUIRE(run("farfield --problem aux --domain disk:1 --lambda 1 --dirs 8 --h-target 0.25"
              " --R-farfield 1.5 --pml-inner 2 --pml-outer 2.8 -o " +
              out) == 0);
  CHECK(slurp(out).rfind("ffmv1", 0) == 0);
}

TEST_CASE("configuration errors exit with code 2") {
  TempDir tmp;
  CHECK(run("frobnicate") == 2);
  CHECK(run("mesh --no-such-flag 1") == 2);
  CHECK(run("mesh --domain hexagon -o " + tmp.file("x.txt")) == 2);
  CHECK(run("eig --domain half-disk --sigma garbage -o " + tmp.file("y.csv")) == 2);
}

TEST_CASE("config file values are used and flags override them") {
  TempDir tmp;
  const std::string cfg = tmp.file("run.cfg");
  {
    std::ofstream f(cfg);
    f << "[oracle.sector]\n";
    f << "k = 2\n";
    f << "alpha = pi\n";
    f << "count = 4\n";
    f << "output = " << tmp.file("a.csv") << "\n";
  }
  REQUIRE(run("--config " + cfg + " oracle sector") == 0);
  CHECK(csv_lambdas(tmp.file("a.csv")).size() == 4);

  // flag overrides the config file count
  REQUIRE(run("--config " + cfg + " oracle sector --count 6 -o " + tmp.file("b.csv")) == 0);
  CHECK(csv_lambdas(tmp.file("b.csv")).size() == 6);
}
