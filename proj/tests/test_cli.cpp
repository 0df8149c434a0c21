#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "hypcm/errors.hpp"
#include "hypcm/expression.hpp"
#include "hypcm/run.hpp"
#include "hypcm/run_config.hpp"

using namespace hypcm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hypcm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + HYPCM_CLI_PATH + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSolveRound = R"(
[problem]
n = 2
k = 1

[grid]
mode = axisymmetric
n_theta = 64

[f0]
constant = 3.62686
)";

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3")(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2) * 3")(0, 0), 9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2 ^ 3 ^ 2")(0, 0), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2 ^ 2")(0, 0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("8 / 4 / 2")(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("1e-1 * 10")(0, 0), 1.0);
}

TEST(Expression, VariablesAndFunctions) {
  const auto e = Expression::parse("1 + 0.1*cos(theta) + sin(theta)*cos(phi)");
  EXPECT_NEAR(e(0.3, 1.2), 1 + 0.1 * std::cos(0.3) + std::sin(0.3) * std::cos(1.2), 1e-15);
  EXPECT_NEAR(Expression::parse("sinh(2)")(0, 0), std::sinh(2.0), 1e-15);
  EXPECT_NEAR(Expression::parse("cosh(1)^2 - sinh(1)^2")(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(Expression::parse("exp(1)")(0, 0), std::exp(1.0), 1e-15);
  EXPECT_NEAR(Expression::parse("pi")(0, 0), kPi, 1e-15);
}

TEST(Expression, ParseErrorsNameTheColumn) {
  for (const char* bad : {"", "1 +", "foo(1)", "(1", "1 2", "sin 1", "theta $"}) {
    try {
      Expression::parse(bad);
      FAIL() << bad;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << bad;
    }
  }
}

TEST(Ini, SectionsAndComments) {
  const auto ini = parse_ini("# header\n[a]\nx = 1  # trailing\ny=two words\n\n[b]\nz = 3\n");
  EXPECT_EQ(ini.at("a").at("x"), "1");
  EXPECT_EQ(ini.at("a").at("y"), "two words");
  EXPECT_EQ(ini.at("b").at("z"), "3");
}

TEST(Ini, Errors) {
  EXPECT_THROW(parse_ini("[a]\nx = 1\nx = 2\n"), ConfigError);
  EXPECT_THROW(parse_ini("x = 1\n"), ConfigError);
  EXPECT_THROW(parse_ini("[a]\njunk\n"), ConfigError);
  EXPECT_THROW(parse_ini("[a\n"), ConfigError);
  try {
    parse_ini("[a]\nx = 1\n\nbroken line\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
}

TEST(RunConfig, Defaults) {
  const auto cfg = parse_run_config(kSolveRound, RunMode::Solve);
  EXPECT_EQ(cfg.n, 2);
  EXPECT_EQ(cfg.k, 1);
  EXPECT_EQ(cfg.grid_mode, GridMode::Axisymmetric);
  ASSERT_TRUE(cfg.f0.has_value());
  EXPECT_EQ(cfg.f0->kind, FieldSpec::Kind::Constant);
  EXPECT_EQ(cfg.continuation.k, 1);
  EXPECT_TRUE(cfg.emit_csv);
  EXPECT_TRUE(cfg.emit_report);
  EXPECT_FALSE(cfg.emit_mesh);
}

TEST(RunConfig, FullGrammar) {
  const auto cfg = parse_run_config(R"(
[problem]
n = 2
k = 2
seed = 42
[grid]
mode = full-s2
n_theta = 32
n_phi = 64
[f0]
expr = 2 + 0.5*cos(theta)
[continuation]
t_step_init = 0.5
t_step_min = 1e-3
newton_tol = 1e-9
newton_max_iter = 10
fd_eps = 1e-6
backtrack_factor = 0.25
max_backtracks = 12
threads = 2
[output]
dir = out
emit = csv, mesh
[validate]
perturbations = 0.05*cos(theta) | -0.05*cos(theta)
)",
                                    RunMode::Validate);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.grid_mode, GridMode::FullS2);
  EXPECT_EQ(cfg.n_phi, 64);
  EXPECT_EQ(cfg.f0->kind, FieldSpec::Kind::Expression);
  EXPECT_EQ(cfg.continuation.newton_max_iter, 10);
  EXPECT_EQ(cfg.continuation.backtrack_factor, 0.25);
  EXPECT_EQ(cfg.continuation.threads, 2);
  EXPECT_EQ(cfg.out_dir, "out");
  EXPECT_TRUE(cfg.emit_csv);
  EXPECT_TRUE(cfg.emit_mesh);
  EXPECT_FALSE(cfg.emit_report);
  ASSERT_EQ(cfg.perturbations.size(), 2u);
}

TEST(RunConfig, Invariants) {
  EXPECT_THROW(parse_run_config("[problem]\nn = 2\nk = 3\n[f0]\nconstant = 1\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[problem]\nn = 3\nk = 1\n[grid]\nmode = full-s2\n[f0]\nconstant = 1\n", RunMode::Solve),
               ConfigError);
  EXPECT_THROW(parse_run_config("[problem]\nn = 2\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[problem]\nn = 2\nbogus = 1\n[f0]\nconstant = 1\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[nope]\n[f0]\nconstant = 1\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[f0]\nconstant = 1\nexpr = 2\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[f0]\nexpr = 1 +\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[problem]\nn = two\n[f0]\nconstant = 1\n", RunMode::Solve), ConfigError);
  EXPECT_THROW(parse_run_config("[body]\nconstant = 1\n[steiner]\nmask = east\n", RunMode::Steiner), ConfigError);
  EXPECT_NO_THROW(parse_run_config("", RunMode::SphereTest));
}

TEST(FieldSpec, TableRoundTrip) {
  const auto dir = scratch("table");
  const auto g = SphereGrid::build(GridMode::Axisymmetric, 16);
  std::ostringstream csv;
  csv.precision(17);
  csv << "theta,phi,f\n";
  for (int p = 0; p < g.size(); ++p) csv << g.theta(p) << "," << g.phi(p) << "," << 2.0 + std::cos(g.theta(p)) << "\n";
  write_file(dir / "f.csv", csv.str());
  const auto cfg = parse_run_config("[grid]\nn_theta = 16\n[f0]\ntable = f.csv\ncolumn = f\n", RunMode::Solve, dir.string());
  const auto f = cfg.f0->sample(g);
  for (int p = 0; p < g.size(); ++p) EXPECT_NEAR(f[p], 2.0 + std::cos(g.theta(p)), 1e-15);

  const auto other = SphereGrid::build(GridMode::Axisymmetric, 20);
  EXPECT_THROW(cfg.f0->sample(other), ConfigError);
  FieldSpec missing;
  missing.kind = FieldSpec::Kind::Table;
  missing.text = (dir / "absent.csv").string();
  EXPECT_THROW(missing.sample(g), IoError);
}

TEST(Run, SolveRoundSphere) {
  const auto dir = scratch("solve");
  auto cfg = parse_run_config(kSolveRound, RunMode::Solve);
  cfg.out_dir = dir.string();
  const auto out = run(cfg);
  ASSERT_EQ(out.exit_code, 0) << out.message;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["status"], "ok");
  EXPECT_NEAR(report["rho_min"].get<double>(), 1.0, 1e-6);
  EXPECT_NEAR(report["rho_max"].get<double>(), 1.0, 1e-6);
  for (const auto& v : report["solve"]["apriori"]["verdicts"]) EXPECT_FALSE(v["anchor"].get<std::string>().empty());
  const std::string csv = slurp(dir / "solution.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "theta,phi,rho,u,kappa1,kappa2,sigma_k");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);
}

TEST(Run, ReportKeyOrderIsStable) {
  const auto dir = scratch("order");
  auto cfg = parse_run_config(kSolveRound, RunMode::Solve);
  cfg.out_dir = dir.string();
  run(cfg);
  const std::string text = slurp(dir / "report.json");
  EXPECT_LT(text.find("\"status\""), text.find("\"config\""));
  EXPECT_LT(text.find("\"config\""), text.find("\"solve\""));
}

TEST(Run, AlexandrovInfeasible) {
  const auto dir = scratch("infeasible");
  auto cfg = parse_run_config("[problem]\nn = 2\nk = 2\n[f0]\nconstant = 0.9\n", RunMode::Solve);
  cfg.out_dir = dir.string();
  const auto out = run(cfg);
  EXPECT_EQ(out.exit_code, 3);
  EXPECT_EQ(out.category, "infeasible");
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["status"], "infeasible");
  EXPECT_EQ(report["exit_code"], 3);
}

TEST(Run, MeshFiles) {
  const auto dir = scratch("mesh");
  auto cfg = parse_run_config(std::string(kSolveRound) + "[output]\nemit = mesh\n", RunMode::Solve);
  cfg.out_dir = dir.string();
  ASSERT_EQ(run(cfg).exit_code, 0);
  const std::string hyp = slurp(dir / "mesh_hyperboloid.obj");
  std::istringstream in(hyp);
  std::string line;
  int verts = 0, faces = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) {
      ++verts;
      std::istringstream ls(line.substr(2));
      double x1, x2, x3, x0;
      ls >> x1 >> x2 >> x3 >> x0;
      EXPECT_NEAR(-x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3, -1.0, 1e-9);
    }
    if (line.rfind("f ", 0) == 0) ++faces;
  }
  EXPECT_EQ(verts, 64 * 128 + 2);
  EXPECT_EQ(faces, 63 * 128 + 2 * 128);
  EXPECT_TRUE(fs::exists(dir / "mesh_poincare.obj"));
  EXPECT_FALSE(fs::exists(dir / "solution.csv"));
  EXPECT_FALSE(fs::exists(dir / "report.json"));
}

TEST(Run, SteinerMode) {
  const auto dir = scratch("steiner");
  auto cfg = parse_run_config("[grid]\nmode = full-s2\nn_theta = 32\nn_phi = 64\n[body]\nconstant = 1\n", RunMode::Steiner);
  cfg.out_dir = dir.string();
  const auto out = run(cfg);
  ASSERT_EQ(out.exit_code, 0) << out.message;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_LE(report["steiner"]["max_rel_err"].get<double>(), 1e-4);
  const std::string csv = slurp(dir / "steiner.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,shell_volume,prediction");
}

TEST(Run, ValidateCandidate) {
  const auto dir = scratch("validate");
  auto cfg = parse_run_config(R"(
[problem]
n = 2
k = 1
[f0]
constant = 3.626860407847019
[candidate]
constant = 1
[validate]
perturbations = 0.05*cos(theta) | -0.05*cos(theta)
)",
                              RunMode::Validate);
  cfg.out_dir = dir.string();
  const auto out = run(cfg);
  EXPECT_EQ(out.exit_code, 0) << out.message;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(report["uniqueness"]["all_agree"].get<bool>());
  EXPECT_TRUE(report["apriori"]["pass"].get<bool>());
}

TEST(Run, ValidateRejectsWrongCandidate) {
  const auto dir = scratch("validate_bad");
  auto cfg = parse_run_config("[f0]\nconstant = 3.626860407847019\n[candidate]\nconstant = 1.3\n", RunMode::Validate);
  cfg.out_dir = dir.string();
  EXPECT_EQ(run(cfg).exit_code, 1);
}

TEST(Run, UnwritableOutputIsIoError) {
  const auto dir = scratch("io");
  write_file(dir / "blocker", "x");
  auto cfg = parse_run_config(kSolveRound, RunMode::Solve);
  cfg.out_dir = (dir / "blocker" / "sub").string();
  const auto out = run(cfg);
  EXPECT_EQ(out.exit_code, 5);
  EXPECT_EQ(out.category, "io");
}

TEST(Run, ByteIdenticalOutputs) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::string text = R"(
[problem]
n = 2
k = 2
seed = 7
[grid]
mode = full-s2
n_theta = 16
n_phi = 32
[f0]
expr = 2.5 + 0.3*sin(theta)*cos(phi)
[output]
emit = csv, report, mesh
)";
  auto ca = parse_run_config(text, RunMode::Solve);
  ca.out_dir = a.string();
  auto cb = ca;
  cb.out_dir = b.string();
  cb.continuation.threads = 2;
  ASSERT_EQ(run(ca).exit_code, 0);
  ASSERT_EQ(run(cb).exit_code, 0);
  EXPECT_EQ(slurp(a / "solution.csv"), slurp(b / "solution.csv"));
  EXPECT_EQ(slurp(a / "mesh_hyperboloid.obj"), slurp(b / "mesh_hyperboloid.obj"));
  auto ja = nlohmann::json::parse(slurp(a / "report.json"));
  auto jb = nlohmann::json::parse(slurp(b / "report.json"));
  EXPECT_EQ(ja, jb);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  write_file(dir / "round.ini", kSolveRound);
  write_file(dir / "bad.ini", "[problem]\nn = 2\nk = 5\n[f0]\nconstant = 1\n");
  write_file(dir / "infeasible.ini", "[problem]\nn = 2\nk = 2\n[f0]\nconstant = 0.9\n");
  write_file(dir / "stall.ini",
             "[f0]\nexpr = 1 + 30*cos(theta)^2\n[continuation]\nnewton_max_iter = 1\nnewton_tol = 1e-14\n"
             "t_step_init = 0.5\nt_step_min = 0.25\n");
  const std::string out = "--out " + (dir / "o").string();
  EXPECT_EQ(run_cli("solve --config " + (dir / "round.ini").string() + " " + out), 0);
  EXPECT_EQ(run_cli("solve --config " + (dir / "bad.ini").string() + " " + out), 2);
  EXPECT_EQ(run_cli("solve --config " + (dir / "absent.ini").string() + " " + out), 5);
  EXPECT_EQ(run_cli("solve --config " + (dir / "infeasible.ini").string() + " " + out), 3);
  EXPECT_EQ(run_cli("solve --config " + (dir / "stall.ini").string() + " " + out), 4);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("solve"), 2);
}

TEST(Cli, OutputDirectoryPrecedence) {
  const auto dir = scratch("cli_out");
  write_file(dir / "round.ini", std::string(kSolveRound) + "[output]\ndir = " + (dir / "from_config").string() + "\n");
  const std::string cfg = "--config " + (dir / "round.ini").string();
  ASSERT_EQ(run_cli("solve " + cfg), 0);
  EXPECT_TRUE(fs::exists(dir / "from_config" / "report.json"));
  ASSERT_EQ(run_cli("solve " + cfg, "HYPCM_OUT_DIR=" + (dir / "from_env").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "from_env" / "report.json"));
  ASSERT_EQ(run_cli("solve " + cfg + " --out " + (dir / "from_flag").string(),
                    "HYPCM_OUT_DIR=" + (dir / "from_env2").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "report.json"));
  EXPECT_FALSE(fs::exists(dir / "from_env2"));
}

TEST(Cli, SphereTest) {
  const auto dir = scratch("cli_sphere");
  EXPECT_EQ(run_cli("sphere-test --out " + dir.string() + " --seed 3"), 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(report["within_budget"].get<bool>());
  EXPECT_EQ(report["config"]["seed"], 3);
}
