#include "hypcm/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "hypcm/estimates.hpp"
#include "hypcm/hypersurface.hpp"
#include "hypcm/solver.hpp"
#include "hypcm/steiner.hpp"
#include "hypcm/symfun.hpp"

namespace hypcm {

using json = nlohmann::ordered_json;

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Infeasible:
    case ErrorCategory::Undetermined: return 3;
    case ErrorCategory::ContinuationStall: return 4;
    case ErrorCategory::Io: return 5;
    default: return 1;
  }
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json verdict_json(const Verdict& v) {
  return {{"name", v.name}, {"anchor", v.anchor}, {"applicable", v.applicable},
          {"pass", v.pass},  {"observed", v.observed}, {"bound", v.bound}};
}

json apriori_json(const AprioriReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(verdict_json(v));
  return {{"c0", r.c0},
          {"c1", r.c1},
          {"rho_min", r.rho_min},
          {"rho_max", r.rho_max},
          {"grad_gamma_max", r.grad_gamma_max},
          {"lambda_max", r.lambda_max},
          {"admissible", r.admissible},
          {"admissible_nodes", r.admissible_nodes},
          {"tol", r.tol},
          {"pass", r.pass()},
          {"verdicts", verdicts}};
}

json gradient_bound_json(const GradientBoundCheck& g) {
  return {{"anchor", "k = n gradient estimate: |grad gamma~| < 1/phi^2 at the maximum of |grad gamma~|"},
          {"applicable", g.applicable},
          {"sup_grad_gamma_tilde", g.sup_grad_gamma_tilde},
          {"bound", g.bound},
          {"min_bound", g.min_bound},
          {"slack", g.slack},
          {"pass", g.pass}};
}

json trace_json(const std::vector<TraceEntry>& trace) {
  json out = json::array();
  for (const auto& e : trace) out.push_back({{"t", e.t}, {"newton_iters", e.newton_iters}, {"residual_norm", e.residual_norm}});
  return out;
}

json solve_report_json(const SolveReport& r) {
  json j = {{"anchor", "continuity method from the geodesic sphere at t = 0"},
            {"t_trace", trace_json(r.t_trace)},
            {"final_residual", r.final_residual},
            {"final_raw_residual", r.final_raw_residual},
            {"admissible", r.admissible},
            {"bounds_ok", r.bounds_ok},
            {"accepted_iterates", r.accepted_iterates},
            {"rejected_steps", r.rejected_steps},
            {"wall_notes", r.wall_notes}};
  if (r.apriori) j["apriori"] = apriori_json(*r.apriori);
  if (r.gradient_bound) j["gradient_bound"] = gradient_bound_json(*r.gradient_bound);
  return j;
}

json steiner_json(const SteinerFit& f) {
  return {{"anchor", "parallel volume = sum_r l_{n+1-r}(t) Phi_r"},
          {"phis_fit", f.phis_fit},
          {"phis_direct", f.phis_direct},
          {"t_samples", f.t_samples},
          {"shell_volumes", f.shell_volumes},
          {"condition", f.condition},
          {"max_rel_err", f.max_rel_err}};
}

json config_json(const RunConfig& c) {
  const auto& cc = c.continuation;
  json j = {{"mode", run_mode_name(c.mode)},
            {"n", c.n},
            {"k", c.k},
            {"seed", c.seed},
            {"grid", {{"mode", grid_mode_name(c.grid_mode)}, {"n_theta", c.n_theta}, {"n_phi", c.n_phi}}},
            {"continuation",
             {{"t_step_init", cc.t_step_init},
              {"t_step_min", cc.t_step_min},
              {"newton_tol", cc.newton_tol},
              {"newton_max_iter", cc.newton_max_iter},
              {"fd_eps", cc.fd_eps},
              {"backtrack_factor", cc.backtrack_factor},
              {"max_backtracks", cc.max_backtracks}}}};
  if (c.f0) j["f0"] = c.f0->describe();
  if (c.body) j["body"] = c.body->describe();
  if (c.candidate) j["candidate"] = c.candidate->describe();
  return j;
}

class Emitter {
 public:
  explicit Emitter(const RunConfig& cfg, RunOutcome& out) : dir_(cfg.out_dir), out_(out) {}

  void write(const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto path = (std::filesystem::path(dir_) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << content;
    if (!f) throw IoError("write failed for '" + path + "'");
    out_.files.push_back(path);
  }

 private:
  std::string dir_;
  RunOutcome& out_;
};

std::string solution_csv(const RadialField& r, const GeometryField& g, int k) {
  std::ostringstream os;
  os << "theta,phi,rho,u,kappa1,kappa2,sigma_k\n";
  const SphereGrid& grid = r.grid();
  for (int p = 0; p < grid.size(); ++p) {
    const auto& nd = g[p];
    os << fmt(grid.theta(p)) << ',' << fmt(grid.phi(p)) << ',' << fmt(r.rho()[p]) << ',' << fmt(nd.u) << ','
       << fmt(nd.kappa[0]) << ',' << fmt(nd.kappa[1]) << ',' << fmt(g.sigma(p, k)) << '\n';
  }
  return os.str();
}

// Surface mesh of an n = 2 radial graph: one vertex per (ring, column), two
// pole vertices, quads between rings and triangle fans at the poles.
// Axisymmetric fields are revolved over 2 * n_theta columns.
std::pair<std::string, std::string> mesh_obj(const RadialField& r) {
  const SphereGrid& grid = r.grid();
  const int nt = grid.n_theta();
  const int np = grid.mode() == GridMode::FullS2 ? grid.n_phi() : 2 * nt;
  const double hp = 2.0 * std::numbers::pi / np;
  auto rho_at = [&](int i, int j) {
    return grid.mode() == GridMode::FullS2 ? r.rho()[grid.index(i, j)] : r.rho()[i];
  };
  std::vector<HyperboloidPoint> pts;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double t = grid.ring_thetas()[i];
      const double p = j * hp;
      pts.push_back(embed_point(rho_at(i, j), {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)}));
    }
  double north = 0.0, south = 0.0;
  for (int j = 0; j < np; ++j) {
    north += rho_at(0, j) / np;
    south += rho_at(nt - 1, j) / np;
  }
  pts.push_back(embed_point(north, {0.0, 0.0, 1.0}));
  pts.push_back(embed_point(south, {0.0, 0.0, -1.0}));

  std::ostringstream faces;
  auto vid = [&](int i, int j) { return i * np + ((j % np) + np) % np + 1; };
  for (int i = 0; i + 1 < nt; ++i)
    for (int j = 0; j < np; ++j)
      faces << "f " << vid(i, j) << ' ' << vid(i + 1, j) << ' ' << vid(i + 1, j + 1) << ' ' << vid(i, j + 1) << '\n';
  const int vn = nt * np + 1;
  const int vs = nt * np + 2;
  for (int j = 0; j < np; ++j) {
    faces << "f " << vn << ' ' << vid(0, j) << ' ' << vid(0, j + 1) << '\n';
    faces << "f " << vs << ' ' << vid(nt - 1, j + 1) << ' ' << vid(nt - 1, j) << '\n';
  }

  std::ostringstream hyp, ball;
  hyp << "# hyperboloid model: v x1 x2 x3 x0 (fourth entry carries the time coordinate)\n";
  ball << "# Poincare ball model: x / (1 + x0)\n";
  for (const auto& x : pts) {
    hyp << "v " << fmt(x[1]) << ' ' << fmt(x[2]) << ' ' << fmt(x[3]) << ' ' << fmt(x[0]) << '\n';
    const auto b = poincare_ball(x);
    ball << "v " << fmt(b[0]) << ' ' << fmt(b[1]) << ' ' << fmt(b[2]) << '\n';
  }
  hyp << faces.str();
  ball << faces.str();
  return {hyp.str(), ball.str()};
}

std::shared_ptr<const SphereGrid> make_grid(const RunConfig& cfg) {
  return std::make_shared<const SphereGrid>(SphereGrid::build(cfg.grid_mode, cfg.n_theta, cfg.n_phi, cfg.n));
}

void check_positive(const ScalarField& f, const char* what) {
  for (const double v : f)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite everywhere");
}

void emit_solution(const RunConfig& cfg, Emitter& em, const RadialField& rho, const GeometryField& geom,
                   std::vector<std::string>& notes) {
  if (cfg.emit_csv) em.write("solution.csv", solution_csv(rho, geom, cfg.k));
  if (cfg.emit_mesh) {
    if (rho.grid().dim() != 2) {
      notes.push_back("mesh export skipped: only n = 2 surfaces are embedded");
    } else {
      const auto [hyp, ball] = mesh_obj(rho);
      em.write("mesh_hyperboloid.obj", hyp);
      em.write("mesh_poincare.obj", ball);
    }
  }
}

void run_solve(const RunConfig& cfg, RunOutcome& out, json& report, Emitter& em) {
  const auto grid = make_grid(cfg);
  const ScalarField f0 = cfg.f0->sample(*grid);
  check_positive(f0, "f0");
  if (cfg.k == cfg.n) report["feasibility"] = feasibility_name(feasibility_alexandrov(f0));
  const auto result = continuation_solve(grid, f0, cfg.continuation);
  const GeometryField geom = geometry_from_radial(result.solution);
  report["solve"] = solve_report_json(result.report);
  const auto [lo, hi] = std::minmax_element(result.solution.rho().begin(), result.solution.rho().end());
  report["rho_min"] = *lo;
  report["rho_max"] = *hi;
  std::vector<std::string> notes;
  emit_solution(cfg, em, result.solution, geom, notes);
  report["notes"] = notes;

  const bool ok = result.report.admissible && result.report.bounds_ok;
  out.exit_code = ok ? 0 : 1;
  out.category = ok ? "ok" : "validation-failed";
  std::ostringstream s;
  s << "solve: " << result.report.wall_notes << "\n"
    << "  final residual " << fmt(result.report.final_residual) << ", rho in [" << fmt(*lo) << ", " << fmt(*hi)
    << "], admissible " << (result.report.admissible ? "yes" : "no") << ", bounds " << (result.report.bounds_ok ? "ok" : "FAIL")
    << "\n";
  out.summary = s.str();
}

void run_validate(const RunConfig& cfg, RunOutcome& out, json& report, Emitter& em) {
  const auto grid = make_grid(cfg);
  const ScalarField f0 = cfg.f0->sample(*grid);
  check_positive(f0, "f0");
  const int n = grid->dim();
  std::optional<RadialField> cand;
  if (cfg.candidate) {
    cand.emplace(grid, cfg.candidate->sample(*grid));
  } else {
    auto solved = continuation_solve(grid, f0, cfg.continuation);
    report["solve"] = solve_report_json(solved.report);
    cand.emplace(std::move(solved.solution));
  }
  const GeometryField geom = geometry_from_radial(*cand);
  bool ok = true;
  json checks = json::array();

  const ScalarField target = continuation_target(f0, n, cfg.k, 1.0);
  try {
    const double res = sup_norm(residual(*cand, target, cfg.k));
    const double floor = residual_floor(*cand, target, cfg.k, cfg.continuation.fd_eps);
    const double bound = 10.0 * std::max(cfg.continuation.newton_tol, floor);
    const bool pass = res <= bound;
    checks.push_back({{"name", "residual"}, {"anchor", "prescribed curvature measure equation"}, {"observed", res},
                      {"roundoff_floor", floor}, {"bound", bound}, {"pass", pass}});
    ok = ok && pass;
  } catch (const InadmissibleError& e) {
    checks.push_back({{"name", "residual"}, {"anchor", "prescribed curvature measure equation"}, {"pass", false},
                      {"note", e.what()}});
    ok = false;
  }
  const AprioriReport ap = apriori_report(*cand, geom, f0, cfg.k);
  report["apriori"] = apriori_json(ap);
  ok = ok && ap.pass();
  if (cfg.k == n) {
    const auto gb = gradient_bound_alexandrov(*cand, geom);
    report["gradient_bound"] = gradient_bound_json(gb);
    ok = ok && gb.applicable && gb.pass;
  }
  if (!cfg.perturbations.empty()) {
    std::vector<ScalarField> perts;
    for (const auto& p : cfg.perturbations) perts.push_back(p.sample(*grid));
    const auto up = uniqueness_probe(*cand, f0, cfg.continuation, perts);
    json entries = json::array();
    for (std::size_t i = 0; i < up.entries.size(); ++i) {
      const auto& e = up.entries[i];
      entries.push_back({{"perturbation", cfg.perturbations[i].text}, {"converged", e.converged},
                         {"iterations", e.iterations}, {"sup_diff", e.sup_diff}, {"agrees", e.agrees}, {"note", e.note}});
    }
    report["uniqueness"] = {{"anchor", "uniqueness of the admissible solution"}, {"tolerance", up.tolerance},
                            {"all_agree", up.all_agree}, {"entries", entries}};
    ok = ok && up.all_agree;
  }
  report["checks"] = checks;
  std::vector<std::string> notes;
  emit_solution(cfg, em, *cand, geom, notes);
  report["notes"] = notes;
  out.exit_code = ok ? 0 : 1;
  out.category = ok ? "ok" : "validation-failed";
  out.summary = std::string("validate: ") + (ok ? "all checks pass" : "checks FAILED") + "\n";
}

void run_steiner(const RunConfig& cfg, RunOutcome& out, json& report, Emitter& em) {
  const auto grid = make_grid(cfg);
  const RadialField body(grid, cfg.body->sample(*grid));
  const GeometryField geom = geometry_from_radial(body);
  NodeMask mask = full_mask(*grid);
  if (cfg.mask == "north") mask = northern_hemisphere_mask(*grid);
  if (cfg.mask == "south") mask = complement(northern_hemisphere_mask(*grid));
  const SteinerFit fit = steiner_decompose(geom, mask, cfg.t_samples);
  report["steiner"] = steiner_json(fit);
  if (cfg.emit_csv) {
    std::ostringstream os;
    os << "t,shell_volume,prediction\n";
    for (std::size_t i = 0; i < fit.t_samples.size(); ++i)
      os << fmt(fit.t_samples[i]) << ',' << fmt(fit.shell_volumes[i]) << ','
         << fmt(steiner_prediction(geom, fit.t_samples[i], mask)) << '\n';
    em.write("steiner.csv", os.str());
  }
  std::ostringstream s;
  s << "steiner: max relative fit error " << fmt(fit.max_rel_err) << ", condition " << fmt(fit.condition) << "\n";
  for (std::size_t r = 0; r < fit.phis_fit.size(); ++r)
    s << "  Phi_" << r << "  fit " << fmt(fit.phis_fit[r]) << "  direct " << fmt(fit.phis_direct[r]) << "\n";
  out.summary = s.str();
}

// Draws a point of Gamma_k by rejection from shifted Gaussian vectors.
PrincipalSpectrum cone_sample(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> shift(0.0, 2.0);
  for (;;) {
    std::vector<double> v(n);
    const double s = shift(rng);
    for (auto& x : v) x = normal(rng) + s;
    PrincipalSpectrum l(std::move(v));
    if (gamma_cone_contains(l, k)) return l;
  }
}

void run_sphere_test(const RunConfig& cfg, RunOutcome& out, json& report) {
  const auto start = std::chrono::steady_clock::now();
  json rows = json::array();
  bool ok = true;
  auto check = [&](const std::string& name, double observed, double expected, double tol, bool relative = true) {
    const double err = std::abs(observed - expected) / (relative && expected != 0.0 ? std::abs(expected) : 1.0);
    const bool pass = err <= tol;
    rows.push_back({{"check", name}, {"observed", observed}, {"expected", expected}, {"error", err}, {"tol", tol}, {"pass", pass}});
    ok = ok && pass;
  };
  const double s1 = std::sinh(1.0), c1 = std::cosh(1.0);
  const double pi = std::numbers::pi;

  const auto grid = std::make_shared<const SphereGrid>(SphereGrid::build(GridMode::FullS2, 32, 64));
  const RadialField round(grid, ScalarField(grid->size(), 1.0));
  const GeometryField geom = geometry_from_radial(round);
  check("round sphere: support function", geom[0].u, s1, 1e-12);
  check("round sphere: kappa_1", geom[0].kappa[0], c1 / s1, 1e-12);
  check("round sphere: area element", geom[0].area_el, s1 * s1, 1e-12);
  check("quadrature: total measure", integrate(ScalarField(grid->size(), 1.0), *grid), 4.0 * pi, 1e-12);
  check("Phi_0 = 4 pi cosh^2 1", curvature_measure(geom, 0), 4.0 * pi * c1 * c1, 1e-10);
  check("Phi_1 = 8 pi sinh 1 cosh 1", curvature_measure(geom, 1), 8.0 * pi * s1 * c1, 1e-10);
  check("Phi_2 = 4 pi sinh^2 1", curvature_measure(geom, 2), 4.0 * pi * s1 * s1, 1e-10);
  const double shell = 4.0 * pi * ((std::sinh(3.0) - std::sinh(2.0)) / 4.0 - 0.25);
  check("shell volume t = 0.5", parallel_shell_volume(geom, 0.5), shell, 1e-6);
  const auto fit = steiner_decompose(geom, full_mask(*grid), {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  check("Steiner fit Phi_0", fit.phis_fit[0], 4.0 * pi * c1 * c1, 1e-4);
  check("Steiner fit Phi_1", fit.phis_fit[1], 8.0 * pi * s1 * c1, 1e-4);
  check("Steiner fit Phi_2", fit.phis_fit[2], 4.0 * pi * s1 * s1, 1e-4);
  check("geodesic radius n=2 k=1 c=1", geodesic_sphere_radius(2, 1, 1.0), std::asinh(1.0) / 2.0, 1e-12);
  check("geodesic radius n=2 k=2 c=2", geodesic_sphere_radius(2, 2, 2.0), std::acosh(std::sqrt(2.0)), 1e-12);

  // Symmetric-function properties on random cone points.
  std::mt19937_64 rng(cfg.seed);
  double worst_maclaurin = 0.0, worst_minor = 0.0;
  for (int n = 2; n <= 6; ++n)
    for (int k = 1; k <= n; ++k)
      for (int s = 0; s < 500; ++s) {
        const auto l = cone_sample(rng, n, k);
        const double lhs = std::pow(sigma(l, k) / binomial(n, k), 1.0 / k);
        for (int j = 1; j < k; ++j) {
          const double rhs = std::pow(sigma(l, j) / binomial(n, j), 1.0 / j);
          worst_maclaurin = std::max(worst_maclaurin, (lhs - rhs) / rhs);
        }
        if (k >= 2) {
          std::vector<double> a(n);
          for (int i = 0; i < n; ++i) a[i] = std::abs(l[i]);
          const PrincipalSpectrum abs_l(a);
          const double scale = std::pow(sigma(abs_l, k - 1), 2) + sigma(abs_l, k) * sigma(abs_l, std::max(0, k - 2));
          worst_minor = std::max(worst_minor, std::abs(minor_identity_residual(l, k, 0, 1)) / scale);
        }
      }
  check("Maclaurin worst relative excess (<= 0)", std::max(0.0, worst_maclaurin), 0.0, 1e-12, false);
  check("minor identity worst scaled residual", worst_minor, 0.0, 1e-12, false);

  // Round-sphere continuation on a small axisymmetric grid.
  const auto axi = std::make_shared<const SphereGrid>(SphereGrid::build(GridMode::Axisymmetric, 64));
  ContinuationConfig cc = cfg.continuation;
  cc.k = 1;
  cc.on_accept = nullptr;
  const auto solved = continuation_solve(axi, ScalarField(axi->size(), std::sinh(2.0)), cc);
  double err = 0.0;
  for (const double r : solved.solution.rho()) err = std::max(err, std::abs(r - 1.0));
  check("continuation f0 = sinh 2 recovers rho = 1", err, 0.0, 1e-8, false);

  bool infeasible = false;
  try {
    cc.k = 2;
    continuation_solve(axi, ScalarField(axi->size(), 0.9), cc);
  } catch (const InfeasibleError&) {
    infeasible = true;
  }
  check("k = n with f0 = 0.9 reported infeasible", infeasible ? 1.0 : 0.0, 1.0, 0.0, false);

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = elapsed < 30.0;
  ok = ok && in_budget;
  report["checks"] = rows;
  report["within_budget"] = in_budget;

  std::ostringstream s;
  s << "sphere-test\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "  %-44s %-4s err %.3e (tol %.1e)\n", r["check"].get<std::string>().c_str(),
                  r["pass"].get<bool>() ? "ok" : "FAIL", r["error"].get<double>(), r["tol"].get<double>());
    s << line;
  }
  std::snprintf(line, sizeof line, "  %-44s %-4s %.2f s (budget 30 s)\n", "runtime", in_budget ? "ok" : "FAIL", elapsed);
  s << line;
  out.summary = s.str();
  out.exit_code = ok ? 0 : 1;
  out.category = ok ? "ok" : "validation-failed";
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
  RunOutcome out;
  json report;
  report["status"] = "ok";
  report["config"] = config_json(cfg);
  Emitter em(cfg, out);
  try {
    cfg.validate();
    switch (cfg.mode) {
      case RunMode::Solve: run_solve(cfg, out, report, em); break;
      case RunMode::Validate: run_validate(cfg, out, report, em); break;
      case RunMode::Steiner: run_steiner(cfg, out, report, em); break;
      case RunMode::SphereTest: run_sphere_test(cfg, out, report); break;
    }
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.category());
    out.category = category_name(e.category());
    out.message = e.what();
    if (e.category() == ErrorCategory::Infeasible)
      out.message += " (k = n needs max f0 >= 1; a prescribed 0-th curvature measure below 1 admits no solution)";
    if (const auto* stall = dynamic_cast<const ContinuationStallError*>(&e)) report["t_trace"] = trace_json(stall->trace());
  }
  report["status"] = out.category;
  if (!out.message.empty()) report["message"] = out.message;
  report["exit_code"] = out.exit_code;
  if (cfg.emit_report) {
    try {
      em.write("report.json", report.dump(2) + "\n");
    } catch (const IoError& e) {
      out.exit_code = exit_code_for(ErrorCategory::Io);
      out.category = category_name(ErrorCategory::Io);
      out.message = e.what();
    }
  }
  return out;
}

}  // namespace hypcm
