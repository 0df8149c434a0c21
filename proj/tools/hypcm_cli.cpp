// hypcm: batch front-end.
//
//   hypcm <solve|validate|steiner|sphere-test> [--config PATH] [--out DIR]
//         [--threads N] [--seed S]
//
// Output directory precedence: --out, then HYPCM_OUT_DIR, then [output] dir.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "hypcm/errors.hpp"
#include "hypcm/run.hpp"
#include "hypcm/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Prescribed curvature-measure solver for star-shaped hypersurfaces in hyperbolic space"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "run configuration file");
    if (config_required) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads for Jacobian assembly")->check(CLI::Range(1, 1024));
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; },
                                            "random seed");
  };
  add_common(app.add_subcommand("solve", "solve the prescribed curvature-measure equation"), true);
  add_common(app.add_subcommand("validate", "check a candidate or solved surface against the a priori bounds"), true);
  add_common(app.add_subcommand("steiner", "fit curvature measures from parallel-shell volumes"), true);
  add_common(app.add_subcommand("sphere-test", "built-in self-check"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  hypcm::RunOutcome out;
  try {
    const hypcm::RunMode mode = hypcm::parse_run_mode(name);
    hypcm::RunConfig cfg =
        config_path.empty() ? hypcm::parse_run_config("", mode) : hypcm::load_run_config(config_path, mode);
    if (const char* env = std::getenv("HYPCM_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.continuation.threads = threads;
    if (seed_given) cfg.seed = seed;
    out = hypcm::run(cfg);
  } catch (const hypcm::Error& e) {
    out.exit_code = hypcm::exit_code_for(e.category());
    out.category = hypcm::category_name(e.category());
    out.message = e.what();
  }

  std::cout << out.summary;
  for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
  if (out.exit_code != 0) {
    std::cerr << "hypcm: " << out.category;
    if (!out.message.empty()) std::cerr << ": " << out.message;
    std::cerr << "\n";
  }
  return out.exit_code;
}
