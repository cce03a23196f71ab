#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "bolax/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bolax: Lax spectrum, Birman-Schwinger counts and BO evolution"};
  std::string config_path, outdir;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--outdir", outdir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "seed for randomized starts and verify pairs (overrides the config)");
  app.add_option("--threads", threads, "worker threads (runs are single-threaded; recorded in timings.json)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "print nothing on success");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bolax::cli::kUsage;
  }

  using namespace bolax::cli;
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (!outdir.empty()) cfg.outdir = outdir;
    if (seed) cfg.seed = *seed;
  } catch (const std::exception& e) {
    std::cerr << "bolax: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const RunReport rep = run(cfg);
    write_outputs(rep, cfg.outdir, threads);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!quiet || !rep.passed()) {
      for (const auto& c : rep.checks)
        if (!quiet || !c.pass)
          std::printf("%s %s value=%.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                      c.relation.c_str(), c.tolerance);
      std::printf("%s: %s (report: %s/report.json)\n", cfg.command.c_str(), rep.passed() ? "pass" : "fail",
                  cfg.outdir.c_str());
    }
    return rep.passed() ? kPass : kCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "bolax: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
