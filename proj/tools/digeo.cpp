#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "digeo/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"convexity experiments on finite direct integrals"};
  app.require_subcommand(0);

  digeo::ExperimentConfig cfg;
  std::string eps_grid = "0.25:1.75:0.25";
  bool list_fixtures = false;

  app.add_flag("--list-fixtures", list_fixtures, "print bundled exemplar spaces and exit");
  app.add_option("task", cfg.task, "modulus | day-bound | check | dual | report");
  app.add_option("--space", cfg.space, "space descriptor path or fixture name");
  app.add_option("--eps-grid", eps_grid, "separation grid start:stop:step, within (0,2]");
  app.add_option("--budget", cfg.budget, "search budget per row");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--format", cfg.format, "csv | json");
  app.add_option("--out", cfg.out, "output path (default digeo_<task>.<ext>)");
  app.add_option("--results", cfg.result_dir, "result store directory (default: DIGEO_RESULTS env)");
  app.add_flag("--serial", cfg.serial, "disable the parallel kernels");

  CLI11_PARSE(app, argc, argv);

  if (list_fixtures) {
    for (const auto& name : digeo::fixture_names()) std::cout << name << "\n";
    return digeo::exit_ok;
  }

  if (std::sscanf(eps_grid.c_str(), "%lf:%lf:%lf", &cfg.eps_start, &cfg.eps_stop, &cfg.eps_step) != 3) {
    std::cerr << "config error: --eps-grid must have the form start:stop:step\n";
    return digeo::exit_bad_config;
  }
  return digeo::run_experiment(cfg);
}
