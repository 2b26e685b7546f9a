// featdyn: run experiments, sweeps, gradient checks and plots from the shell.
#include "featdyn/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace featdyn;
  CLI::App app{"Feature-learning dynamics lab: two-layer classifier vs diffusion denoiser"};
  app.require_subcommand(1);

  std::string spec_file;
  auto* run = app.add_subcommand("run", "Train one experiment described by an INI spec");
  run->add_option("spec", spec_file, "experiment spec (.ini)")->required();

  std::string sweep_file;
  int jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of (model, mu, seed) cells");
  sweep->add_option("spec", sweep_file, "sweep spec (.ini)")->required();
  sweep->add_option("--jobs,-j", jobs, "parallel cells (overrides sweep.jobs)")->check(CLI::PositiveNumber);

  GradcheckOptions gc;
  gc.csv = "gradcheck.csv";
  std::string gc_out;
  auto* grad = app.add_subcommand("gradcheck", "Check analytic gradients and the closed-form loss");
  grad->add_option("--instances", gc.instances, "finite-difference instances")->check(CLI::NonNegativeNumber);
  grad->add_option("--mc-instances", gc.mc_instances, "Monte-Carlo loss instances")->check(CLI::NonNegativeNumber);
  grad->add_option("--mc-draws", gc.mc_draws, "noise draws per Monte-Carlo estimate");
  grad->add_option("--seed", gc.seed, "instance seed");
  grad->add_option("--out", gc_out, "report CSV (default gradcheck.csv)");

  std::string csv, plot_out;
  std::vector<std::string> cols;
  bool log_x = false;
  auto* plot = app.add_subcommand("plot", "Render CSV columns as an SVG line chart");
  plot->add_option("csv", csv, "input CSV")->required();
  plot->add_option("--cols", cols, "columns to draw")->delimiter(',')->required();
  plot->add_option("--out", plot_out, "output SVG")->required();
  plot->add_flag("--logx", log_x, "logarithmic x axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(spec_file, std::cout, std::cerr);
    if (*sweep) return cmd_sweep(sweep_file, jobs > 0 ? std::optional<int>(jobs) : std::nullopt, std::cout, std::cerr);
    if (*grad) {
      if (!gc_out.empty()) gc.csv = gc_out;
      return cmd_gradcheck(gc, std::cout, std::cerr);
    }
    if (*plot) return emit_plot(csv, cols, plot_out, log_x, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitConfig;
}
