#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "minipic/bench.hpp"

using namespace minipic;

namespace {

constexpr int kConfigExit = 2;

struct Options {
  std::string config_path;
  std::string benchmark;
  std::string scale = "desk";
  std::optional<std::string> mode;
  std::optional<int> collections, workers, bin_x_size, iterations;
  std::optional<std::uint64_t> seed;
  std::string trace_path, timing_path, density_path;
};

SimConfig resolve_config(const Options& o) {
  SimConfig c;
  const bool builtin = !o.benchmark.empty() && o.benchmark != "custom";
  if (builtin) c = builtin_benchmark(o.benchmark, parse_scale(o.scale));
  if (!o.config_path.empty()) c = load_config_file(o.config_path, c);
  if (!builtin && o.config_path.empty())
    throw ConfigError("--benchmark custom (or no benchmark) requires --config");
  if (o.mode) c.mode = parse_mode(*o.mode);
  if (o.collections) c.n_collections = *o.collections;
  if (o.workers) c.workers_per_collection = *o.workers;
  if (o.bin_x_size) c.bin_x_size = *o.bin_x_size;
  if (o.iterations) c.n_iterations = *o.iterations;
  if (o.seed) c.rng_seed = *o.seed;
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minipic: 2D3V particle-in-cell mini-app with task-based macro-particle operators"};
  Options o;
  app.add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--benchmark", o.benchmark, "Built-in benchmark")
      ->check(CLI::IsMember({"uniform_plasma_2d", "slab_expansion_2d", "custom"}));
  app.add_option("--scale", o.scale, "Preset scale")->check(CLI::IsMember({"desk", "full"}));
  app.add_option("--mode", o.mode, "Execution mode")->check(CLI::IsMember({"tasks_on", "tasks_off"}));
  app.add_option("--collections", o.collections, "Number of patch collections")->check(CLI::PositiveNumber);
  app.add_option("--workers", o.workers, "Workers per collection")->check(CLI::PositiveNumber);
  app.add_option("--bin-x-size", o.bin_x_size, "Bin width in cells")->check(CLI::PositiveNumber);
  app.add_option("--iterations", o.iterations, "Number of iterations")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--trace", o.trace_path, "Write a Chrome trace JSON");
  app.add_option("--timing", o.timing_path, "Append a timing row to this CSV");
  app.add_option("--density-dump", o.density_path, "Write per-patch particle counts CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  SimConfig config;
  try {
    config = resolve_config(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  }

  try {
    Domain domain = build_domain(config);
    Tracer tracer;
    RunOptions run;
    if (!o.trace_path.empty()) {
      tracer = Tracer(config.n_collections, config.workers_per_collection);
      run.tracer = &tracer;
    }
    const SimulationReport report = run_simulation(domain, run);

    if (!o.trace_path.empty()) write_trace(tracer.merged(), o.trace_path);
    if (!o.timing_path.empty()) append_timing_row(o.timing_path, timing_row(report));
    if (!o.density_path.empty()) write_density_histogram(domain, o.density_path);

    std::cout << kTimingHeader << '\n' << format_timing_row(timing_row(report)) << '\n';
    std::cout << "particles=" << domain.particle_count() << " tasks=" << report.tasks_executed
              << " migrated_inter=" << report.migration.inter_collection
              << " rebalances=" << report.rebalances << '\n';
    const OpSeconds ops = report.op_totals();
    std::cout << "op_seconds";
    for (int k = 0; k < kOpKinds; ++k)
      if (ops[k] > 0) std::cout << ' ' << op_name(static_cast<OpKind>(k)) << '=' << ops[k];
    std::cout << '\n';
    if (report.leaked_buffers != 0) {
      std::cerr << "error: " << report.leaked_buffers << " gather buffers left sized\n";
      return 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
