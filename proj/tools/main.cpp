#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qcayley/app/experiment.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config, "INI file applied on top of the command defaults")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts.out, "Output directory")->required();
  sub->add_option("--seed", opts.seed, "Seed for random initial guesses");
  sub->add_option("--workers", opts.workers, "Methods or couplings run concurrently");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qcayley;
  CLI::App app{"Cayley-type propagators and Krotov control experiments"};
  app.require_subcommand(1);
  Options opts;
  for (const char* name : {"propagate", "optimize", "order-study", "bench"}) {
    add_common(app.add_subcommand(name, std::string("Run the ") + name + " experiment"), opts);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const app::Command command = app::parse_command(app.get_subcommands().front()->get_name());
    app::ExperimentConfig config = opts.config.empty() ? app::default_config(command)
                                                       : app::load_config(command, opts.config);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.workers) config.workers = *opts.workers;
    const app::ResultBundle bundle = app::run_experiment(config, opts.out);
    std::cout << "wrote " << bundle.files.size() << " files to " << bundle.out_dir.string()
              << " (config " << app::hex_hash(bundle.config_hash) << ")\n";
    return 0;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
