#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "exradon/config.hpp"
#include "exradon/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open config file: " << path << "\n";
    std::exit(1);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exterior exponential Radon transform experiments"};
  app.require_subcommand(1);

  std::string config_path;
  double lambda_override = 0.0;
  bool lambda_set = false;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  std::string out_override;

  const std::vector<std::string> commands{"forward",     "counterexample", "recover",
                                          "convolution", "laplace",        "helgason",
                                          "probe"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--lambda", lambda_override, "override the attenuation parameter")
        ->each([&](const std::string&) { lambda_set = true; });
    sub->add_option("--seed", seed_override, "override the sampling seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("-o,--out", out_override, "override the output directory");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    exradon::ExperimentConfig cfg = exradon::parse_config(read_file(config_path));
    if (cfg.command.empty()) {
      cfg.command = command;
    } else if (cfg.command != command) {
      std::cerr << "config names command '" << cfg.command << "' but '" << command
                << "' was invoked\n";
      return 1;
    }
    if (lambda_set) cfg.lambda = lambda_override;
    if (seed_set) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;

    const exradon::RunResult result = exradon::run(cfg);
    std::cout << result.summary << "\n";
    for (const auto& f : result.outputs) std::cout << "  wrote " << f.path << "\n";
    return result.exit_code;
  } catch (const exradon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
