#include "uavnet/config.hpp"
#include "uavnet/experiments.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace uavnet;

int main(int argc, char** argv) {
  CLI::App app{"UAV network experiments: chanest, placement, routing"};
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  bool dump_only = false;
  app.add_option("--config", config_path, "key = value experiment file (defaults if omitted)");
  app.add_option("--seed", seeds, "seed list overriding experiment.seeds")->delimiter(',');
  app.add_option("--out", out_dir, "output directory overriding experiment.out_dir");
  app.add_flag("--dump-config", dump_only, "print the resolved configuration and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : experiments::kExitConfigError;
  }

  config::ExperimentConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    cfg = config::parse_config(text);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return experiments::kExitConfigError;
  }

  if (dump_only) {
    std::cout << config::dump_config(cfg);
    return experiments::kExitOk;
  }

  const auto outcome = experiments::run_experiment(cfg);
  for (const auto& f : outcome.files) std::cout << cfg.out_dir << "/" << f << "\n";
  if (outcome.exit_code != experiments::kExitOk) {
    std::cerr << (outcome.exit_code == experiments::kExitConfigError ? "config error: "
                                                                      : "run aborted: ")
              << outcome.error << "\n";
  }
  return outcome.exit_code;
}
