#include "thermolab/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int exit_code(thermolab::ErrorKind kind) {
  switch (kind) {
    case thermolab::ErrorKind::Usage:
    case thermolab::ErrorKind::Config: return 2;
    case thermolab::ErrorKind::Resource: return 4;
    default: return 5;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume thermodynamics experiments"};
  app.set_version_flag("--version", thermolab::library_version());
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  long seed = -1, threads = -1;
  for (const auto& name : thermolab::subcommands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "key=value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    sub->add_option("--seed", seed, "random seed; overrides the config")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", threads, "worker threads; overrides the config")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    auto cfg = thermolab::ExperimentConfig::make(sub, thermolab::KeyValueConfig::from_file(config_path));
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (threads > 0) cfg.threads = static_cast<std::size_t>(threads);
    cfg.out_dir = out_dir;
    const auto manifest = thermolab::run(cfg);
    for (const auto& a : manifest.artifacts) std::cout << (cfg.out_dir / a.path).string() << " (" << a.rows << " rows)\n";
    std::cout << (cfg.out_dir / "manifest.json").string() << '\n';
    if (!manifest.checks_passed) {
      std::cerr << "thermolab: " << sub << ": a check exceeded its tolerance; see manifest.json\n";
      return 3;
    }
    return 0;
  } catch (const thermolab::Error& e) {
    std::cerr << "thermolab: " << thermolab::to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "thermolab: " << e.what() << '\n';
    return 1;
  }
}
