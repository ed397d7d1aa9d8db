#include <CLI11.hpp>

#include "app.hpp"

int main(int argc, char** argv) {
  anisoflow::app::Options opt;
  CLI::App cli{"Stationary anisotropic compressible flow solver"};
  cli.add_option("--config", opt.config_path, "configuration file")->required()->check(
      CLI::ExistingFile);
  cli.add_option("--out", opt.out_dir, "output directory")->required();
  cli.add_option("--mode", opt.mode, "run mode")
      ->check(CLI::IsMember({"check-hypotheses", "solve", "continuation", "diagnose"}));
  cli.add_flag("--strict", opt.strict, "abort with exit code 3 when (H) fails");
  cli.add_flag("--dump-fields", opt.dump_fields, "write binary field dumps");
  cli.add_option("--seed", opt.seed, "seed for the initial perturbation");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : anisoflow::app::config_error;
  }
  return anisoflow::app::run(opt);
}
