#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ftlab/cli.hpp"

int main(int argc, char** argv) {
  ftlab::cli::RunOptions options;
  CLI::App app{"ftlab: flat-trace statistics for expanding circle maps"};
  std::string config;
  std::uint64_t seed = 0;
  std::string output = options.output_dir.string();
  app.add_option("subcommand", options.subcommand,
                 "orbits | sample-field | trace | experiment | pressure | resonances (optional if set in the config)");
  app.add_option("-c,--config", config, "JSON config file");
  auto* seed_opt = app.add_option("-s,--seed", seed, "master seed, overrides the config");
  app.add_option("-o,--output", output, "output directory")->capture_default_str();
  app.add_option("-t,--threads", options.threads, "worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "INVALID_ARGUMENT: " << e.what() << "\n";
    return ftlab::cli::kExitValidation;
  }
  options.config_path = config;
  options.output_dir = output;
  if (*seed_opt) options.seed = seed;
  return ftlab::cli::run(options, std::cerr);
}
