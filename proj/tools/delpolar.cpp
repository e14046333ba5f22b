#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "delpolar/experiment/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Polar coding over the binary deletion channel with guard bands"};
  app.require_subcommand(1);

  delpolar::experiment::CommandLine cl;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string config, out = ".";

  const std::pair<const char*, const char*> commands[] = {
      {"encode", "Insert guard bands into a data word and print the codeword"},
      {"decode", "Successive-cancellation decode of a received word"},
      {"fer", "End-to-end frame error rate experiment"},
      {"design-frozen", "Estimate Bhattacharyya parameters and choose the frozen set"},
      {"gbm-stats", "Monte-Carlo frequencies of the guard-band events"},
      {"polarization-lab", "Simulate the coupled polarization processes"},
      {"oracle-check", "Run the small-N verification battery"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--workers", workers, "Worker threads (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    cl.command = sub->get_name();
    if (sub->count("--seed") > 0)
      cl.seed = seed;
    if (sub->count("--workers") > 0)
      cl.workers = workers;
  }
  cl.config = config;
  cl.out = out;
  return delpolar::experiment::run_command(cl);
}
