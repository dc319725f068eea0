#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "costrain/run.hpp"

namespace {

void print_error(const char* kind, const std::string& message) {
  nlohmann::ordered_json err;
  err["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "costrain: N-strain SIS coinfection dynamics -- full compartmental system, "
      "replicator reduction on the slow manifold, invasion-fitness analysis"};
  app.fallthrough(true);
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string format = "both";
  std::optional<double> epsilon, t_end, tau_end;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> epsilons;
  int threads = 1;

  app.add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  app.add_option("--epsilon", epsilon, "Override the scenario's perturbation magnitude");
  app.add_option("--t-end", t_end, "Override the fast-time horizon");
  app.add_option("--tau-end", tau_end, "Override the slow-time horizon");
  app.add_option("--out", out_dir, "Output directory (default: out)");
  app.add_option("--format", format, "Output format: csv | json | both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--samples", samples, "Override the number of output samples");
  app.add_option("--seed", seed, "Override the seeds of random deviation specs");
  app.add_option("--threads", threads, "Parallelism for the scaling study");
  app.add_option("--epsilons", epsilons, "Scaling study epsilon list")->delimiter(',');

  auto* cmd_full = app.add_subcommand("simulate-full", "Integrate the full compartmental system");
  auto* cmd_reduced =
      app.add_subcommand("simulate-reduced", "Integrate the replicator reduction");
  auto* cmd_compare =
      app.add_subcommand("compare", "Run both systems and evaluate the reduction error");
  auto* cmd_classify =
      app.add_subcommand("classify", "Pairwise outcomes, predicted winner, persistent set");
  auto* cmd_scaling = app.add_subcommand("scaling", "Reduction-error scaling across epsilons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("validation", e.what());
    return 2;
  }

  try {
    const costrain::Scenario sc = costrain::load_scenario(scenario_path, seed);
    costrain::RunOptions opt;
    opt.epsilon = epsilon;
    opt.t_end = t_end;
    opt.tau_end = tau_end;
    opt.samples = samples;
    opt.epsilons = epsilons;
    opt.threads = threads;

    costrain::RunArtifacts art;
    std::string stem = sc.name;
    if (cmd_full->parsed()) {
      art = costrain::run_simulate_full(sc, opt);
      stem += "_simulate_full";
    } else if (cmd_reduced->parsed()) {
      art = costrain::run_simulate_reduced(sc, opt);
      stem += "_simulate_reduced";
    } else if (cmd_compare->parsed()) {
      art = costrain::run_compare(sc, opt);
      stem += "_compare";
    } else if (cmd_classify->parsed()) {
      art = costrain::run_classify(sc, opt);
      stem += "_classify";
    } else if (cmd_scaling->parsed()) {
      art = costrain::run_scaling(sc, opt);
      stem += "_scaling";
    }

    for (const std::string& path : costrain::write_artifacts(art, out_dir, format, stem))
      std::cout << path << "\n";
    return 0;
  } catch (const costrain::ValidationError& e) {
    print_error("validation", e.what());
    return 2;
  } catch (const costrain::NumericalError& e) {
    print_error("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 3;
  }
}
