#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "costrain/outcomes.hpp"
#include "costrain/reduction.hpp"
#include "costrain/scenario.hpp"

namespace costrain {

struct CsvTable {
  std::string name;
  std::vector<std::string> comments;  // emitted as '# ' header lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_text() const;  // floats at 17 significant digits
};

struct RunArtifacts {
  nlohmann::ordered_json report;
  std::vector<CsvTable> tables;
};

/// Command-line overrides applied on top of the scenario file.
struct RunOptions {
  std::optional<double> epsilon;
  std::optional<double> t_end;
  std::optional<double> tau_end;
  std::optional<int> samples;
  std::optional<std::vector<double>> epsilons;  // scaling study only
  int threads = 1;
};

RunArtifacts run_simulate_full(const Scenario& sc, const RunOptions& opt = {});
RunArtifacts run_simulate_reduced(const Scenario& sc, const RunOptions& opt = {});
RunArtifacts run_compare(const Scenario& sc, const RunOptions& opt = {});
RunArtifacts run_classify(const Scenario& sc, const RunOptions& opt = {});
RunArtifacts run_scaling(const Scenario& sc, const RunOptions& opt = {});

/// Writes <stem>_report.json and/or the CSV tables under out_dir.
/// format is one of "csv", "json", "both". Returns the written paths.
std::vector<std::string> write_artifacts(const RunArtifacts& art, const std::string& out_dir,
                                         const std::string& format, const std::string& stem);

}  // namespace costrain
