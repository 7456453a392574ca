#ifndef CURVECAST_CLI_HPP
#define CURVECAST_CLI_HPP

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace curvecast::cli {

struct BuildOptions {
  std::string db_path;
  int granularity = 10;
  std::string linkage = "average";
  std::optional<double> cut_distance;
  std::optional<int> cluster_count;
  double threshold = 0.0;
  std::string out_path;
};

struct PredictOptions {
  std::string model_path;
  std::vector<std::string> context_pairs;
  std::optional<double> total;
  std::string format = "table";
  std::optional<std::string> db_path;
};

struct MonitorOptions {
  std::string model_path;
  std::string project_path;
  double tolerance = 0.0;
  std::string strategy;
  double delta = 0.0;
  std::optional<std::string> db_path;
};

struct EvaluateOptions {
  std::string db_path;
  std::string strategy;
  double delta = 0.0;
  int granularity = 10;
  std::string linkage = "average";
  std::optional<double> cut_distance;
  std::optional<int> cluster_count;
  double threshold = 0.0;
  std::optional<std::string> report_path;
  std::string format = "table";
};

struct ImportOptions {
  std::string points_path;
  std::string context_path;
  std::string out_path;
};

void cmd_build(const BuildOptions& options, std::ostream& out, std::ostream& err);
void cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);
void cmd_monitor(const MonitorOptions& options, std::ostream& out, std::ostream& err);
void cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
void cmd_import(const ImportOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and dispatches.
/// Exit codes: 0 ok, 2 input error, 3 internal invariant violation.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace curvecast::cli

#endif
