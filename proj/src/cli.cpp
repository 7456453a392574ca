#include "curvecast/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvecast/canonical.hpp"
#include "curvecast/pipeline.hpp"

namespace curvecast::cli {

using nlohmann::json;

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string signed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.2f", v);
  return buf;
}

std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ContextProfile parse_context_pairs(const std::vector<std::string>& pairs) {
  ContextProfile profile;
  for (const std::string& group : pairs) {
    std::size_t start = 0;
    while (start <= group.size()) {
      const std::size_t comma = group.find(',', start);
      const std::string pair =
          group.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      start = comma == std::string::npos ? group.size() + 1 : comma + 1;
      const std::size_t eq = pair.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::ParseError,
                    "context pair '" + pair + "' is not of the form attribute=value");
      }
      const std::string attribute = pair.substr(0, eq);
      const std::string value = pair.substr(eq + 1);
      if (value == kMissingValue) {
        throw Error(ErrorCode::ParseError, "the missing-value marker is reserved");
      }
      if (profile.has(attribute)) {
        throw Error(ErrorCode::ParseError, "attribute '" + attribute + "' given twice");
      }
      profile.set(attribute, value);
    }
  }
  return profile;
}

ClusteringParams make_params(const std::string& linkage, const std::optional<double>& cut,
                             const std::optional<int>& clusters) {
  ClusteringParams params;
  params.linkage = linkage_from_string(linkage);
  params.cut_distance = cut;
  params.target_count = clusters;
  return params;
}

std::string stop_rule_text(const ClusteringParams& params) {
  if (params.cut_distance) return "cut=" + sig12(*params.cut_distance);
  if (params.target_count) return "clusters=" + std::to_string(*params.target_count);
  return "?";
}

void warn_on_fingerprint_mismatch(const ClusterModel& model,
                                  const std::optional<std::string>& db_path, std::ostream& err) {
  if (!db_path) return;
  const std::string fingerprint = database_fingerprint(load_database(*db_path));
  if (fingerprint != model.db_fingerprint) {
    err << "warning: model fingerprint " << model.db_fingerprint << " does not match database "
        << fingerprint << "; the model was built from different data\n";
  }
}

json report_to_json(const EvaluationReport& report) {
  json rows = json::array();
  for (const EvaluationRow& row : report.rows) {
    rows.push_back(json{{"id", row.project_id},
                        {"assigned_cluster", row.assigned_cluster},
                        {"gof", row.goodness_of_fit},
                        {"mae", row.mae},
                        {"rmse", row.rmse},
                        {"baseline_mae", row.baseline_mae},
                        {"predicted", row.predicted},
                        {"fold_fingerprint", row.fold_fingerprint}});
  }
  return json{{"strategy", report.strategy},
              {"granularity", report.granularity},
              {"aggregates", json{{"mean_mae", report.mean_mae},
                                  {"median_mae", report.median_mae},
                                  {"mean_rmse", report.mean_rmse},
                                  {"baseline_mean_mae", report.baseline_mean_mae},
                                  {"baseline_median_mae", report.baseline_median_mae}}},
              {"projects", rows}};
}

}  // namespace

void cmd_build(const BuildOptions& options, std::ostream& out, std::ostream& err) {
  (void)err;
  const ProjectDatabase db = load_database(options.db_path);
  const Granularity granularity(options.granularity);
  const ClusteringParams params =
      make_params(options.linkage, options.cut_distance, options.cluster_count);
  const ClusterModel model = build_model(db, granularity, params, options.threshold);
  save_model(model, options.out_path);

  out << "projects: " << db.records.size() << ", granularity: " << granularity.checkpoints()
      << ", linkage: " << to_string(params.linkage) << ", stop: " << stop_rule_text(params)
      << ", context threshold: " << sig12(options.threshold) << "\n";
  for (const Cluster& cluster : model.clusters) {
    out << "cluster " << cluster.cluster_id << ": " << cluster.member_ids.size() << " project"
        << (cluster.member_ids.size() == 1 ? "" : "s") << " [";
    for (std::size_t i = 0; i < cluster.member_ids.size(); ++i) {
      out << (i ? ", " : "") << cluster.member_ids[i];
    }
    out << "]\n";
    // Strongest signature values first.
    std::vector<std::pair<std::string, SignatureEntry>> entries;
    for (const auto& [attribute, values] : cluster.signature.entries()) {
      for (const SignatureEntry& entry : values) entries.push_back({attribute, entry});
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.second.weight != b.second.weight) return a.second.weight > b.second.weight;
      if (a.first != b.first) return a.first < b.first;
      return a.second.value < b.second.value;
    });
    out << "  typical context:";
    if (entries.empty()) out << " (none)";
    for (std::size_t i = 0; i < entries.size() && i < 3; ++i) {
      out << (i ? ", " : " ") << entries[i].first << "=" << entries[i].second.value << " ("
          << signed2(entries[i].second.weight) << ")";
    }
    out << "\n";
  }
  out << "model written to " << options.out_path << " (fingerprint " << model.db_fingerprint
      << ")\n";
}

void cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err) {
  const ClusterModel model = load_model(options.model_path);
  warn_on_fingerprint_mismatch(model, options.db_path, err);
  const ContextProfile context = parse_context_pairs(options.context_pairs);

  const int cluster_id = assign_by_context(context, model);
  const double gof = goodness_of_fit(context, model.cluster_by_id(cluster_id).signature);
  const PredictedCurve prediction = predict_curve(model, cluster_id, options.total);

  if (options.format == "json") {
    json doc{{"assigned_cluster", cluster_id},
             {"goodness_of_fit", gof},
             {"percent", prediction.percent.values()}};
    if (prediction.absolute) doc["absolute"] = *prediction.absolute;
    out << canonical_dump(doc);
    return;
  }
  if (options.format == "csv") {
    out << "checkpoint,percent" << (prediction.absolute ? ",absolute" : "") << "\n";
    for (int i = 1; i <= prediction.percent.granularity(); ++i) {
      out << i << "," << sig12(prediction.percent.at_checkpoint(i));
      if (prediction.absolute) out << "," << sig12((*prediction.absolute)[i - 1]);
      out << "\n";
    }
    return;
  }
  out << "assigned cluster: " << cluster_id << "\n";
  out << "goodness of fitting: " << sig12(gof) << "\n";
  out << std::setw(10) << "checkpoint" << std::setw(10) << "percent";
  if (prediction.absolute) out << std::setw(12) << "absolute";
  out << "\n";
  for (int i = 1; i <= prediction.percent.granularity(); ++i) {
    out << std::setw(10) << i << std::setw(10) << fixed2(prediction.percent.at_checkpoint(i));
    if (prediction.absolute) out << std::setw(12) << fixed2((*prediction.absolute)[i - 1]);
    out << "\n";
  }
}

void cmd_monitor(const MonitorOptions& options, std::ostream& out, std::ostream& err) {
  const ClusterModel model = load_model(options.model_path);
  warn_on_fingerprint_mismatch(model, options.db_path, err);
  const InFlightProject project = load_inflight(options.project_path);
  if (!project.baseline_total) {
    throw Error(ErrorCode::BadTotal,
                "project file '" + options.project_path + "' lacks baseline_total");
  }
  if (!(options.tolerance > 0.0)) {
    throw Error(ErrorCode::BadTolerance, "tolerance must be positive");
  }
  Strategy strategy{strategy_from_string(options.strategy), options.delta};
  strategy.validate();

  const int initial = assign_by_context(project.context, model);
  PredictionState state(project.project_id, model, initial, *project.baseline_total);
  out << "project " << project.project_id << ": assigned cluster " << initial
      << " (goodness of fitting "
      << sig12(goodness_of_fit(project.context, model.cluster_by_id(initial).signature)) << ")\n";
  out << std::setw(10) << "checkpoint" << std::setw(11) << "predicted" << std::setw(9) << "actual"
      << std::setw(9) << "delta" << std::setw(9) << "flag" << "\n";

  int flags = 0, switches = 0;
  for (double absolute : project.actuals) {
    const DeviationReport report = monitor(state, state.to_percent(absolute), options.tolerance);
    out << std::setw(10) << report.checkpoint << std::setw(11) << fixed2(report.predicted_value)
        << std::setw(9) << fixed2(report.actual_value) << std::setw(9) << signed2(report.delta)
        << std::setw(9) << (report.flagged ? "FLAG" : "ok") << "\n";
    if (report.flagged) {
      ++flags;
      const int before = state.assigned_cluster();
      const int after = reassign(state, model, project.context, strategy);
      if (after != before) {
        ++switches;
        out << "checkpoint " << report.checkpoint << ": reassigned cluster " << before << " -> "
            << after << " (strategy " << to_string(strategy.kind) << ")\n";
      }
    }
  }
  out << flags << " flagged checkpoint" << (flags == 1 ? "" : "s") << ", " << switches
      << " reassignment" << (switches == 1 ? "" : "s") << "\n";
}

void cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  (void)err;
  const ProjectDatabase db = load_database(options.db_path);
  const Granularity granularity(options.granularity);
  const ClusteringParams params =
      make_params(options.linkage, options.cut_distance, options.cluster_count);

  std::vector<Strategy> strategies;
  if (options.strategy == "all") {
    strategies = {{StrategyKind::Distance, options.delta},
                  {StrategyKind::Context, options.delta},
                  {StrategyKind::Hybrid, options.delta}};
  } else {
    strategies = {{strategy_from_string(options.strategy), options.delta}};
  }

  json reports_json = json::array();
  for (const Strategy& strategy : strategies) {
    const EvaluationReport report =
        run_leave_one_out(db, granularity, params, options.threshold, strategy);
    reports_json.push_back(report_to_json(report));
    if (options.format == "table") {
      out << "strategy: " << report.strategy << " (granularity " << report.granularity
          << ", linkage " << to_string(params.linkage) << ", " << stop_rule_text(params) << ")\n";
      out << std::setw(16) << "project" << std::setw(9) << "cluster" << std::setw(10) << "gof"
          << std::setw(9) << "mae" << std::setw(9) << "rmse" << std::setw(14) << "baseline_mae"
          << "\n";
      for (const EvaluationRow& row : report.rows) {
        out << std::setw(16) << row.project_id << std::setw(9) << row.assigned_cluster
            << std::setw(10) << fixed2(row.goodness_of_fit) << std::setw(9) << fixed2(row.mae)
            << std::setw(9) << fixed2(row.rmse) << std::setw(14) << fixed2(row.baseline_mae)
            << "\n";
      }
      out << "mean MAE " << fixed2(report.mean_mae) << ", median MAE " << fixed2(report.median_mae)
          << ", mean RMSE " << fixed2(report.mean_rmse) << "; baseline mean MAE "
          << fixed2(report.baseline_mean_mae) << ", baseline median MAE "
          << fixed2(report.baseline_median_mae) << "\n";
    }
  }

  const json doc{{"reports", std::move(reports_json)}};
  if (options.format == "json") out << canonical_dump(doc);
  if (options.report_path) {
    std::ofstream file(*options.report_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw Error(ErrorCode::ParseError, "cannot write '" + *options.report_path + "'");
    }
    file << canonical_dump(doc);
  }
}

void cmd_import(const ImportOptions& options, std::ostream& out, std::ostream& err) {
  (void)err;
  const ProjectDatabase db = import_csv(options.points_path, options.context_path);
  save_database(db, options.out_path);
  out << "imported " << db.records.size() << " project" << (db.records.size() == 1 ? "" : "s")
      << " to " << options.out_path << " (fingerprint " << database_fingerprint(db) << ")\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cluster historical project curves and predict attribute distributions"};
  app.require_subcommand(1);

  BuildOptions build;
  CLI::App* build_cmd = app.add_subcommand("build", "build a cluster model from a database");
  build_cmd->add_option("--db", build.db_path, "project database (JSON)")->required();
  build_cmd->add_option("--granularity", build.granularity, "checkpoints per curve (default 10)");
  build_cmd->add_option("--linkage", build.linkage, "single | average | complete");
  build_cmd->add_option("--cut", build.cut_distance, "stop merging above this linkage distance");
  build_cmd->add_option("--clusters", build.cluster_count, "stop at this many clusters");
  build_cmd->add_option("--threshold", build.threshold, "context weight threshold (default 0)");
  build_cmd->add_option("--out", build.out_path, "model output path")->required();

  PredictOptions predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "assign a cluster and print its curve");
  predict_cmd->add_option("--model", predict.model_path, "model file")->required();
  predict_cmd->add_option("--context", predict.context_pairs, "attribute=value[,attribute=value...]");
  predict_cmd->add_option("--total", predict.total, "planned total for absolute values");
  predict_cmd->add_option("--format", predict.format, "table | json | csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  predict_cmd->add_option("--db", predict.db_path, "verify the model fingerprint against this database");

  MonitorOptions monitor;
  CLI::App* monitor_cmd = app.add_subcommand("monitor", "replay actuals and flag deviations");
  monitor_cmd->add_option("--model", monitor.model_path, "model file")->required();
  monitor_cmd->add_option("--project", monitor.project_path, "in-flight project file (JSON)")->required();
  monitor_cmd->add_option("--tolerance", monitor.tolerance, "allowed deviation, percentage points")
      ->required();
  monitor_cmd->add_option("--strategy", monitor.strategy, "distance | context | hybrid")->required();
  monitor_cmd->add_option("--delta", monitor.delta, "hybrid distance slack");
  monitor_cmd->add_option("--db", monitor.db_path, "verify the model fingerprint against this database");

  EvaluateOptions evaluate;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "leave-one-out evaluation over a database");
  evaluate_cmd->add_option("--db", evaluate.db_path, "project database (JSON)")->required();
  evaluate_cmd->add_option("--strategy", evaluate.strategy, "distance | context | hybrid | all")
      ->required();
  evaluate_cmd->add_option("--delta", evaluate.delta, "hybrid distance slack");
  evaluate_cmd->add_option("--granularity", evaluate.granularity, "checkpoints per curve (default 10)");
  evaluate_cmd->add_option("--linkage", evaluate.linkage, "single | average | complete");
  evaluate_cmd->add_option("--cut", evaluate.cut_distance, "stop merging above this linkage distance");
  evaluate_cmd->add_option("--clusters", evaluate.cluster_count, "stop at this many clusters");
  evaluate_cmd->add_option("--threshold", evaluate.threshold, "context weight threshold (default 0)");
  evaluate_cmd->add_option("--report", evaluate.report_path, "write the JSON report here");
  evaluate_cmd->add_option("--format", evaluate.format, "table | json")
      ->check(CLI::IsMember({"table", "json"}));

  ImportOptions import;
  CLI::App* import_cmd = app.add_subcommand("import", "convert CSV measurements to a database");
  import_cmd->add_option("--points", import.points_path, "CSV with project_id,time,value")->required();
  import_cmd->add_option("--context", import.context_path, "CSV with project_id,attribute,value")
      ->required();
  import_cmd->add_option("--out", import.out_path, "database output path")->required();

  build_cmd->callback([&] { cmd_build(build, out, err); });
  predict_cmd->callback([&] { cmd_predict(predict, out, err); });
  monitor_cmd->callback([&] { cmd_monitor(monitor, out, err); });
  evaluate_cmd->callback([&] { cmd_evaluate(evaluate, out, err); });
  import_cmd->callback([&] { cmd_import(import, out, err); });

  std::vector<std::string> argv{"curvecast"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> argv_ptrs;
  argv_ptrs.reserve(argv.size());
  for (const std::string& a : argv) argv_ptrs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv_ptrs.size()), argv_ptrs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace curvecast::cli
