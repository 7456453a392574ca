#include "curvecast/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace curvecast {

namespace {

std::vector<ContextProfile> profiles_of(const ProjectDatabase& db) {
  std::vector<ContextProfile> out;
  out.reserve(db.records.size());
  for (const ProjectRecord& r : db.records) out.push_back(r.context);
  return out;
}

void attach_signatures(std::vector<Cluster>& clusters,
                       const std::map<std::string, ContextProfile>& profiles,
                       const std::vector<ContextProfile>& database, double threshold) {
  for (Cluster& cluster : clusters) {
    std::vector<ContextProfile> members;
    members.reserve(cluster.member_ids.size());
    for (const std::string& id : cluster.member_ids) members.push_back(profiles.at(id));
    cluster.signature = build_signature(members, database, threshold);
  }
}

}  // namespace

ClusterModel build_model(const ProjectDatabase& db, const Granularity& granularity,
                         const ClusteringParams& params, double context_threshold) {
  if (db.records.empty()) throw Error(ErrorCode::EmptyInput, "database has no projects");
  std::vector<Cluster> clusters = build_clusters(db.characteristic_curves(granularity), params);
  attach_signatures(clusters, db.profiles(), profiles_of(db), context_threshold);
  return ClusterModel{granularity, std::move(clusters), params, context_threshold,
                      database_fingerprint(db)};
}

namespace {

double mean_absolute_error(const std::vector<double>& predicted,
                           const CharacteristicCurve& actual) {
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    sum += std::abs(predicted[i] - actual.values()[i]);
  }
  return sum / static_cast<double>(predicted.size());
}

double root_mean_square_error(const std::vector<double>& predicted,
                              const CharacteristicCurve& actual) {
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual.values()[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

EvaluationReport run_leave_one_out(const ProjectDatabase& db, const Granularity& granularity,
                                   const ClusteringParams& params, double context_threshold,
                                   const Strategy& strategy) {
  if (db.records.size() < 3) {
    throw Error(ErrorCode::BadParams, "leave-one-out evaluation needs at least 3 projects, got " +
                                          std::to_string(db.records.size()));
  }
  strategy.validate();

  const std::map<std::string, CharacteristicCurve> all_curves =
      db.characteristic_curves(granularity);
  const std::string full_fingerprint = database_fingerprint(db);

  std::vector<const ProjectRecord*> ordered;
  ordered.reserve(db.records.size());
  for (const ProjectRecord& r : db.records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](const ProjectRecord* a, const ProjectRecord* b) {
    return a->project_id < b->project_id;
  });

  EvaluationReport report;
  report.strategy = to_string(strategy.kind);
  report.granularity = granularity.checkpoints();

  std::vector<double> maes, baseline_maes, rmses;
  for (const ProjectRecord* held_out : ordered) {
    ProjectDatabase fold;
    for (const ProjectRecord& r : db.records) {
      if (r.project_id != held_out->project_id) fold.records.push_back(r);
    }
    for (const ProjectRecord& r : fold.records) {
      for (const auto& [attribute, value] : r.context.entries()) {
        (void)value;
        fold.attribute_catalog.insert(attribute);
      }
    }

    ClusteringParams fold_params = params;
    if (fold_params.target_count &&
        *fold_params.target_count > static_cast<int>(fold.records.size())) {
      throw Error(ErrorCode::BadParams, "target_count exceeds the per-fold project count");
    }
    std::vector<CharacteristicCurve> fold_curve_list;
    for (const ProjectRecord& r : fold.records) {
      fold_curve_list.push_back(all_curves.at(r.project_id));
    }

    ClusterModel model = build_model(fold, granularity, fold_params, context_threshold);
    if (model.db_fingerprint == full_fingerprint) {
      throw InternalError("fold database fingerprint matches the full database; the held-out "
                          "project leaked into training");
    }

    const CharacteristicCurve& actual = all_curves.at(held_out->project_id);
    int winner;
    if (strategy.kind == StrategyKind::Context) {
      winner = assign_by_context(held_out->context, model);
    } else {
      winner = select_cluster(model, actual.values(), held_out->context, strategy);
    }
    const Cluster& cluster = model.cluster_by_id(winner);
    const CharacteristicCurve baseline = mean_curve(fold_curve_list);

    EvaluationRow row;
    row.project_id = held_out->project_id;
    row.assigned_cluster = winner;
    row.goodness_of_fit = goodness_of_fit(held_out->context, cluster.signature);
    row.predicted = cluster.curve.values();
    row.mae = mean_absolute_error(row.predicted, actual);
    row.rmse = root_mean_square_error(row.predicted, actual);
    row.baseline_mae = mean_absolute_error(baseline.values(), actual);
    row.fold_fingerprint = model.db_fingerprint;
    maes.push_back(row.mae);
    rmses.push_back(row.rmse);
    baseline_maes.push_back(row.baseline_mae);
    report.rows.push_back(std::move(row));
  }

  const double n = static_cast<double>(report.rows.size());
  for (double v : maes) report.mean_mae += v;
  for (double v : rmses) report.mean_rmse += v;
  for (double v : baseline_maes) report.baseline_mean_mae += v;
  report.mean_mae /= n;
  report.mean_rmse /= n;
  report.baseline_mean_mae /= n;
  report.median_mae = median(maes);
  report.baseline_median_mae = median(baseline_maes);
  return report;
}

}  // namespace curvecast
