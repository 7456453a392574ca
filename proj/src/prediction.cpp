#include "curvecast/prediction.hpp"

#include <cmath>
#include <limits>

namespace curvecast {

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Distance: return "distance";
    case StrategyKind::Context: return "context";
    case StrategyKind::Hybrid: return "hybrid";
  }
  return "?";
}

StrategyKind strategy_from_string(const std::string& name) {
  if (name == "distance") return StrategyKind::Distance;
  if (name == "context") return StrategyKind::Context;
  if (name == "hybrid") return StrategyKind::Hybrid;
  throw Error(ErrorCode::BadParams,
              "unknown strategy '" + name + "' (expected distance, context, or hybrid)");
}

void Strategy::validate() const {
  if (!(delta >= 0.0)) {
    throw Error(ErrorCode::BadParams, "hybrid delta must be nonnegative");
  }
}

PredictionState::PredictionState(std::string project_id, const ClusterModel& model, int cluster_id,
                                 double baseline_total)
    : project_id_(std::move(project_id)),
      assigned_cluster_(cluster_id),
      predicted_(model.cluster_by_id(cluster_id).curve),
      baseline_total_(baseline_total) {
  if (!(baseline_total > 0.0)) {
    throw Error(ErrorCode::BadTotal, "baseline total must be positive");
  }
}

int assign_by_context(const ContextProfile& project_context, const ClusterModel& model) {
  if (model.clusters.empty()) throw Error(ErrorCode::EmptyModel, "model has no clusters");
  int best_id = model.clusters.front().cluster_id;
  double best_gof = -std::numeric_limits<double>::infinity();
  for (const Cluster& cluster : model.clusters) {
    const double gof = goodness_of_fit(project_context, cluster.signature);
    if (gof > best_gof || (gof == best_gof && cluster.cluster_id < best_id)) {
      best_gof = gof;
      best_id = cluster.cluster_id;
    }
  }
  return best_id;
}

PredictedCurve predict_curve(const ClusterModel& model, int cluster_id,
                             std::optional<double> baseline_total) {
  const Cluster& cluster = model.cluster_by_id(cluster_id);
  PredictedCurve result{cluster.curve, std::nullopt};
  if (baseline_total) {
    if (!(*baseline_total > 0.0)) {
      throw Error(ErrorCode::BadTotal, "baseline total must be positive");
    }
    std::vector<double> absolute;
    absolute.reserve(cluster.curve.values().size());
    for (double v : cluster.curve.values()) absolute.push_back(v * *baseline_total / 100.0);
    result.absolute = std::move(absolute);
  }
  return result;
}

DeviationReport monitor(PredictionState& state, double new_actual, double tolerance) {
  if (!(tolerance > 0.0)) {
    throw Error(ErrorCode::BadTolerance, "tolerance must be positive");
  }
  if (state.complete()) {
    throw Error(ErrorCode::Complete,
                "project '" + state.project_id() + "' has reached the last checkpoint");
  }
  if (!(new_actual >= 0.0)) {
    throw Error(ErrorCode::MalformedActual, "actual value must be nonnegative");
  }
  if (!state.actual_prefix_.empty() && new_actual < state.actual_prefix_.back()) {
    throw Error(ErrorCode::MalformedActual,
                "cumulative actual decreased from " + std::to_string(state.actual_prefix_.back()) +
                    " to " + std::to_string(new_actual));
  }
  state.actual_prefix_.push_back(new_actual);
  const int checkpoint = state.observed_checkpoints();
  const double predicted = state.predicted_.at_checkpoint(checkpoint);
  const double delta = new_actual - predicted;
  return DeviationReport{checkpoint, predicted,  new_actual,
                         delta,      std::abs(delta) > tolerance, tolerance};
}

int select_cluster(const ClusterModel& model, std::span<const double> actual_prefix,
                   const ContextProfile& project_context, const Strategy& strategy) {
  if (model.clusters.empty()) throw Error(ErrorCode::EmptyModel, "model has no clusters");
  if (actual_prefix.empty()) throw Error(ErrorCode::NoActuals, "no observed checkpoints yet");
  strategy.validate();

  struct Scored {
    int id;
    double prefix_dist;
    double gof;
  };
  std::vector<Scored> scored;
  scored.reserve(model.clusters.size());
  double min_dist = std::numeric_limits<double>::infinity();
  for (const Cluster& cluster : model.clusters) {
    const double pd = prefix_distance(actual_prefix, cluster.curve);
    const double gof = goodness_of_fit(project_context, cluster.signature);
    scored.push_back({cluster.cluster_id, pd, gof});
    min_dist = std::min(min_dist, pd);
  }

  // distance: (prefix_dist asc, gof desc, id asc)
  // context / hybrid: (gof desc, prefix_dist asc, id asc)
  const auto distance_wins = [](const Scored& a, const Scored& b) {
    if (a.prefix_dist != b.prefix_dist) return a.prefix_dist < b.prefix_dist;
    if (a.gof != b.gof) return a.gof > b.gof;
    return a.id < b.id;
  };
  const auto context_wins = [](const Scored& a, const Scored& b) {
    if (a.gof != b.gof) return a.gof > b.gof;
    if (a.prefix_dist != b.prefix_dist) return a.prefix_dist < b.prefix_dist;
    return a.id < b.id;
  };

  const Scored* best = nullptr;
  for (const Scored& candidate : scored) {
    if (strategy.kind == StrategyKind::Hybrid && candidate.prefix_dist > min_dist + strategy.delta) {
      continue;
    }
    if (best == nullptr) {
      best = &candidate;
      continue;
    }
    const bool wins = strategy.kind == StrategyKind::Distance ? distance_wins(candidate, *best)
                                                              : context_wins(candidate, *best);
    if (wins) best = &candidate;
  }
  return best->id;
}

int reassign(PredictionState& state, const ClusterModel& model,
             const ContextProfile& project_context, const Strategy& strategy) {
  if (state.actual_prefix_.empty()) {
    throw Error(ErrorCode::NoActuals,
                "project '" + state.project_id() + "' has no observed checkpoints");
  }
  const int winner = select_cluster(model, state.actual_prefix_, project_context, strategy);
  if (winner != state.assigned_cluster_) {
    state.assigned_cluster_ = winner;
    state.predicted_ = model.cluster_by_id(winner).curve;
    const int checkpoint = state.observed_checkpoints();
    // Keep history checkpoints strictly increasing: a second switch at the
    // same checkpoint overwrites the earlier decision.
    if (!state.history_.empty() && state.history_.back().checkpoint == checkpoint) {
      state.history_.back().cluster_id = winner;
    } else {
      state.history_.push_back({checkpoint, winner});
    }
  }
  return winner;
}

}  // namespace curvecast
