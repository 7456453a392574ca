#ifndef CURVECAST_PREDICTION_HPP
#define CURVECAST_PREDICTION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvecast/clustering.hpp"
#include "curvecast/context.hpp"
#include "curvecast/curve.hpp"

namespace curvecast {

enum class StrategyKind { Distance, Context, Hybrid };

const char* to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

/// Cluster-selection strategy. delta is the hybrid distance slack in
/// percentage points: clusters within delta of the best prefix distance
/// stay candidates and the fittest context wins among them.
struct Strategy {
  StrategyKind kind = StrategyKind::Distance;
  double delta = 0.0;

  void validate() const;
};

struct DeviationReport {
  int checkpoint;
  double predicted_value;  // percent
  double actual_value;     // percent
  double delta;            // actual - predicted
  bool flagged;            // |delta| strictly above tolerance
  double tolerance;
};

struct ReassignmentEvent {
  int checkpoint;
  int cluster_id;

  friend bool operator==(const ReassignmentEvent&, const ReassignmentEvent&) = default;
};

/// Tracks one in-flight project: the cluster it is assigned to, the
/// predicted curve, and the actual values observed so far (as percent of
/// the user-supplied baseline total).
class PredictionState {
public:
  PredictionState(std::string project_id, const ClusterModel& model, int cluster_id,
                  double baseline_total);

  const std::string& project_id() const { return project_id_; }
  int assigned_cluster() const { return assigned_cluster_; }
  const CharacteristicCurve& predicted() const { return predicted_; }
  double baseline_total() const { return baseline_total_; }
  const std::vector<double>& actual_prefix() const { return actual_prefix_; }
  int observed_checkpoints() const { return static_cast<int>(actual_prefix_.size()); }
  bool complete() const { return observed_checkpoints() == predicted_.granularity(); }
  const std::vector<ReassignmentEvent>& history() const { return history_; }

  /// Percent of the baseline total for an absolute in-flight value.
  double to_percent(double absolute_value) const { return absolute_value / baseline_total_ * 100.0; }

private:
  friend DeviationReport monitor(PredictionState& state, double new_actual, double tolerance);
  friend int reassign(PredictionState& state, const ClusterModel& model,
                      const ContextProfile& project_context, const Strategy& strategy);

  std::string project_id_;
  int assigned_cluster_;
  CharacteristicCurve predicted_;
  double baseline_total_;
  std::vector<double> actual_prefix_;
  std::vector<ReassignmentEvent> history_;
};

/// Cluster with the highest goodness of fitting; ties go to the lower
/// cluster id. The winner's curve is the prediction.
int assign_by_context(const ContextProfile& project_context, const ClusterModel& model);

struct PredictedCurve {
  CharacteristicCurve percent;
  std::optional<std::vector<double>> absolute;  // percent * baseline_total / 100
};

PredictedCurve predict_curve(const ClusterModel& model, int cluster_id,
                             std::optional<double> baseline_total = std::nullopt);

/// Appends the next observed cumulative percent value and reports the
/// deviation from the prediction at that checkpoint. Flagged only when
/// |delta| exceeds the tolerance strictly; boundary equality is quiet.
DeviationReport monitor(PredictionState& state, double new_actual, double tolerance);

/// Picks a cluster for an observed prefix and context under the given
/// strategy. Tie chains: distance prefers higher goodness of fitting then
/// lower id; context and hybrid prefer lower prefix distance then lower id.
int select_cluster(const ClusterModel& model, std::span<const double> actual_prefix,
                   const ContextProfile& project_context, const Strategy& strategy);

/// Re-selects the cluster for an in-flight project; on a switch the
/// prediction swaps to the new cluster's curve and the event is recorded.
int reassign(PredictionState& state, const ClusterModel& model,
             const ContextProfile& project_context, const Strategy& strategy);

}  // namespace curvecast

#endif
