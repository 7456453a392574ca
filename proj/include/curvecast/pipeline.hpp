#ifndef CURVECAST_PIPELINE_HPP
#define CURVECAST_PIPELINE_HPP

#include <string>
#include <vector>

#include "curvecast/prediction.hpp"
#include "curvecast/store.hpp"

namespace curvecast {

/// Full model build: normalize every series, cluster the curves, attach a
/// context signature to each cluster, and stamp the database fingerprint.
ClusterModel build_model(const ProjectDatabase& db, const Granularity& granularity,
                         const ClusteringParams& params, double context_threshold);

struct EvaluationRow {
  std::string project_id;
  int assigned_cluster;
  double goodness_of_fit;
  double mae;           // mean absolute error, percentage points
  double rmse;
  double baseline_mae;  // error of the fold's global mean curve
  std::vector<double> predicted;
  std::string fold_fingerprint;
};

struct EvaluationReport {
  std::string strategy;
  int granularity;
  std::vector<EvaluationRow> rows;  // one per project, ordered by id
  double mean_mae = 0.0;
  double median_mae = 0.0;
  double mean_rmse = 0.0;
  double baseline_mean_mae = 0.0;
  double baseline_median_mae = 0.0;
};

/// Leave-one-out evaluation: each project is held out, the model is
/// rebuilt on the remainder, the held-out project is assigned per the
/// strategy (context uses its profile only; distance and hybrid compare
/// its actual curve to the cluster curves), and the predicted cluster
/// curve is scored against the project's true characteristic curve.
EvaluationReport run_leave_one_out(const ProjectDatabase& db, const Granularity& granularity,
                                   const ClusteringParams& params, double context_threshold,
                                   const Strategy& strategy);

}  // namespace curvecast

#endif
