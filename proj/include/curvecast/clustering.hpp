#ifndef CURVECAST_CLUSTERING_HPP
#define CURVECAST_CLUSTERING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvecast/context.hpp"
#include "curvecast/curve.hpp"

namespace curvecast {

enum class Linkage { Single, Average, Complete };

const char* to_string(Linkage linkage);
Linkage linkage_from_string(const std::string& name);

/// Agglomerative clustering configuration: merging stops either when the
/// minimal inter-cluster linkage distance exceeds cut_distance or when
/// target_count clusters remain. Exactly one of the two must be set.
struct ClusteringParams {
  Linkage linkage = Linkage::Average;
  std::optional<double> cut_distance;
  std::optional<int> target_count;

  void validate(int project_count) const;

  friend bool operator==(const ClusteringParams&, const ClusteringParams&) = default;
};

struct Cluster {
  int cluster_id;
  std::vector<std::string> member_ids;  // sorted
  CharacteristicCurve curve;            // mean of the member curves
  ContextSignature signature;           // filled after clustering
};

struct ClusterModel {
  Granularity granularity;
  std::vector<Cluster> clusters;  // ordered by cluster_id, ids dense from 0
  ClusteringParams params;
  double context_threshold = 0.0;
  std::string db_fingerprint;

  const Cluster& cluster_by_id(int cluster_id) const;
  int cluster_count() const { return static_cast<int>(clusters.size()); }
};

/// Linkage distance between two nonempty curve sets: minimal pairwise
/// distance (single), maximal (complete), or the mean over all pairs
/// (average).
double linkage_distance(const std::vector<CharacteristicCurve>& a,
                        const std::vector<CharacteristicCurve>& b, Linkage linkage);

/// Bottom-up agglomerative clustering over characteristic curves.
/// Deterministic: equal merge distances are broken by the pair whose
/// (smaller member id, larger member id) is lexicographically least, and
/// cluster ids follow the order of each cluster's smallest member id.
std::vector<Cluster> build_clusters(const std::map<std::string, CharacteristicCurve>& curves,
                                    const ClusteringParams& params);

struct ClusteringTrace {
  std::vector<Cluster> clusters;
  std::vector<double> merge_distances;  // in merge order
};

/// build_clusters plus the sequence of merge distances, for diagnostics.
ClusteringTrace build_clusters_traced(const std::map<std::string, CharacteristicCurve>& curves,
                                      const ClusteringParams& params);

}  // namespace curvecast

#endif
