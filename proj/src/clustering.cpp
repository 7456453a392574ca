#include "curvecast/clustering.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace curvecast {

const char* to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
  }
  return "?";
}

Linkage linkage_from_string(const std::string& name) {
  if (name == "single") return Linkage::Single;
  if (name == "average") return Linkage::Average;
  if (name == "complete") return Linkage::Complete;
  throw Error(ErrorCode::BadParams,
              "unknown linkage '" + name + "' (expected single, average, or complete)");
}

void ClusteringParams::validate(int project_count) const {
  if (cut_distance.has_value() == target_count.has_value()) {
    throw Error(ErrorCode::BadParams, "exactly one of cut_distance / target_count must be set");
  }
  if (cut_distance && !(*cut_distance > 0.0)) {
    throw Error(ErrorCode::BadParams, "cut_distance must be positive");
  }
  if (target_count) {
    if (*target_count < 1) throw Error(ErrorCode::BadParams, "target_count must be positive");
    if (*target_count > project_count) {
      throw Error(ErrorCode::BadParams,
                  "target_count " + std::to_string(*target_count) + " exceeds project count " +
                      std::to_string(project_count));
    }
  }
}

const Cluster& ClusterModel::cluster_by_id(int cluster_id) const {
  for (const Cluster& c : clusters) {
    if (c.cluster_id == cluster_id) return c;
  }
  throw Error(ErrorCode::UnknownCluster, "no cluster with id " + std::to_string(cluster_id));
}

double linkage_distance(const std::vector<CharacteristicCurve>& a,
                        const std::vector<CharacteristicCurve>& b, Linkage linkage) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptyInput, "linkage distance over an empty curve set");
  }
  double best = linkage == Linkage::Complete ? 0.0 : std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const CharacteristicCurve& ca : a) {
    for (const CharacteristicCurve& cb : b) {
      const double d = curve_distance(ca, cb);
      best = linkage == Linkage::Complete ? std::max(best, d) : std::min(best, d);
      sum += d;
    }
  }
  if (linkage == Linkage::Average) {
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  }
  return best;
}

namespace {

struct Agglomerate {
  std::vector<std::string> member_ids;  // sorted; front() is the smallest
  int size = 0;
  bool active = true;
};

// Lance-Williams update of the active pair distances after merging a and b.
double merged_distance(Linkage linkage, double d_ao, double d_bo, int size_a, int size_b) {
  switch (linkage) {
    case Linkage::Single: return std::min(d_ao, d_bo);
    case Linkage::Complete: return std::max(d_ao, d_bo);
    case Linkage::Average:
      return (size_a * d_ao + size_b * d_bo) / static_cast<double>(size_a + size_b);
  }
  return 0.0;
}

}  // namespace

ClusteringTrace build_clusters_traced(const std::map<std::string, CharacteristicCurve>& curves,
                                      const ClusteringParams& params) {
  if (curves.empty()) throw Error(ErrorCode::EmptyInput, "no curves to cluster");
  params.validate(static_cast<int>(curves.size()));

  const std::size_t n = curves.size();
  std::vector<Agglomerate> nodes(n);
  std::vector<const CharacteristicCurve*> node_curves(n);
  {
    std::size_t i = 0;
    for (const auto& [id, curve] : curves) {
      nodes[i].member_ids = {id};
      nodes[i].size = 1;
      node_curves[i] = &curve;
      ++i;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (node_curves[i]->granularity() != node_curves[0]->granularity()) {
      throw Error(ErrorCode::GranularityMismatch,
                  "curve '" + nodes[i].member_ids.front() + "' has granularity " +
                      std::to_string(node_curves[i]->granularity()) + ", expected " +
                      std::to_string(node_curves[0]->granularity()));
    }
  }

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = curve_distance(*node_curves[i], *node_curves[j]);
    }
  }

  std::vector<double> merge_distances;
  std::size_t active_count = n;
  const std::size_t stop_count = params.target_count ? static_cast<std::size_t>(*params.target_count) : 1;

  while (active_count > stop_count) {
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best_i = n, best_j = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!nodes[i].active) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!nodes[j].active) continue;
        const double d = dist[i][j];
        bool better = d < best_dist;
        if (d == best_dist && best_i < n) {
          // Tie: prefer the pair whose (smaller, larger) smallest member
          // ids compare lexicographically least.
          const auto key = [&](std::size_t a, std::size_t b) {
            const std::string& ra = nodes[a].member_ids.front();
            const std::string& rb = nodes[b].member_ids.front();
            return ra < rb ? std::pair(ra, rb) : std::pair(rb, ra);
          };
          better = key(i, j) < key(best_i, best_j);
        }
        if (better) {
          best_dist = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (params.cut_distance && best_dist > *params.cut_distance) break;

    Agglomerate& a = nodes[best_i];
    Agglomerate& b = nodes[best_j];
    for (std::size_t o = 0; o < n; ++o) {
      if (!nodes[o].active || o == best_i || o == best_j) continue;
      dist[best_i][o] = dist[o][best_i] =
          merged_distance(params.linkage, dist[best_i][o], dist[best_j][o], a.size, b.size);
    }
    std::vector<std::string> merged;
    merged.reserve(a.member_ids.size() + b.member_ids.size());
    std::merge(a.member_ids.begin(), a.member_ids.end(), b.member_ids.begin(), b.member_ids.end(),
               std::back_inserter(merged));
    a.member_ids = std::move(merged);
    a.size += b.size;
    b.active = false;
    --active_count;
    merge_distances.push_back(best_dist);
  }

  std::vector<const Agglomerate*> finals;
  for (const Agglomerate& node : nodes) {
    if (node.active) finals.push_back(&node);
  }
  std::sort(finals.begin(), finals.end(), [](const Agglomerate* a, const Agglomerate* b) {
    return a->member_ids.front() < b->member_ids.front();
  });

  ClusteringTrace trace;
  trace.merge_distances = std::move(merge_distances);
  trace.clusters.reserve(finals.size());
  std::size_t assigned_total = 0;
  for (std::size_t id = 0; id < finals.size(); ++id) {
    std::vector<CharacteristicCurve> member_curves;
    member_curves.reserve(finals[id]->member_ids.size());
    for (const std::string& member : finals[id]->member_ids) {
      member_curves.push_back(curves.at(member));
    }
    assigned_total += finals[id]->member_ids.size();
    trace.clusters.push_back(Cluster{static_cast<int>(id), finals[id]->member_ids,
                                     mean_curve(member_curves), ContextSignature{}});
  }
  if (assigned_total != n) {
    throw InternalError("clustering lost projects: assigned " + std::to_string(assigned_total) +
                        " of " + std::to_string(n));
  }
  return trace;
}

std::vector<Cluster> build_clusters(const std::map<std::string, CharacteristicCurve>& curves,
                                    const ClusteringParams& params) {
  return build_clusters_traced(curves, params).clusters;
}

}  // namespace curvecast
