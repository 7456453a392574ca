#ifndef CURVECAST_STORE_HPP
#define CURVECAST_STORE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "curvecast/clustering.hpp"
#include "curvecast/context.hpp"
#include "curvecast/curve.hpp"

namespace curvecast {

/// One historical project: context, its measurement series (times already
/// normalized to the planned duration), and optionally the planned total.
struct ProjectRecord {
  std::string project_id;
  ContextProfile context;
  MeasurementSeries series;
  double planned_duration;
  std::optional<double> baseline_total;
};

struct ProjectDatabase {
  std::vector<ProjectRecord> records;
  std::set<std::string> attribute_catalog;

  const ProjectRecord& record(const std::string& project_id) const;

  /// Characteristic curves for every record at the given granularity.
  std::map<std::string, CharacteristicCurve> characteristic_curves(const Granularity& g) const;

  /// Context profiles keyed by project id.
  std::map<std::string, ContextProfile> profiles() const;
};

/// Parses and validates a database document. Raw timestamps are divided
/// by each project's planned_duration; attributes absent from a record
/// but present elsewhere are filled with the missing marker.
ProjectDatabase parse_database(const std::string& text, const std::string& source_name);
ProjectDatabase load_database(const std::filesystem::path& path);

/// Flat CSV import: measurement points (project_id,time,value; cumulative
/// values, raw times) plus a context sidecar (project_id,attribute,value).
/// Each project's largest timestamp is taken as its planned duration.
ProjectDatabase import_csv(const std::filesystem::path& points_csv,
                           const std::filesystem::path& context_csv);

std::string canonical_database_text(const ProjectDatabase& db);
void save_database(const ProjectDatabase& db, const std::filesystem::path& path);

/// Content hash of the canonical form; invariant under record order and
/// raw time scale.
std::string database_fingerprint(const ProjectDatabase& db);

/// Model persistence. Output is canonical: identical models produce
/// byte-identical files regardless of in-memory ordering.
std::string canonical_model_text(const ClusterModel& model);
void save_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel parse_model(const std::string& text, const std::string& source_name);
ClusterModel load_model(const std::filesystem::path& path);

/// Equality at serialization precision: canonical texts compare equal.
bool models_equal(const ClusterModel& a, const ClusterModel& b);

/// An in-flight project for monitoring: context, the planned total, and
/// the cumulative absolute actuals observed at checkpoints 1..k.
struct InFlightProject {
  std::string project_id;
  ContextProfile context;
  std::optional<double> baseline_total;
  std::vector<double> actuals;
};

InFlightProject parse_inflight(const std::string& text, const std::string& source_name);
InFlightProject load_inflight(const std::filesystem::path& path);

}  // namespace curvecast

#endif
