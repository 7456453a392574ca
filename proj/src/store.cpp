#include "curvecast/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "curvecast/canonical.hpp"

namespace curvecast {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::ParseError, "cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::ParseError, "short write to '" + path.string() + "'");
  }
}

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json parse_json(const std::string& text, const std::string& source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                source_name + " (" + position_of(text, e.byte) + "): " + e.what());
  }
}

void require_known_keys(const json& object, std::initializer_list<const char*> known,
                        const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end()) {
      throw Error(ErrorCode::ParseError, where + ": unknown key '" + key + "'");
    }
  }
}

const json& require_field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::ParseError, where + ": missing '" + std::string(key) + "'");
  }
  return *it;
}

double require_number(const json& value, const std::string& where) {
  if (!value.is_number()) {
    throw Error(ErrorCode::ParseError, where + ": expected a number");
  }
  return value.get<double>();
}

std::string require_string(const json& value, const std::string& where) {
  if (!value.is_string()) {
    throw Error(ErrorCode::ParseError, where + ": expected a string");
  }
  return value.get<std::string>();
}

ContextProfile parse_context_object(const json& object, const std::string& where) {
  if (!object.is_object()) {
    throw Error(ErrorCode::ParseError, where + ": expected an object");
  }
  ContextProfile profile;
  for (const auto& [attribute, value] : object.items()) {
    if (attribute.empty()) {
      throw Error(ErrorCode::ParseError, where + ": empty attribute name");
    }
    const std::string v = require_string(value, where + "." + attribute);
    if (v == kMissingValue) {
      throw Error(ErrorCode::ParseError,
                  where + "." + attribute + ": the missing-value marker is reserved");
    }
    profile.set(attribute, v);
  }
  return profile;
}

MeasurementSeries parse_series(const json& object, const std::string& project_id,
                               double planned_duration, const std::string& where) {
  if (!object.is_object()) {
    throw Error(ErrorCode::ParseError, where + ": expected an object");
  }
  require_known_keys(object, {"mode", "points"}, where);
  const std::string mode_name = require_string(require_field(object, "mode", where), where + ".mode");
  SeriesMode mode;
  if (mode_name == "incremental") {
    mode = SeriesMode::Incremental;
  } else if (mode_name == "cumulative") {
    mode = SeriesMode::Cumulative;
  } else {
    throw Error(ErrorCode::ParseError,
                where + ".mode: expected 'incremental' or 'cumulative', got '" + mode_name + "'");
  }
  const json& points_json = require_field(object, "points", where);
  if (!points_json.is_array()) {
    throw Error(ErrorCode::ParseError, where + ".points: expected an array");
  }
  std::vector<MeasurementPoint> points;
  points.reserve(points_json.size());
  for (std::size_t i = 0; i < points_json.size(); ++i) {
    const json& p = points_json[i];
    const std::string point_where = where + ".points[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) {
      throw Error(ErrorCode::ParseError, point_where + ": expected [time, value]");
    }
    const double raw_time = require_number(p[0], point_where);
    const double value = require_number(p[1], point_where);
    points.push_back({raw_time / planned_duration, value});
  }
  try {
    return MeasurementSeries(project_id, std::move(points), mode);
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.detail());
  }
}

void fill_missing_attributes(ProjectDatabase& db) {
  for (const ProjectRecord& record : db.records) {
    for (const auto& [attribute, value] : record.context.entries()) {
      (void)value;
      db.attribute_catalog.insert(attribute);
    }
  }
  for (ProjectRecord& record : db.records) {
    for (const std::string& attribute : db.attribute_catalog) {
      if (!record.context.has(attribute)) record.context.set(attribute, kMissingValue);
    }
  }
}

}  // namespace

const ProjectRecord& ProjectDatabase::record(const std::string& project_id) const {
  for (const ProjectRecord& r : records) {
    if (r.project_id == project_id) return r;
  }
  throw Error(ErrorCode::ParseError, "no project '" + project_id + "' in the database");
}

std::map<std::string, CharacteristicCurve> ProjectDatabase::characteristic_curves(
    const Granularity& g) const {
  std::map<std::string, CharacteristicCurve> curves;
  for (const ProjectRecord& r : records) {
    curves.emplace(r.project_id, normalize_series(r.series, g));
  }
  return curves;
}

std::map<std::string, ContextProfile> ProjectDatabase::profiles() const {
  std::map<std::string, ContextProfile> out;
  for (const ProjectRecord& r : records) out.emplace(r.project_id, r.context);
  return out;
}

ProjectDatabase parse_database(const std::string& text, const std::string& source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_object()) {
    throw Error(ErrorCode::ParseError, source_name + ": expected a top-level object");
  }
  require_known_keys(root, {"projects"}, source_name);
  const json& projects = require_field(root, "projects", source_name);
  if (!projects.is_array()) {
    throw Error(ErrorCode::ParseError, source_name + ": 'projects' must be an array");
  }

  ProjectDatabase db;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < projects.size(); ++i) {
    const json& project = projects[i];
    const std::string where = source_name + ": projects[" + std::to_string(i) + "]";
    if (!project.is_object()) {
      throw Error(ErrorCode::ParseError, where + ": expected an object");
    }
    require_known_keys(project, {"id", "planned_duration", "baseline_total", "context", "series"},
                       where);
    const std::string id = require_string(require_field(project, "id", where), where + ".id");
    if (id.empty()) {
      throw Error(ErrorCode::ParseError, where + ".id: must be nonempty");
    }
    if (!seen_ids.insert(id).second) {
      throw Error(ErrorCode::DuplicateProject, "duplicate project id '" + id + "'");
    }
    const double planned_duration =
        require_number(require_field(project, "planned_duration", where), where + ".planned_duration");
    if (!(planned_duration > 0.0)) {
      throw Error(ErrorCode::BadDuration,
                  where + ": planned_duration must be positive, got " +
                      std::to_string(planned_duration));
    }
    std::optional<double> baseline_total;
    if (project.contains("baseline_total")) {
      baseline_total = require_number(project["baseline_total"], where + ".baseline_total");
      if (!(*baseline_total > 0.0)) {
        throw Error(ErrorCode::BadTotal, where + ": baseline_total must be positive");
      }
    }
    ContextProfile context;
    if (project.contains("context")) {
      context = parse_context_object(project["context"], where + ".context");
    }
    MeasurementSeries series = parse_series(require_field(project, "series", where), id,
                                            planned_duration, where + ".series");
    db.records.push_back(
        {id, std::move(context), std::move(series), planned_duration, baseline_total});
  }
  fill_missing_attributes(db);
  return db;
}

ProjectDatabase load_database(const std::filesystem::path& path) {
  return parse_database(read_file(path), path.string());
}

namespace {

// Minimal CSV reader: comma-separated, double quotes may wrap a field and
// are doubled to escape themselves.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no,
                                        const std::string& source_name) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::ParseError,
                source_name + " line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

struct CsvTable {
  std::vector<std::vector<std::string>> rows;  // header excluded
};

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& header) {
  const std::string text = read_file(path);
  const std::string source_name = path.string();
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line, line_no, source_name);
    if (line_no == 1) {
      if (fields != header) {
        std::string expected;
        for (const std::string& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw Error(ErrorCode::ParseError,
                    source_name + ": expected header '" + expected + "'");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError, source_name + " line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (line_no == 0) {
    throw Error(ErrorCode::ParseError, source_name + ": empty file");
  }
  return table;
}

double parse_csv_number(const std::string& field, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(field, &consumed);
    if (consumed != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, what + ": not a number: '" + field + "'");
  }
}

}  // namespace

ProjectDatabase import_csv(const std::filesystem::path& points_csv,
                           const std::filesystem::path& context_csv) {
  const CsvTable points = read_csv(points_csv, {"project_id", "time", "value"});
  const CsvTable contexts = read_csv(context_csv, {"project_id", "attribute", "value"});

  std::map<std::string, std::vector<MeasurementPoint>> raw_points;
  for (const std::vector<std::string>& row : points.rows) {
    if (row[0].empty()) {
      throw Error(ErrorCode::ParseError, points_csv.string() + ": empty project_id");
    }
    raw_points[row[0]].push_back({parse_csv_number(row[1], points_csv.string() + " time"),
                                  parse_csv_number(row[2], points_csv.string() + " value")});
  }

  std::map<std::string, ContextProfile> raw_contexts;
  for (const std::vector<std::string>& row : contexts.rows) {
    const std::string& id = row[0];
    if (raw_points.find(id) == raw_points.end()) {
      throw Error(ErrorCode::ParseError,
                  context_csv.string() + ": context for unknown project '" + id + "'");
    }
    if (row[1].empty()) {
      throw Error(ErrorCode::ParseError, context_csv.string() + ": empty attribute name");
    }
    if (row[2] == kMissingValue) {
      throw Error(ErrorCode::ParseError,
                  context_csv.string() + ": the missing-value marker is reserved");
    }
    if (raw_contexts[id].has(row[1])) {
      throw Error(ErrorCode::ParseError, context_csv.string() + ": duplicate context row for '" +
                                             id + "." + row[1] + "'");
    }
    raw_contexts[id].set(row[1], row[2]);
  }

  ProjectDatabase db;
  for (auto& [id, pts] : raw_points) {
    std::sort(pts.begin(), pts.end(),
              [](const MeasurementPoint& a, const MeasurementPoint& b) { return a.time < b.time; });
    const double planned_duration = pts.back().time;
    if (!(planned_duration > 0.0)) {
      throw Error(ErrorCode::BadDuration,
                  "project '" + id + "' has no positive timestamp to infer a duration from");
    }
    for (MeasurementPoint& p : pts) p.time /= planned_duration;
    try {
      db.records.push_back({id, raw_contexts.count(id) ? raw_contexts[id] : ContextProfile{},
                            MeasurementSeries(id, pts, SeriesMode::Cumulative), planned_duration,
                            std::nullopt});
    } catch (const Error& e) {
      throw Error(e.code(), points_csv.string() + ": project '" + id + "': " + e.detail());
    }
  }
  fill_missing_attributes(db);
  return db;
}

namespace {

json database_to_json(const ProjectDatabase& db) {
  std::vector<const ProjectRecord*> ordered;
  ordered.reserve(db.records.size());
  for (const ProjectRecord& r : db.records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](const ProjectRecord* a, const ProjectRecord* b) {
    return a->project_id < b->project_id;
  });

  json projects = json::array();
  for (const ProjectRecord* r : ordered) {
    json context = json::object();
    for (const auto& [attribute, value] : r->context.entries()) {
      if (value != kMissingValue) context[attribute] = value;
    }
    json points = json::array();
    for (const MeasurementPoint& p : r->series.points()) {
      points.push_back(json::array({p.time, p.value}));
    }
    json project{{"id", r->project_id},
                 {"planned_duration", 1.0},  // times are stored normalized
                 {"context", std::move(context)},
                 {"series", json{{"mode", r->series.mode() == SeriesMode::Incremental
                                              ? "incremental"
                                              : "cumulative"},
                                 {"points", std::move(points)}}}};
    if (r->baseline_total) project["baseline_total"] = *r->baseline_total;
    projects.push_back(std::move(project));
  }
  return json{{"projects", std::move(projects)}};
}

}  // namespace

std::string canonical_database_text(const ProjectDatabase& db) {
  return canonical_dump(database_to_json(db));
}

void save_database(const ProjectDatabase& db, const std::filesystem::path& path) {
  write_file(path, canonical_database_text(db));
}

std::string database_fingerprint(const ProjectDatabase& db) {
  return fnv1a64_hex(canonical_database_text(db));
}

namespace {

constexpr int kModelFormatVersion = 1;

json model_to_json(const ClusterModel& model) {
  std::vector<const Cluster*> ordered;
  ordered.reserve(model.clusters.size());
  for (const Cluster& c : model.clusters) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(),
            [](const Cluster* a, const Cluster* b) { return a->cluster_id < b->cluster_id; });

  json clusters = json::array();
  for (const Cluster* cluster : ordered) {
    std::vector<std::string> members = cluster->member_ids;
    std::sort(members.begin(), members.end());
    json signature = json::array();
    for (const auto& [attribute, entries] : cluster->signature.entries()) {
      for (const SignatureEntry& entry : entries) {
        signature.push_back(
            json{{"attribute", attribute}, {"value", entry.value}, {"weight", entry.weight}});
      }
    }
    clusters.push_back(json{{"id", cluster->cluster_id},
                            {"members", members},
                            {"curve", cluster->curve.values()},
                            {"signature", std::move(signature)}});
  }

  json params{{"linkage", to_string(model.params.linkage)}};
  if (model.params.cut_distance) params["cut_distance"] = *model.params.cut_distance;
  if (model.params.target_count) params["target_count"] = *model.params.target_count;

  return json{{"format_version", kModelFormatVersion},
              {"granularity", model.granularity.checkpoints()},
              {"params", std::move(params)},
              {"context_threshold", model.context_threshold},
              {"db_fingerprint", model.db_fingerprint},
              {"clusters", std::move(clusters)}};
}

}  // namespace

std::string canonical_model_text(const ClusterModel& model) {
  return canonical_dump(model_to_json(model));
}

void save_model(const ClusterModel& model, const std::filesystem::path& path) {
  write_file(path, canonical_model_text(model));
}

ClusterModel parse_model(const std::string& text, const std::string& source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_object()) {
    throw Error(ErrorCode::ParseError, source_name + ": expected a top-level object");
  }
  const json& version = require_field(root, "format_version", source_name);
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion,
                source_name + ": format_version " + version.dump() + " (this build reads " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  require_known_keys(root,
                     {"format_version", "granularity", "params", "context_threshold",
                      "db_fingerprint", "clusters"},
                     source_name);
  const std::string fingerprint =
      require_string(require_field(root, "db_fingerprint", source_name), "db_fingerprint");

  try {
    const json& granularity_json = require_field(root, "granularity", source_name);
    if (!granularity_json.is_number_integer()) {
      throw Error(ErrorCode::ParseError, source_name + ": granularity must be an integer");
    }
    Granularity granularity(granularity_json.get<int>());

    const json& params_json = require_field(root, "params", source_name);
    if (!params_json.is_object()) {
      throw Error(ErrorCode::ParseError, source_name + ": 'params' must be an object");
    }
    require_known_keys(params_json, {"linkage", "cut_distance", "target_count"},
                       source_name + ": params");
    ClusteringParams params;
    params.linkage = linkage_from_string(
        require_string(require_field(params_json, "linkage", source_name), "params.linkage"));
    if (params_json.contains("cut_distance")) {
      params.cut_distance = require_number(params_json["cut_distance"], "params.cut_distance");
    }
    if (params_json.contains("target_count")) {
      if (!params_json["target_count"].is_number_integer()) {
        throw Error(ErrorCode::ParseError, source_name + ": params.target_count must be an integer");
      }
      params.target_count = params_json["target_count"].get<int>();
    }

    const double threshold =
        require_number(require_field(root, "context_threshold", source_name), "context_threshold");

    const json& clusters_json = require_field(root, "clusters", source_name);
    if (!clusters_json.is_array()) {
      throw Error(ErrorCode::ParseError, source_name + ": 'clusters' must be an array");
    }
    std::vector<Cluster> clusters;
    std::set<std::string> all_members;
    for (std::size_t i = 0; i < clusters_json.size(); ++i) {
      const json& cluster_json = clusters_json[i];
      const std::string where = source_name + ": clusters[" + std::to_string(i) + "]";
      if (!cluster_json.is_object()) {
        throw Error(ErrorCode::ParseError, where + ": expected an object");
      }
      require_known_keys(cluster_json, {"id", "members", "curve", "signature"}, where);
      const json& id_json = require_field(cluster_json, "id", where);
      if (!id_json.is_number_integer() || id_json.get<int>() != static_cast<int>(i)) {
        throw Error(ErrorCode::ParseError, where + ": cluster ids must be dense from 0 in order");
      }
      const json& members_json = require_field(cluster_json, "members", where);
      if (!members_json.is_array() || members_json.empty()) {
        throw Error(ErrorCode::ParseError, where + ": members must be a nonempty array");
      }
      std::vector<std::string> members;
      for (const json& member : members_json) {
        members.push_back(require_string(member, where + ".members"));
        if (!all_members.insert(members.back()).second) {
          throw Error(ErrorCode::ParseError,
                      where + ": project '" + members.back() + "' appears in two clusters");
        }
      }
      std::sort(members.begin(), members.end());

      const json& curve_json = require_field(cluster_json, "curve", where);
      if (!curve_json.is_array()) {
        throw Error(ErrorCode::ParseError, where + ": curve must be an array");
      }
      std::vector<double> values;
      for (const json& v : curve_json) values.push_back(require_number(v, where + ".curve"));
      CharacteristicCurve curve(std::move(values));
      if (curve.granularity() != granularity.checkpoints()) {
        throw Error(ErrorCode::ParseError,
                    where + ": curve has " + std::to_string(curve.granularity()) +
                        " checkpoints, model granularity is " +
                        std::to_string(granularity.checkpoints()));
      }

      const json& signature_json = require_field(cluster_json, "signature", where);
      if (!signature_json.is_array()) {
        throw Error(ErrorCode::ParseError, where + ": signature must be an array");
      }
      std::map<std::string, std::vector<SignatureEntry>> entries;
      for (const json& entry : signature_json) {
        if (!entry.is_object()) {
          throw Error(ErrorCode::ParseError, where + ".signature: expected objects");
        }
        require_known_keys(entry, {"attribute", "value", "weight"}, where + ".signature");
        entries[require_string(require_field(entry, "attribute", where), where + ".signature")]
            .push_back({require_string(require_field(entry, "value", where), where + ".signature"),
                        require_number(require_field(entry, "weight", where), where + ".signature")});
      }
      clusters.push_back(Cluster{static_cast<int>(i), std::move(members), std::move(curve),
                                 ContextSignature(std::move(entries), threshold)});
    }

    params.validate(static_cast<int>(all_members.size()));
    return ClusterModel{granularity, std::move(clusters), params, threshold, fingerprint};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::UnsupportedVersion) throw;
    throw Error(ErrorCode::ParseError, source_name + ": " + e.detail());
  }
}

ClusterModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path), path.string());
}

bool models_equal(const ClusterModel& a, const ClusterModel& b) {
  return canonical_model_text(a) == canonical_model_text(b);
}

InFlightProject parse_inflight(const std::string& text, const std::string& source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_object()) {
    throw Error(ErrorCode::ParseError, source_name + ": expected a top-level object");
  }
  require_known_keys(root, {"id", "context", "baseline_total", "actuals"}, source_name);
  InFlightProject project;
  project.project_id = require_string(require_field(root, "id", source_name), source_name + ".id");
  if (root.contains("context")) {
    project.context = parse_context_object(root["context"], source_name + ".context");
  }
  if (root.contains("baseline_total")) {
    project.baseline_total = require_number(root["baseline_total"], source_name + ".baseline_total");
    if (!(*project.baseline_total > 0.0)) {
      throw Error(ErrorCode::BadTotal, source_name + ": baseline_total must be positive");
    }
  }
  if (root.contains("actuals")) {
    const json& actuals = root["actuals"];
    if (!actuals.is_array()) {
      throw Error(ErrorCode::ParseError, source_name + ": 'actuals' must be an array");
    }
    for (const json& v : actuals) {
      project.actuals.push_back(require_number(v, source_name + ".actuals"));
    }
  }
  return project;
}

InFlightProject load_inflight(const std::filesystem::path& path) {
  return parse_inflight(read_file(path), path.string());
}

}  // namespace curvecast
