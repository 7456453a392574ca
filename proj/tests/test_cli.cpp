#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "curvecast/cli.hpp"
#include "curvecast/store.hpp"
#include "support/reference_clustering.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace curvecast;
using testsupport::TempDir;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Three clearly front-loaded and three back-loaded projects whose
// complexity tracks the shape; "beta2" leaves domain unset.
std::string six_project_db() {
  return R"({
    "projects": [
      {"id": "front1", "planned_duration": 10, "context": {"complexity": "low", "domain": "web"},
       "series": {"mode": "cumulative", "points": [[2, 60], [5, 85], [10, 100]]}},
      {"id": "front2", "planned_duration": 1, "context": {"complexity": "low", "domain": "web"},
       "series": {"mode": "cumulative", "points": [[0.2, 63], [0.5, 88], [1, 102]]}},
      {"id": "front3", "planned_duration": 20, "context": {"complexity": "low", "domain": "finance"},
       "series": {"mode": "cumulative", "points": [[4, 58], [10, 83], [20, 99]]}},
      {"id": "beta1", "planned_duration": 10, "context": {"complexity": "high", "domain": "web"},
       "series": {"mode": "cumulative", "points": [[2, 8], [5, 30], [10, 100]]}},
      {"id": "beta2", "planned_duration": 10, "context": {"complexity": "high"},
       "series": {"mode": "cumulative", "points": [[2, 10], [5, 33], [10, 101]]}},
      {"id": "beta3", "planned_duration": 10, "context": {"complexity": "high", "domain": "embedded"},
       "series": {"mode": "cumulative", "points": [[2, 7], [5, 28], [10, 98]]}}
    ]
  })";
}

std::string worked_example_model_text() {
  ContextSignature fitting({{"domain", {{"B", 0.97}}},
                            {"complexity", {{"D", 0.27}, {"E", 0.95}}}},
                           0.0);
  ContextSignature other({{"domain", {{"A", 0.8}}}}, 0.0);
  std::vector<Cluster> clusters;
  clusters.push_back(Cluster{0, {"x"}, CharacteristicCurve({20, 50, 100}), fitting});
  clusters.push_back(Cluster{1, {"y"}, CharacteristicCurve({40, 70, 100}), other});
  ClusteringParams params;
  params.cut_distance = 25.0;
  return canonical_model_text(
      ClusterModel{Granularity(3), std::move(clusters), params, 0.0, "fnv1a64:feedbeef"});
}

}  // namespace

TEST_CASE("build partitions the database and writes a canonical model") {
  TempDir dir;
  const auto db = dir.write("db.json", six_project_db());
  const auto model_path = dir.file("model.json");

  const auto result = run_cli({"build", "--db", db.string(), "--granularity", "5", "--clusters",
                               "2", "--out", model_path.string()});
  REQUIRE(result.code == 0);
  CHECK(result.out.find("projects: 6") != std::string::npos);
  CHECK(result.out.find("cluster 0") != std::string::npos);
  CHECK(result.out.find("model written to") != std::string::npos);

  const ClusterModel model = load_model(model_path);
  REQUIRE(model.cluster_count() == 2);
  CHECK(model.cluster_by_id(0).member_ids ==
        std::vector<std::string>{"beta1", "beta2", "beta3"});
  CHECK(model.cluster_by_id(1).member_ids ==
        std::vector<std::string>{"front1", "front2", "front3"});
  // complexity=high is typical for the back-loaded cluster
  CHECK(model.cluster_by_id(0).signature.weight_for("complexity", "high") > 0.0);

  // The partition agrees with the naive reference implementation.
  std::map<std::string, std::vector<double>> raw;
  for (const auto& [id, curve] : load_database(db).characteristic_curves(Granularity(5))) {
    raw[id] = curve.values();
  }
  std::vector<std::vector<std::string>> partition;
  for (const Cluster& c : model.clusters) partition.push_back(c.member_ids);
  std::sort(partition.begin(), partition.end());
  CHECK(partition == testsupport::reference_agglomerative(raw, "average", std::nullopt, 2));
}

TEST_CASE("build runs are byte-identical") {
  TempDir dir;
  const auto db = dir.write("db.json", six_project_db());
  const auto first = dir.file("m1.json");
  const auto second = dir.file("m2.json");
  REQUIRE(run_cli({"build", "--db", db.string(), "--clusters", "2", "--out", first.string()}).code ==
          0);
  REQUIRE(
      run_cli({"build", "--db", db.string(), "--clusters", "2", "--out", second.string()}).code ==
      0);
  CHECK(TempDir::slurp(first) == TempDir::slurp(second));
}

TEST_CASE("build rejects bad inputs with exit 2") {
  TempDir dir;
  const auto db = dir.write("db.json", six_project_db());

  const auto tiny = run_cli({"build", "--db", db.string(), "--granularity", "1", "--clusters", "2",
                             "--out", dir.file("x.json").string()});
  CHECK(tiny.code == 2);
  CHECK(tiny.err.find("granularity") != std::string::npos);

  const auto empty_db = dir.write("empty.json", R"({"projects": []})");
  const auto empty = run_cli(
      {"build", "--db", empty_db.string(), "--clusters", "1", "--out", dir.file("y.json").string()});
  CHECK(empty.code == 2);
  CHECK(empty.err.find("EmptyInput") != std::string::npos);

  const auto no_stop = run_cli({"build", "--db", db.string(), "--out", dir.file("z.json").string()});
  CHECK(no_stop.code == 2);

  const auto both_stops = run_cli({"build", "--db", db.string(), "--cut", "5", "--clusters", "2",
                                   "--out", dir.file("w.json").string()});
  CHECK(both_stops.code == 2);

  const auto missing = run_cli({"build", "--db", dir.file("absent.json").string(), "--clusters",
                                "1", "--out", dir.file("v.json").string()});
  CHECK(missing.code == 2);
}

TEST_CASE("predict prints the goodness of fitting and the curve") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());

  const auto fit = run_cli(
      {"predict", "--model", model.string(), "--context", "domain=B,complexity=D"});
  REQUIRE(fit.code == 0);
  CHECK(fit.out.find("assigned cluster: 0") != std::string::npos);
  CHECK(fit.out.find("goodness of fitting: 1.24") != std::string::npos);

  const auto unknown = run_cli(
      {"predict", "--model", model.string(), "--context", "domain=Q,framework=none"});
  REQUIRE(unknown.code == 0);
  CHECK(unknown.out.find("assigned cluster: 0") != std::string::npos);
  CHECK(unknown.out.find("goodness of fitting: 0") != std::string::npos);
}

TEST_CASE("predict with a total emits absolute values") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());
  const auto result = run_cli({"predict", "--model", model.string(), "--context",
                               "domain=B,complexity=D", "--total", "400", "--format", "json"});
  REQUIRE(result.code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc["assigned_cluster"] == 0);
  CHECK(doc["percent"] == nlohmann::json::array({20, 50, 100}));
  CHECK(doc["absolute"] == nlohmann::json::array({80, 200, 400}));

  const auto csv = run_cli({"predict", "--model", model.string(), "--context",
                            "domain=B,complexity=D", "--total", "400", "--format", "csv"});
  CHECK(csv.out.find("checkpoint,percent,absolute") != std::string::npos);
  CHECK(csv.out.find("3,100,400") != std::string::npos);
}

TEST_CASE("predict rejects malformed context and totals") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());
  CHECK(run_cli({"predict", "--model", model.string(), "--context", "domainB"}).code == 2);
  CHECK(run_cli({"predict", "--model", model.string(), "--context", "=B"}).code == 2);
  CHECK(run_cli({"predict", "--model", model.string(), "--context", "a=1,a=2"}).code == 2);
  CHECK(run_cli({"predict", "--model", model.string(), "--context", "domain=B", "--total", "0"})
            .code == 2);
}

TEST_CASE("predict warns when the database fingerprint differs") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());
  const auto db = dir.write("db.json", six_project_db());
  const auto result = run_cli(
      {"predict", "--model", model.string(), "--context", "domain=B", "--db", db.string()});
  CHECK(result.code == 0);
  CHECK(result.err.find("does not match") != std::string::npos);
}

TEST_CASE("monitor stays quiet while actuals track the prediction") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());
  // cluster 0 curve is [20,50,100]; actuals in absolute units of a 400 plan
  const auto project = dir.write("project.json",
                                 R"({"id": "p", "context": {"domain": "B", "complexity": "D"},
                                     "baseline_total": 400, "actuals": [80, 200, 400]})");
  const auto result = run_cli({"monitor", "--model", model.string(), "--project",
                               project.string(), "--tolerance", "10", "--strategy", "distance"});
  REQUIRE(result.code == 0);
  CHECK(result.out.find("0 flagged checkpoints, 0 reassignments") != std::string::npos);
}

TEST_CASE("monitor flags deviations and logs the cluster switch") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());
  // 38% at checkpoint 1: distance 18 to cluster 0, 2 to cluster 1.
  const auto project = dir.write("project.json",
                                 R"({"id": "p", "context": {"domain": "B", "complexity": "D"},
                                     "baseline_total": 100, "actuals": [38]})");
  const auto result = run_cli({"monitor", "--model", model.string(), "--project",
                               project.string(), "--tolerance", "10", "--strategy", "distance"});
  REQUIRE(result.code == 0);
  CHECK(result.out.find("FLAG") != std::string::npos);
  CHECK(result.out.find("reassigned cluster 0 -> 1") != std::string::npos);
  CHECK(result.out.find("1 flagged checkpoint, 1 reassignment") != std::string::npos);
}

TEST_CASE("monitor requires a baseline total") {
  TempDir dir;
  const auto model = dir.write("model.json", worked_example_model_text());
  const auto project = dir.write("project.json", R"({"id": "p", "actuals": [10]})");
  const auto result = run_cli({"monitor", "--model", model.string(), "--project",
                               project.string(), "--tolerance", "10", "--strategy", "distance"});
  CHECK(result.code == 2);
  CHECK(result.err.find("baseline_total") != std::string::npos);
}

TEST_CASE("evaluate needs at least 3 projects") {
  TempDir dir;
  const auto db = dir.write("small.json", R"({"projects": [
    {"id": "a", "planned_duration": 1, "series": {"mode": "cumulative", "points": [[0.5, 1], [1, 2]]}},
    {"id": "b", "planned_duration": 1, "series": {"mode": "cumulative", "points": [[0.5, 1], [1, 2]]}}
  ]})");
  CHECK(run_cli({"evaluate", "--db", db.string(), "--strategy", "context", "--clusters", "1"})
            .code == 2);
}

TEST_CASE("identical curves evaluate to zero error everywhere") {
  TempDir dir;
  std::string db_text = R"({"projects": [)";
  for (int i = 0; i < 4; ++i) {
    db_text += std::string(i ? "," : "") + R"({"id": "p)" + std::to_string(i) +
               R"(", "planned_duration": 1, "series": {"mode": "cumulative",
                 "points": [[0.25, 10], [0.5, 30], [0.75, 70], [1, 100]]}})";
  }
  db_text += "]}";
  const auto db = dir.write("db.json", db_text);

  const auto result = run_cli({"evaluate", "--db", db.string(), "--strategy", "context",
                               "--granularity", "4", "--clusters", "1", "--format", "json"});
  REQUIRE(result.code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  for (const auto& row : doc["reports"][0]["projects"]) {
    CHECK(row["mae"].get<double>() == 0.0);
    CHECK(row["rmse"].get<double>() == 0.0);
  }
}

TEST_CASE("hybrid with delta 0 reproduces the distance report") {
  TempDir dir;
  const auto db = dir.write("db.json", six_project_db());
  const auto distance = run_cli({"evaluate", "--db", db.string(), "--strategy", "distance",
                                 "--clusters", "2", "--format", "json"});
  const auto hybrid = run_cli({"evaluate", "--db", db.string(), "--strategy", "hybrid", "--delta",
                               "0", "--clusters", "2", "--format", "json"});
  REQUIRE(distance.code == 0);
  REQUIRE(hybrid.code == 0);
  auto d = nlohmann::json::parse(distance.out)["reports"][0];
  auto h = nlohmann::json::parse(hybrid.out)["reports"][0];
  CHECK(d["strategy"] == "distance");
  CHECK(h["strategy"] == "hybrid");
  d.erase("strategy");
  h.erase("strategy");
  CHECK(d == h);
}

TEST_CASE("evaluate separates planted shapes with perfectly correlated context") {
  TempDir dir;
  testsupport::SyntheticSpec spec;
  spec.projects = 24;
  spec.context_reliability = 1.0;
  spec.seed = 77;
  const ProjectDatabase db = testsupport::planted_two_shape_db(spec);
  const auto db_path = dir.file("db.json");
  save_database(db, db_path);

  const auto result = run_cli({"evaluate", "--db", db_path.string(), "--strategy", "context",
                               "--clusters", "2", "--format", "json"});
  REQUIRE(result.code == 0);
  const auto report = nlohmann::json::parse(result.out)["reports"][0];

  const auto front = testsupport::front_loaded_prototype(10);
  const auto back = testsupport::back_loaded_prototype(10);
  int correct = 0;
  for (const auto& row : report["projects"]) {
    const auto predicted = row["predicted"].get<std::vector<double>>();
    double to_front = 0.0, to_back = 0.0;
    for (int i = 0; i < 10; ++i) {
      to_front += std::abs(predicted[i] - front[i]);
      to_back += std::abs(predicted[i] - back[i]);
    }
    const bool predicted_front = to_front < to_back;
    if (predicted_front == testsupport::is_front_loaded_id(row["id"].get<std::string>())) {
      ++correct;
    }
    CHECK(row["fold_fingerprint"].get<std::string>() != database_fingerprint(db));
  }
  CHECK(correct == 24);
  CHECK(report["aggregates"]["mean_mae"].get<double>() <
        report["aggregates"]["baseline_mean_mae"].get<double>());
}

TEST_CASE("evaluate output is identical across runs") {
  TempDir dir;
  const auto db = dir.write("db.json", six_project_db());
  const std::vector<std::string> args{"evaluate", "--db", db.string(), "--strategy", "all",
                                      "--clusters", "2", "--format", "json"};
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  REQUIRE(first.code == 0);
  CHECK(first.out == second.out);
}

TEST_CASE("evaluate writes the same report to a file") {
  TempDir dir;
  const auto db = dir.write("db.json", six_project_db());
  const auto report_path = dir.file("report.json");
  const auto result = run_cli({"evaluate", "--db", db.string(), "--strategy", "all", "--clusters",
                               "2", "--format", "json", "--report", report_path.string()});
  REQUIRE(result.code == 0);
  CHECK(result.out == TempDir::slurp(report_path));
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc["reports"].size() == 3);  // distance, context, hybrid
}

TEST_CASE("import produces a database that build accepts") {
  TempDir dir;
  const auto points = dir.write("points.csv",
                                "project_id,time,value\n"
                                "a,5,50\na,10,100\n"
                                "b,5,20\nb,10,100\n"
                                "c,5,55\nc,10,100\n");
  const auto contexts = dir.write("context.csv",
                                  "project_id,attribute,value\n"
                                  "a,complexity,low\nb,complexity,high\nc,complexity,low\n");
  const auto db_path = dir.file("db.json");
  const auto import_result =
      run_cli({"import", "--points", points.string(), "--context", contexts.string(), "--out",
               db_path.string()});
  REQUIRE(import_result.code == 0);
  CHECK(import_result.out.find("imported 3 projects") != std::string::npos);

  const auto build_result = run_cli(
      {"build", "--db", db_path.string(), "--clusters", "2", "--out", dir.file("m.json").string()});
  CHECK(build_result.code == 0);
}

TEST_CASE("usage errors exit with 2 and help with 0") {
  CHECK(run_cli({}).code == 2);                       // a subcommand is required
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"build"}).code == 2);                // missing required flags
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"build", "--help"}).code == 0);
}
