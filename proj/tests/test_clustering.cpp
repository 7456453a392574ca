#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "curvecast/clustering.hpp"
#include "support/generators.hpp"
#include "support/reference_clustering.hpp"

using namespace curvecast;

namespace {

ClusteringParams with_cut(double cut, Linkage linkage = Linkage::Average) {
  ClusteringParams params;
  params.linkage = linkage;
  params.cut_distance = cut;
  return params;
}

ClusteringParams with_count(int count, Linkage linkage = Linkage::Average) {
  ClusteringParams params;
  params.linkage = linkage;
  params.target_count = count;
  return params;
}

std::map<std::string, CharacteristicCurve> random_curve_map(std::mt19937& rng, int n, int m) {
  std::map<std::string, CharacteristicCurve> curves;
  for (int i = 0; i < n; ++i) {
    curves.emplace("p" + std::to_string(i), testsupport::random_curve(rng, m));
  }
  return curves;
}

std::vector<std::vector<std::string>> partition_of(const std::vector<Cluster>& clusters) {
  std::vector<std::vector<std::string>> partition;
  for (const Cluster& c : clusters) partition.push_back(c.member_ids);
  std::sort(partition.begin(), partition.end());
  return partition;
}

}  // namespace

TEST_CASE("a single curve forms a singleton cluster carrying its own curve") {
  std::map<std::string, CharacteristicCurve> curves{{"solo", CharacteristicCurve({40, 100})}};
  const auto clusters = build_clusters(curves, with_cut(5.0));
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].cluster_id == 0);
  CHECK(clusters[0].member_ids == std::vector<std::string>{"solo"});
  CHECK(clusters[0].curve == curves.at("solo"));
}

TEST_CASE("identical curves merge at distance zero under any positive cut") {
  std::map<std::string, CharacteristicCurve> curves{{"a", CharacteristicCurve({40, 100})},
                                                    {"b", CharacteristicCurve({40, 100})}};
  const auto clusters = build_clusters(curves, with_cut(1e-6));
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].member_ids == std::vector<std::string>{"a", "b"});
}

TEST_CASE("merging stops only when the linkage distance exceeds the cut") {
  // The two curves sit at distance exactly 10.
  std::map<std::string, CharacteristicCurve> curves{{"a", CharacteristicCurve({0, 100})},
                                                    {"b", CharacteristicCurve({10, 100})}};
  CHECK(build_clusters(curves, with_cut(10.0)).size() == 1);   // boundary still merges
  CHECK(build_clusters(curves, with_cut(9.999)).size() == 2);
}

TEST_CASE("equal-distance ties merge the lexicographically least pair first") {
  std::map<std::string, CharacteristicCurve> curves{{"p1", CharacteristicCurve({50, 100})},
                                                    {"p2", CharacteristicCurve({50, 100})},
                                                    {"p3", CharacteristicCurve({50, 100})},
                                                    {"p4", CharacteristicCurve({50, 100})}};
  const auto clusters = build_clusters(curves, with_count(2));
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].member_ids == std::vector<std::string>{"p1", "p2", "p3"});
  CHECK(clusters[1].member_ids == std::vector<std::string>{"p4"});
}

TEST_CASE("six curves, average linkage, two clusters: matches the naive reference") {
  std::map<std::string, CharacteristicCurve> curves{
      {"a1", CharacteristicCurve({72, 90, 100})}, {"a2", CharacteristicCurve({70, 88, 100})},
      {"a3", CharacteristicCurve({75, 93, 100})}, {"b1", CharacteristicCurve({10, 28, 100})},
      {"b2", CharacteristicCurve({12, 30, 100})}, {"b3", CharacteristicCurve({8, 25, 100})}};
  const auto clusters = build_clusters(curves, with_count(2));

  std::map<std::string, std::vector<double>> raw;
  for (const auto& [id, curve] : curves) raw[id] = curve.values();
  const auto expected = testsupport::reference_agglomerative(raw, "average", std::nullopt, 2);
  CHECK(partition_of(clusters) == expected);
  CHECK(clusters[0].member_ids == std::vector<std::string>{"a1", "a2", "a3"});
}

TEST_CASE("all linkages match the naive reference on random inputs") {
  std::mt19937 rng(211);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const int m = std::uniform_int_distribution<int>(2, 8)(rng);
    const auto curves = random_curve_map(rng, n, m);
    std::map<std::string, std::vector<double>> raw;
    for (const auto& [id, curve] : curves) raw[id] = curve.values();

    for (Linkage linkage : {Linkage::Single, Linkage::Average, Linkage::Complete}) {
      ClusteringParams params;
      params.linkage = linkage;
      std::optional<double> cut;
      std::optional<int> target;
      if (trial % 2 == 0) {
        target = std::uniform_int_distribution<int>(1, n)(rng);
        params.target_count = target;
      } else {
        cut = std::uniform_real_distribution<double>(1.0, 120.0)(rng);
        params.cut_distance = cut;
      }
      const auto clusters = build_clusters(curves, params);
      const auto expected =
          testsupport::reference_agglomerative(raw, to_string(linkage), cut, target);
      CHECK(partition_of(clusters) == expected);
    }
  }
}

TEST_CASE("every project lands in exactly one cluster") {
  std::mt19937 rng(223);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const auto curves = random_curve_map(rng, n, 6);
    const auto clusters =
        build_clusters(curves, trial % 2 ? with_cut(30.0) : with_count(std::min(n, 3)));
    std::set<std::string> seen;
    for (const Cluster& c : clusters) {
      CHECK(!c.member_ids.empty());
      for (const std::string& id : c.member_ids) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == curves.size());
    for (int i = 0; i < static_cast<int>(clusters.size()); ++i) {
      CHECK(clusters[i].cluster_id == i);
    }
  }
}

TEST_CASE("merge distances never decrease") {
  std::mt19937 rng(227);
  for (Linkage linkage : {Linkage::Single, Linkage::Average, Linkage::Complete}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = std::uniform_int_distribution<int>(2, 10)(rng);
      const auto curves = random_curve_map(rng, n, 5);
      const auto trace = build_clusters_traced(curves, with_count(1, linkage));
      for (std::size_t i = 1; i < trace.merge_distances.size(); ++i) {
        CHECK(trace.merge_distances[i] >= trace.merge_distances[i - 1]);
      }
    }
  }
}

TEST_CASE("cluster curves equal the mean of their member curves") {
  std::mt19937 rng(229);
  const auto curves = random_curve_map(rng, 9, 7);
  for (const Cluster& cluster : build_clusters(curves, with_count(3))) {
    std::vector<CharacteristicCurve> members;
    for (const std::string& id : cluster.member_ids) members.push_back(curves.at(id));
    const auto expected = mean_curve(members);
    for (int i = 0; i < 7; ++i) {
      CHECK(cluster.curve.values()[i] == doctest::Approx(expected.values()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("identical inputs produce identical clusterings") {
  std::mt19937 rng(233);
  const auto curves = random_curve_map(rng, 10, 6);
  const auto first = build_clusters(curves, with_cut(20.0));
  const auto second = build_clusters(curves, with_cut(20.0));
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].cluster_id == second[i].cluster_id);
    CHECK(first[i].member_ids == second[i].member_ids);
    CHECK(first[i].curve == second[i].curve);
  }
}

TEST_CASE("linkage_distance examples and ordering") {
  const CharacteristicCurve c({90, 100});
  const CharacteristicCurve c1({93, 100});
  const CharacteristicCurve c2({95, 100});
  for (Linkage linkage : {Linkage::Single, Linkage::Average, Linkage::Complete}) {
    CHECK(linkage_distance({c}, {c1}, linkage) == doctest::Approx(3.0).epsilon(1e-12));
  }
  // distances 3 and 5 average to 4
  CHECK(linkage_distance({c}, {c1, c2}, Linkage::Average) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(linkage_distance({c}, {c1, c2}, Linkage::Single) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(linkage_distance({c}, {c1, c2}, Linkage::Complete) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(linkage_distance({}, {c}, Linkage::Single), Error);

  std::mt19937 rng(239);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CharacteristicCurve> a, b;
    const int na = std::uniform_int_distribution<int>(1, 4)(rng);
    const int nb = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int i = 0; i < na; ++i) a.push_back(testsupport::random_curve(rng, 5));
    for (int i = 0; i < nb; ++i) b.push_back(testsupport::random_curve(rng, 5));
    const double single = linkage_distance(a, b, Linkage::Single);
    const double average = linkage_distance(a, b, Linkage::Average);
    const double complete = linkage_distance(a, b, Linkage::Complete);
    CHECK(single <= average + 1e-12);
    CHECK(average <= complete + 1e-12);
  }
}

TEST_CASE("parameter validation") {
  std::map<std::string, CharacteristicCurve> curves{{"a", CharacteristicCurve({40, 100})},
                                                    {"b", CharacteristicCurve({60, 100})}};
  CHECK_THROWS_AS(build_clusters({}, with_cut(1.0)), Error);

  ClusteringParams both;
  both.cut_distance = 1.0;
  both.target_count = 1;
  CHECK_THROWS_AS(build_clusters(curves, both), Error);

  ClusteringParams neither;
  CHECK_THROWS_AS(build_clusters(curves, neither), Error);
  CHECK_THROWS_AS(build_clusters(curves, with_cut(-2.0)), Error);
  CHECK_THROWS_AS(build_clusters(curves, with_count(0)), Error);
  CHECK_THROWS_AS(build_clusters(curves, with_count(3)), Error);

  std::map<std::string, CharacteristicCurve> mixed{{"a", CharacteristicCurve({40, 100})},
                                                   {"b", CharacteristicCurve({30, 60, 100})}};
  CHECK_THROWS_AS(build_clusters(mixed, with_cut(1.0)), Error);
}
