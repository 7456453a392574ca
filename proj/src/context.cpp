#include "curvecast/context.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace curvecast {

ContextProfile::ContextProfile(std::map<std::string, std::string> entries)
    : entries_(std::move(entries)) {
  for (const auto& [attribute, value] : entries_) {
    if (attribute.empty()) {
      throw Error(ErrorCode::ParseError, "context attribute name must be nonempty");
    }
    (void)value;
  }
}

void ContextProfile::set(const std::string& attribute, const std::string& value) {
  if (attribute.empty()) {
    throw Error(ErrorCode::ParseError, "context attribute name must be nonempty");
  }
  entries_[attribute] = value;
}

const std::string& ContextProfile::value(const std::string& attribute) const {
  auto it = entries_.find(attribute);
  return it == entries_.end() ? kMissingValue : it->second;
}

ContextSignature::ContextSignature(std::map<std::string, std::vector<SignatureEntry>> entries,
                                   double threshold)
    : entries_(std::move(entries)), threshold_(threshold) {
  for (auto& [attribute, values] : entries_) {
    if (attribute.empty()) {
      throw Error(ErrorCode::ParseError, "signature attribute name must be nonempty");
    }
    std::sort(values.begin(), values.end(),
              [](const SignatureEntry& a, const SignatureEntry& b) { return a.value < b.value; });
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i].weight > threshold_)) {
        throw Error(ErrorCode::BadParams, "signature weight for '" + attribute + "=" +
                                              values[i].value + "' does not clear the threshold");
      }
      if (i > 0 && values[i].value == values[i - 1].value) {
        throw Error(ErrorCode::BadParams,
                    "duplicate signature value '" + attribute + "=" + values[i].value + "'");
      }
    }
  }
}

double ContextSignature::weight_for(const std::string& attribute, const std::string& value) const {
  auto it = entries_.find(attribute);
  if (it == entries_.end()) return 0.0;
  for (const SignatureEntry& entry : it->second) {
    if (entry.value == value) return entry.weight;
  }
  return 0.0;
}

namespace {

double frequency(const std::string& attribute, const std::string& value,
                 const std::vector<ContextProfile>& profiles) {
  std::size_t hits = 0;
  for (const ContextProfile& p : profiles) {
    if (p.value(attribute) == value) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(profiles.size());
}

std::set<std::string> observed_values(const std::string& attribute,
                                      const std::vector<ContextProfile>& profiles) {
  std::set<std::string> values;
  for (const ContextProfile& p : profiles) values.insert(p.value(attribute));
  return values;
}

void require_nonempty(const std::vector<ContextProfile>& cluster_members,
                      const std::vector<ContextProfile>& database) {
  if (cluster_members.empty()) throw Error(ErrorCode::EmptyInput, "cluster has no members");
  if (database.empty()) throw Error(ErrorCode::EmptyInput, "database has no profiles");
}

}  // namespace

double value_weight(const std::string& attribute, const std::string& value,
                    const std::vector<ContextProfile>& cluster_members,
                    const std::vector<ContextProfile>& database) {
  require_nonempty(cluster_members, database);
  double norm_sq = 0.0;
  for (const std::string& observed : observed_values(attribute, database)) {
    const double raw = frequency(attribute, observed, cluster_members) -
                       frequency(attribute, observed, database);
    norm_sq += raw * raw;
  }
  if (norm_sq == 0.0) return 0.0;
  const double raw = frequency(attribute, value, cluster_members) -
                     frequency(attribute, value, database);
  return raw / std::sqrt(norm_sq);
}

ContextSignature build_signature(const std::vector<ContextProfile>& cluster_members,
                                 const std::vector<ContextProfile>& database, double threshold) {
  require_nonempty(cluster_members, database);
  std::set<std::string> attributes;
  for (const ContextProfile& member : cluster_members) {
    for (const auto& [attribute, value] : member.entries()) attributes.insert(attribute);
  }
  std::map<std::string, std::vector<SignatureEntry>> retained;
  for (const std::string& attribute : attributes) {
    for (const std::string& value : observed_values(attribute, cluster_members)) {
      const double weight = value_weight(attribute, value, cluster_members, database);
      if (weight > threshold) retained[attribute].push_back({value, weight});
    }
  }
  return ContextSignature(std::move(retained), threshold);
}

double goodness_of_fit(const ContextProfile& project, const ContextSignature& signature) {
  double score = 0.0;
  for (const auto& [attribute, values] : signature.entries()) {
    (void)values;
    score += signature.weight_for(attribute, project.value(attribute));
  }
  return score;
}

}  // namespace curvecast
