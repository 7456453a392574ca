#ifndef CURVECAST_CONTEXT_HPP
#define CURVECAST_CONTEXT_HPP

#include <map>
#include <string>
#include <vector>

#include "curvecast/error.hpp"

namespace curvecast {

/// Reserved nominal value standing for "attribute not recorded". Injected
/// at ingestion; never accepted from user input.
inline const std::string kMissingValue = "⊥";

/// Nominal context attributes of one project (domain, complexity, ...).
class ContextProfile {
public:
  ContextProfile() = default;
  explicit ContextProfile(std::map<std::string, std::string> entries);

  void set(const std::string& attribute, const std::string& value);

  /// Value for an attribute; reads as the missing marker when absent.
  const std::string& value(const std::string& attribute) const;
  bool has(const std::string& attribute) const { return entries_.count(attribute) > 0; }

  const std::map<std::string, std::string>& entries() const { return entries_; }

  friend bool operator==(const ContextProfile&, const ContextProfile&) = default;

private:
  std::map<std::string, std::string> entries_;
};

struct SignatureEntry {
  std::string value;
  double weight;

  friend bool operator==(const SignatureEntry&, const SignatureEntry&) = default;
};

/// The context values deemed typical for a cluster: per attribute, the
/// (value, weight) pairs whose weight clears the threshold.
class ContextSignature {
public:
  ContextSignature() = default;
  ContextSignature(std::map<std::string, std::vector<SignatureEntry>> entries, double threshold);

  /// Weight of a retained (attribute, value) pair, or 0 when not retained.
  double weight_for(const std::string& attribute, const std::string& value) const;

  const std::map<std::string, std::vector<SignatureEntry>>& entries() const { return entries_; }
  double threshold() const { return threshold_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const ContextSignature&, const ContextSignature&) = default;

private:
  std::map<std::string, std::vector<SignatureEntry>> entries_;
  double threshold_ = 0.0;
};

/// Weight of one nominal value for a cluster: the difference between the
/// value's frequency inside the cluster and in the whole database,
/// normalized by the Euclidean norm of those differences over every value
/// of the attribute observed in the database. Always in [-1, 1]; 0 when
/// the attribute is distributed identically everywhere.
double value_weight(const std::string& attribute, const std::string& value,
                    const std::vector<ContextProfile>& cluster_members,
                    const std::vector<ContextProfile>& database);

/// Weights every value appearing among the cluster members and keeps the
/// pairs whose weight is strictly above the threshold. Threshold 0 keeps
/// exactly the positive weights.
ContextSignature build_signature(const std::vector<ContextProfile>& cluster_members,
                                 const std::vector<ContextProfile>& database, double threshold);

/// Sum of the signature weights matched by the project's own context
/// values; unmatched or unknown values contribute 0.
double goodness_of_fit(const ContextProfile& project, const ContextSignature& signature);

}  // namespace curvecast

#endif
