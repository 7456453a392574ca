#include "curvecast/curve.hpp"

#include <algorithm>
#include <cmath>

namespace curvecast {

namespace {

constexpr double kFinalValueSlack = 1e-9;

}  // namespace

Granularity::Granularity(int checkpoints) : m_(checkpoints) {
  if (checkpoints < 2) {
    throw Error(ErrorCode::BadGranularity,
                "granularity must be at least 2, got " + std::to_string(checkpoints));
  }
}

MeasurementSeries::MeasurementSeries(std::string project_id, std::vector<MeasurementPoint> points,
                                     SeriesMode mode)
    : project_id_(std::move(project_id)), points_(std::move(points)), mode_(mode) {
  if (points_.size() < 2) {
    throw Error(ErrorCode::MalformedSeries,
                "series '" + project_id_ + "' needs at least 2 points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const MeasurementPoint& p = points_[i];
    if (!(p.time >= 0.0 && p.time <= 1.0)) {
      throw Error(ErrorCode::MalformedSeries,
                  "series '" + project_id_ + "': time " + std::to_string(p.time) +
                      " outside [0,1] (did you forget to normalize by the planned duration?)");
    }
    if (!(p.value >= 0.0)) {
      throw Error(ErrorCode::MalformedSeries,
                  "series '" + project_id_ + "': negative value at point " + std::to_string(i));
    }
    if (i > 0 && !(p.time > points_[i - 1].time)) {
      throw Error(ErrorCode::MalformedSeries,
                  "series '" + project_id_ + "': times must be strictly increasing");
    }
    if (mode_ == SeriesMode::Cumulative && i > 0 && p.value < points_[i - 1].value) {
      throw Error(ErrorCode::MalformedSeries,
                  "series '" + project_id_ + "': cumulative values must be nondecreasing");
    }
  }
  double total = 0.0;
  if (mode_ == SeriesMode::Cumulative) {
    total = points_.back().value;
  } else {
    for (const MeasurementPoint& p : points_) total += p.value;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroTotal, "series '" + project_id_ + "' has zero total");
  }
}

std::vector<MeasurementPoint> MeasurementSeries::cumulative_points() const {
  if (mode_ == SeriesMode::Cumulative) return points_;
  std::vector<MeasurementPoint> out;
  out.reserve(points_.size());
  double running = 0.0;
  for (const MeasurementPoint& p : points_) {
    running += p.value;
    out.push_back({p.time, running});
  }
  return out;
}

CharacteristicCurve::CharacteristicCurve(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw Error(ErrorCode::MalformedCurve, "curve needs at least 2 checkpoints");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= -kFinalValueSlack && v <= 100.0 + kFinalValueSlack)) {
      throw Error(ErrorCode::MalformedCurve,
                  "curve value " + std::to_string(v) + " outside [0,100]");
    }
    if (i > 0 && v < values_[i - 1] - kFinalValueSlack) {
      throw Error(ErrorCode::MalformedCurve, "curve values must be nondecreasing");
    }
  }
  if (std::abs(values_.back() - 100.0) > kFinalValueSlack) {
    throw Error(ErrorCode::MalformedCurve,
                "curve must end at 100, ends at " + std::to_string(values_.back()));
  }
}

namespace {

// Piecewise-linear read of a cumulative series: 0 before the first point,
// the final value after the last.
double interpolate_cumulative(const std::vector<MeasurementPoint>& pts, double t) {
  if (t < pts.front().time) return 0.0;
  if (t >= pts.back().time) return pts.back().value;
  std::size_t hi = 1;
  while (pts[hi].time < t) ++hi;
  const MeasurementPoint& a = pts[hi - 1];
  const MeasurementPoint& b = pts[hi];
  if (t == a.time) return a.value;
  if (t == b.time) return b.value;
  const double w = (t - a.time) / (b.time - a.time);
  return a.value + (b.value - a.value) * w;
}

}  // namespace

CharacteristicCurve normalize_series(const MeasurementSeries& series, const Granularity& granularity) {
  const std::vector<MeasurementPoint> cumulative = series.cumulative_points();
  const double total = cumulative.back().value;
  const int m = granularity.checkpoints();
  std::vector<double> values(m);
  for (int i = 1; i <= m; ++i) {
    const double v = interpolate_cumulative(cumulative, granularity.time_at(i));
    values[i - 1] = v / total * 100.0;
  }
  return CharacteristicCurve(std::move(values));
}

namespace {

void require_same_granularity(const CharacteristicCurve& a, const CharacteristicCurve& b) {
  if (a.granularity() != b.granularity()) {
    throw Error(ErrorCode::GranularityMismatch,
                "curves have granularities " + std::to_string(a.granularity()) + " and " +
                    std::to_string(b.granularity()));
  }
}

}  // namespace

double curve_distance(const CharacteristicCurve& a, const CharacteristicCurve& b) {
  require_same_granularity(a, b);
  double sum = 0.0;
  for (int i = 0; i < a.granularity(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double prefix_distance(const CharacteristicCurve& a, const CharacteristicCurve& b, int k) {
  require_same_granularity(a, b);
  if (k < 1 || k > a.granularity()) {
    throw Error(ErrorCode::BadPrefix,
                "prefix length " + std::to_string(k) + " outside [1," +
                    std::to_string(a.granularity()) + "]");
  }
  return prefix_distance(std::span<const double>(a.values().data(), static_cast<std::size_t>(k)), b);
}

double prefix_distance(std::span<const double> observed, const CharacteristicCurve& curve) {
  const int k = static_cast<int>(observed.size());
  if (k < 1 || k > curve.granularity()) {
    throw Error(ErrorCode::BadPrefix,
                "observed prefix length " + std::to_string(k) + " outside [1," +
                    std::to_string(curve.granularity()) + "]");
  }
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double d = observed[i] - curve.values()[i];
    sum += d * d;
  }
  return std::sqrt(sum / k);
}

CharacteristicCurve mean_curve(const std::vector<CharacteristicCurve>& curves) {
  if (curves.empty()) {
    throw Error(ErrorCode::EmptyInput, "mean of zero curves");
  }
  const int m = curves.front().granularity();
  std::vector<double> sums(m, 0.0);
  for (const CharacteristicCurve& c : curves) {
    require_same_granularity(curves.front(), c);
    for (int i = 0; i < m; ++i) sums[i] += c.values()[i];
  }
  for (double& s : sums) s /= static_cast<double>(curves.size());
  return CharacteristicCurve(std::move(sums));
}

}  // namespace curvecast
