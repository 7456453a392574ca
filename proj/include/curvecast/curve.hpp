#ifndef CURVECAST_CURVE_HPP
#define CURVECAST_CURVE_HPP

#include <span>
#include <string>
#include <vector>

#include "curvecast/error.hpp"

namespace curvecast {

/// Number of equidistant checkpoints on normalized project time.
/// Checkpoint i (1-based) sits at time i/m.
class Granularity {
public:
  explicit Granularity(int checkpoints);

  int checkpoints() const { return m_; }
  double time_at(int checkpoint) const { return static_cast<double>(checkpoint) / m_; }

  friend bool operator==(const Granularity&, const Granularity&) = default;

private:
  int m_;
};

enum class SeriesMode { Incremental, Cumulative };

struct MeasurementPoint {
  double time;   // elapsed fraction of planned duration, in [0,1]
  double value;  // absolute attribute units (e.g. person-hours)
};

/// Raw timestamped attribute values for one project. Times are normalized
/// to the planned duration before construction; values are either
/// per-interval increments or a running cumulative total.
class MeasurementSeries {
public:
  MeasurementSeries(std::string project_id, std::vector<MeasurementPoint> points, SeriesMode mode);

  const std::string& project_id() const { return project_id_; }
  const std::vector<MeasurementPoint>& points() const { return points_; }
  SeriesMode mode() const { return mode_; }

  /// Points converted to a cumulative series (identity for cumulative mode).
  std::vector<MeasurementPoint> cumulative_points() const;

private:
  std::string project_id_;
  std::vector<MeasurementPoint> points_;
  SeriesMode mode_;
};

/// Cumulative percentage of the total attribute, sampled at checkpoints
/// 1..m. Values are nondecreasing, within [0,100], and end at 100.
class CharacteristicCurve {
public:
  explicit CharacteristicCurve(std::vector<double> values);

  int granularity() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

  /// Value at a 1-based checkpoint.
  double at_checkpoint(int checkpoint) const { return values_.at(checkpoint - 1); }

  friend bool operator==(const CharacteristicCurve&, const CharacteristicCurve&) = default;

private:
  std::vector<double> values_;
};

/// Resamples a series onto m checkpoints and rescales it to percent of the
/// final cumulative value. Interpolation is linear on the cumulative
/// series; queries before the first point read 0 and queries after the
/// last point read the final value.
CharacteristicCurve normalize_series(const MeasurementSeries& series, const Granularity& granularity);

/// Euclidean distance between two curves of equal granularity.
double curve_distance(const CharacteristicCurve& a, const CharacteristicCurve& b);

/// Root-mean-square distance over the first k checkpoints, so distances
/// stay comparable across prefix lengths.
double prefix_distance(const CharacteristicCurve& a, const CharacteristicCurve& b, int k);

/// Same RMS prefix distance, but against an in-flight prefix of observed
/// percent values (length 1..m).
double prefix_distance(std::span<const double> observed, const CharacteristicCurve& curve);

/// Pointwise arithmetic mean of a nonempty set of curves.
CharacteristicCurve mean_curve(const std::vector<CharacteristicCurve>& curves);

}  // namespace curvecast

#endif
