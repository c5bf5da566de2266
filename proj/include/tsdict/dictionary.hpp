#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsdict/distance_profile.hpp"
#include "tsdict/series.hpp"

namespace tsdict {

/// Raised when no candidate of a class reaches TP >= 1 with FP = 0.
class NoConservedTemplate : public DomainError {
 public:
  explicit NoConservedTemplate(const std::string& behavior_class);
  const std::string& behavior_class() const { return class_; }

 private:
  std::string class_;
};

/// Inclusive range of window lengths in samples.
struct LengthRange {
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  std::size_t step = 1;

  friend bool operator==(const LengthRange&, const LengthRange&) = default;
};

/// Converts a length range given in seconds to samples (rounded to nearest).
LengthRange length_range_from_seconds(double min_s, double max_s, double step_s,
                                      double sample_rate_hz);

struct SweepOptions {
  double epsilon = kDefaultEpsilon;
  /// Windows farther than this end the sweep without counting as a false
  /// positive. The default (+inf) walks the full nearest-neighbor order;
  /// a tiny radius restricts matches to exact recurrences.
  double match_radius = std::numeric_limits<double>::infinity();
};

/// Outcome of the nearest-neighbor sweep of one candidate query.
struct CandidateScore {
  std::size_t query_position = 0;
  std::size_t length = 0;
  std::size_t true_positives = 0;
  /// 1 when the sweep met a non-target window that no threshold can separate
  /// from the accepted matches (no TP before it, or a distance tie).
  std::size_t false_positives = 0;
  /// Distance of the worst accepted true positive.
  double threshold_distance = 0.0;
  /// Distance and position of the non-target window that ended the sweep;
  /// +inf / npos when the sweep ran out of windows or left the match radius.
  double stop_distance = std::numeric_limits<double>::infinity();
  std::size_t stop_position = npos;
  std::vector<std::size_t> matched_positions;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool eligible() const { return false_positives == 0 && true_positives >= 1; }
};

/// How a sweep's outcome becomes a matching threshold (used with strict <).
///  - LastTruePositive: just above the worst accepted match.
///  - Midpoint: halfway between that match and the window that ended the sweep.
///  - FirstFalsePositive: the distance of the window that ended the sweep.
/// Every rule falls back to LastTruePositive when nothing ended the sweep.
enum class ThresholdRule { LastTruePositive, Midpoint, FirstFalsePositive };

std::string_view threshold_rule_name(ThresholdRule rule);
/// Accepts "last-tp", "midpoint", "first-fp".
ThresholdRule parse_threshold_rule(std::string_view name);

/// Threshold admitting every accepted match of `score` under strict <.
double template_threshold(const CandidateScore& score,
                          ThresholdRule rule = ThresholdRule::Midpoint);

/// Per-axis part of a query-template.
struct AxisTemplate {
  Axis axis = Axis::X;
  std::vector<double> values;
  double threshold = 0.0;
  std::size_t training_true_positives = 0;

  friend bool operator==(const AxisTemplate&, const AxisTemplate&) = default;
};

struct QueryTemplate {
  std::string behavior_class;
  Axis anchor_axis = Axis::X;
  /// Sorted by axis; every entry has `length` values.
  std::vector<AxisTemplate> axes;
  std::size_t length = 0;
  std::size_t source_position = 0;

  const AxisTemplate& axis(Axis a) const;
  const AxisTemplate& anchor() const { return axis(anchor_axis); }
  std::vector<Axis> axis_ids() const;

  friend bool operator==(const QueryTemplate&, const QueryTemplate&) = default;
};

/// Checks lengths, thresholds and class name; throws DomainError otherwise.
void validate(const QueryTemplate& tmpl);

struct ClassBuildInfo {
  std::string behavior_class;
  std::vector<Axis> axes;
  Axis anchor_axis = Axis::X;
  LengthRange lengths;
  std::size_t candidates_scored = 0;
  /// Empty on success; the failure reason for partial dictionaries.
  std::string error;

  friend bool operator==(const ClassBuildInfo&, const ClassBuildInfo&) = default;
};

struct BuildMetadata {
  std::string training_source;
  std::size_t training_length = 0;
  std::uint64_t training_digest = 0;
  double sample_rate_hz = kDefaultSampleRate;
  std::size_t stride = 1;
  double epsilon = kDefaultEpsilon;
  ThresholdRule threshold_rule = ThresholdRule::Midpoint;
  std::vector<ClassBuildInfo> classes;

  friend bool operator==(const BuildMetadata&, const BuildMetadata&) = default;
};

struct Dictionary {
  std::vector<QueryTemplate> templates;
  BuildMetadata metadata;

  const QueryTemplate* find(std::string_view behavior_class) const;
  /// Adds or replaces the template of tmpl.behavior_class.
  void upsert(QueryTemplate tmpl);
  std::size_t max_length() const;

  friend bool operator==(const Dictionary&, const Dictionary&) = default;
};

/// FNV-1a over the bit patterns of every axis, in axis order.
std::uint64_t series_digest(const MultiAxisSeries& series);

/// Nearest-neighbor sweep against a prepared engine. `positive` flags the
/// window starts that lie inside target-class intervals; its length must be
/// at least the number of windows.
CandidateScore nn_sweep(const ProfileEngine& engine, std::span<const double> query,
                        std::span<const unsigned char> positive, const SweepOptions& options = {});

CandidateScore nn_sweep(const TimeSeries& series, std::span<const double> query,
                        std::span<const LabelInterval> labels, std::string_view target_class,
                        const SweepOptions& options = {});

struct EnumerateOptions {
  Axis axis = Axis::X;
  /// Step between candidate start positions inside each interval.
  std::size_t stride = 1;
  unsigned threads = 0;
  SweepOptions sweep;
};

/// Scores every window that fits inside a target-class interval, for every
/// length in the range. Flat windows are skipped. Output order: length, then
/// interval, then start position.
std::vector<CandidateScore> enumerate_candidates(const MultiAxisSeries& series,
                                                 std::span<const LabelInterval> labels,
                                                 std::string_view target_class,
                                                 const LengthRange& lengths,
                                                 const EnumerateOptions& options = {});

/// Best eligible candidate: most TPs, then longest, then smallest threshold,
/// then smallest position. Throws NoConservedTemplate if none is eligible.
const CandidateScore& best_candidate(std::span<const CandidateScore> candidates,
                                     std::string_view target_class);

/// Single-axis template from the best candidate, values taken from `series`.
QueryTemplate select_template(std::span<const CandidateScore> candidates, const TimeSeries& series,
                              Axis axis, std::string_view target_class,
                              ThresholdRule rule = ThresholdRule::Midpoint);

struct ClassConfig {
  std::string behavior_class;
  std::vector<Axis> axes;
  Axis anchor_axis = Axis::X;
  LengthRange lengths;
};

struct BuildOptions {
  std::size_t stride = 1;
  unsigned threads = 0;
  /// Return a dictionary missing failed classes (reasons in metadata)
  /// instead of throwing.
  bool allow_partial = false;
  ThresholdRule threshold_rule = ThresholdRule::Midpoint;
  SweepOptions sweep;
  std::string training_source;
};

Dictionary build_dictionary(const MultiAxisSeries& series, std::span<const LabelInterval> labels,
                            std::span<const ClassConfig> classes, const BuildOptions& options = {});

}  // namespace tsdict
