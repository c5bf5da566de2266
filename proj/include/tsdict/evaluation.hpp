#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsdict/matcher.hpp"
#include "tsdict/series.hpp"

namespace tsdict {

/// A weakly labeled interval scored as one unit.
struct Bag {
  LabelInterval interval;
  const std::string& bag_class() const { return interval.behavior_class; }
};

/// One bag per interval, sorted by start. Overlapping intervals (of any
/// class) are rejected.
std::vector<Bag> make_bags(std::span<const LabelInterval> labels);

struct ConfusionMatrix {
  std::string target_class;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t total_bags = 0;
  /// Target-class events that start outside every bag. Not part of the
  /// matrix.
  std::size_t out_of_bag_matches = 0;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Bag-level scoring: a target bag is TP when at least one target-class
/// event starts inside it, else FN; any other bag is FP when a target-class
/// event starts inside it, else TN.
ConfusionMatrix mil_score(std::span<const MatchEvent> events, std::span<const Bag> bags,
                          std::string_view target_class);

/// Undefined ratios (zero denominators) are empty.
struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> accuracy;
  /// Accuracy of always predicting the majority bag class.
  std::optional<double> default_rate;
};

Metrics metrics(const ConfusionMatrix& cm);

struct FrequencyProfile {
  double t0_s = 0.0;
  double t1_s = 0.0;
  double window_length_s = 3600.0;
  double stride_s = 3600.0;
  std::vector<double> window_starts_s;
  std::vector<std::string> classes;
  /// counts[w][c]: events of classes[c] starting in window w.
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total(std::size_t class_index) const;
};

/// Windows start at t0 + k * stride for every k with start < t1; an event
/// counts in a window when its start time lies in [start, start + length)
/// and in [t0, t1). Classes are those present in `events`, sorted, plus any
/// listed in `classes`.
FrequencyProfile frequency_profile(std::span<const MatchEvent> events, double t0_s, double t1_s,
                                   double window_length_s, double stride_s,
                                   std::span<const std::string> classes = {});

}  // namespace tsdict
