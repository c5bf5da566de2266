#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tsdict/dictionary.hpp"
#include "tsdict/series.hpp"

namespace tsdict {

/// One detection of a template in a stream.
struct MatchEvent {
  std::string behavior_class;
  std::size_t start_index = 0;
  double start_time_s = 0.0;
  std::size_t length = 0;
  std::map<Axis, double> per_axis_distance;

  friend bool operator==(const MatchEvent&, const MatchEvent&) = default;
};

struct MatchOptions {
  double epsilon = kDefaultEpsilon;
  /// Workers for per-template profile computation (0 = hardware concurrency).
  unsigned threads = 0;
};

/// Every template is profiled over the whole stream. A position matches when
/// each template axis is strictly below its threshold; matches are reduced
/// greedily in ascending anchor distance with a +-ceil(m/2) exclusion per
/// class. Output is sorted by (start_index, class).
std::vector<MatchEvent> match_stream(const MultiAxisSeries& stream, const Dictionary& dict,
                                     const MatchOptions& options = {});

/// Same result as match_stream, computed over chunks of `chunk` samples that
/// overlap by `overlap` samples.
std::vector<MatchEvent> match_windowed(const MultiAxisSeries& stream, const Dictionary& dict,
                                       std::size_t chunk, std::size_t overlap,
                                       const MatchOptions& options = {});

/// Smallest overlap accepted by match_windowed for this dictionary.
std::size_t minimum_overlap(const Dictionary& dict);

}  // namespace tsdict
