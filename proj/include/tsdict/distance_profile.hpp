#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "tsdict/parallel.hpp"
#include "tsdict/series.hpp"

namespace tsdict {

/// Z-normalized Euclidean distance of one query against every window of a
/// series. Entry i covers values[i, i + query_length). Flat windows are +inf.
struct DistanceProfile {
  std::vector<double> distances;
  std::size_t query_length = 0;
  std::size_t source_length = 0;
};

struct ExclusionZone {
  std::size_t center = 0;
  std::size_t half_width = 0;
};

/// Direct per-window evaluation. Reference for fast_profile.
DistanceProfile naive_profile(std::span<const double> series, std::span<const double> query,
                              double epsilon = kDefaultEpsilon);

/// FFT sliding dot product combined with sliding window statistics.
DistanceProfile fast_profile(std::span<const double> series, std::span<const double> query,
                             double epsilon = kDefaultEpsilon);

DistanceProfile apply_exclusion(DistanceProfile profile, const ExclusionZone& zone);

/// In-place form of apply_exclusion over a bare distance vector.
void mask_exclusion(std::span<double> distances, const ExclusionZone& zone);

/// Absolute slack within which an FFT distance may differ from the direct
/// distance of the same window. Used to screen with fast profiles before
/// confirming with window_distance.
double screening_margin(double distance);

namespace detail {
class SeriesSpectrum;
}

/// Holds one series' spectrum and sliding statistics so that many queries
/// can be profiled against it. const member functions are thread-safe.
class ProfileEngine {
 public:
  explicit ProfileEngine(std::span<const double> series, double epsilon = kDefaultEpsilon);
  ~ProfileEngine();
  ProfileEngine(const ProfileEngine&) = delete;
  ProfileEngine& operator=(const ProfileEngine&) = delete;

  std::span<const double> series() const { return series_; }
  double epsilon() const { return epsilon_; }

  DistanceProfile profile(std::span<const double> query) const;

  /// Same results as calling profile() on each query in turn.
  std::vector<DistanceProfile> profile_batch(std::span<const std::vector<double>> queries,
                                             unsigned threads = 0) const;

  /// Sliding statistics for window length m, computed once and cached.
  std::shared_ptr<const WindowStats> stats(std::size_t m) const;

 private:
  std::span<const double> series_;
  double epsilon_;
  std::unique_ptr<detail::SeriesSpectrum> spectrum_;
  mutable std::mutex stats_mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const WindowStats>> stats_cache_;
};

}  // namespace tsdict
