#include "tsdict/distance_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"

namespace tsdict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> checked_normalized_query(std::size_t n, std::span<const double> query,
                                             double epsilon) {
  const std::size_t m = query.size();
  if (m < kMinSubsequenceLength) {
    throw DomainError("query length " + std::to_string(m) + " is below the minimum of " +
                      std::to_string(kMinSubsequenceLength));
  }
  if (m > n) {
    throw DomainError("query length " + std::to_string(m) + " exceeds series length " +
                      std::to_string(n));
  }
  const auto stats = sliding_mean_std(query, m);
  if (stats.stds[0] < epsilon) throw DomainError("flat query: standard deviation below epsilon");
  return z_normalize(query, epsilon);
}

}  // namespace

DistanceProfile naive_profile(std::span<const double> series, std::span<const double> query,
                              double epsilon) {
  const auto zq = checked_normalized_query(series.size(), query, epsilon);
  const std::size_t m = query.size();
  DistanceProfile out{std::vector<double>(series.size() - m + 1), m, series.size()};
  for (std::size_t i = 0; i < out.distances.size(); ++i) {
    out.distances[i] = window_distance(zq, series.subspan(i, m), epsilon);
  }
  return out;
}

DistanceProfile fast_profile(std::span<const double> series, std::span<const double> query,
                             double epsilon) {
  return ProfileEngine(series, epsilon).profile(query);
}

void mask_exclusion(std::span<double> distances, const ExclusionZone& zone) {
  if (distances.empty()) return;
  const std::size_t lo = zone.center > zone.half_width ? zone.center - zone.half_width : 0;
  const std::size_t hi = std::min(distances.size() - 1, zone.center + zone.half_width);
  for (std::size_t i = lo; i <= hi; ++i) distances[i] = kInf;
}

DistanceProfile apply_exclusion(DistanceProfile profile, const ExclusionZone& zone) {
  mask_exclusion(profile.distances, zone);
  return profile;
}

double screening_margin(double distance) { return 1e-4 + 1e-6 * distance; }

ProfileEngine::ProfileEngine(std::span<const double> series, double epsilon)
    : series_(series), epsilon_(epsilon) {
  if (series.empty()) throw DomainError("cannot profile against an empty series");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  spectrum_ = std::make_unique<detail::SeriesSpectrum>(series);
}

ProfileEngine::~ProfileEngine() = default;

std::shared_ptr<const WindowStats> ProfileEngine::stats(std::size_t m) const {
  {
    std::lock_guard lock(stats_mutex_);
    const auto it = stats_cache_.find(m);
    if (it != stats_cache_.end()) return it->second;
  }
  auto computed = std::make_shared<const WindowStats>(sliding_mean_std(series_, m));
  std::lock_guard lock(stats_mutex_);
  return stats_cache_.emplace(m, std::move(computed)).first->second;
}

DistanceProfile ProfileEngine::profile(std::span<const double> query) const {
  const auto zq = checked_normalized_query(series_.size(), query, epsilon_);
  const std::size_t m = query.size();
  const auto window_stats = stats(m);
  const auto dots = spectrum_->sliding_dot(zq);

  // z(Q) has zero mean, so the window mean drops out of the correlation.
  const double md = static_cast<double>(m);
  DistanceProfile out{std::vector<double>(dots.size()), m, series_.size()};
  for (std::size_t i = 0; i < dots.size(); ++i) {
    const double sd = window_stats->stds[i];
    if (sd < epsilon_) {
      out.distances[i] = kInf;
      continue;
    }
    const double corr = dots[i] / (md * sd);
    out.distances[i] = std::sqrt(std::max(0.0, 2.0 * md * (1.0 - corr)));
  }
  return out;
}

std::vector<DistanceProfile> ProfileEngine::profile_batch(
    std::span<const std::vector<double>> queries, unsigned threads) const {
  std::vector<DistanceProfile> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = profile(queries[i]); });
  return out;
}

}  // namespace tsdict
