#include "tsdict/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "tsdict/distance_profile.hpp"
#include "tsdict/parallel.hpp"

namespace tsdict {

namespace {

struct RawMatch {
  std::size_t start;
  double anchor_distance;
  std::vector<double> distances;  // parallel to the template's axes
};

void check_stream(const MultiAxisSeries& stream, const Dictionary& dict) {
  for (const auto& t : dict.templates) {
    validate(t);
    for (const auto& a : t.axes) {
      if (!stream.has(a.axis)) {
        throw DomainError("template '" + t.behavior_class + "' requires axis " +
                          std::string(axis_name(a.axis)) + ", which the stream lacks");
      }
    }
    if (stream.size() < t.length) {
      throw DomainError("stream of " + std::to_string(stream.size()) +
                        " samples is shorter than template '" + t.behavior_class + "' (" +
                        std::to_string(t.length) + ")");
    }
  }
}

// Raw matches of one template among window starts in [begin, end - m].
void collect_raw(const MultiAxisSeries& stream, const QueryTemplate& tmpl, std::size_t begin,
                 std::size_t end, double epsilon, std::vector<RawMatch>& out) {
  const std::size_t m = tmpl.length;
  if (end - begin < m) return;
  const AxisTemplate& anchor = tmpl.anchor();
  const auto anchor_values = stream.axis(tmpl.anchor_axis).values().subspan(begin, end - begin);
  const ProfileEngine engine(anchor_values, epsilon);
  const auto profile = engine.profile(anchor.values);
  const double screen = anchor.threshold + screening_margin(anchor.threshold);

  std::vector<std::vector<double>> normalized;
  for (const auto& a : tmpl.axes) normalized.push_back(z_normalize(a.values, epsilon));

  for (std::size_t p = 0; p < profile.distances.size(); ++p) {
    if (!(profile.distances[p] < screen)) continue;
    const std::size_t start = begin + p;
    RawMatch raw{start, 0.0, {}};
    bool ok = true;
    for (std::size_t k = 0; k < tmpl.axes.size() && ok; ++k) {
      const auto window = stream.axis(tmpl.axes[k].axis).values().subspan(start, m);
      const double d = window_distance(normalized[k], window, epsilon);
      ok = d < tmpl.axes[k].threshold;
      raw.distances.push_back(d);
      if (tmpl.axes[k].axis == tmpl.anchor_axis) raw.anchor_distance = d;
    }
    if (ok) out.push_back(std::move(raw));
  }
}

std::vector<MatchEvent> reduce(const Dictionary& dict, std::vector<std::vector<RawMatch>>& raw,
                               double sample_rate_hz) {
  std::vector<MatchEvent> events;
  for (std::size_t t = 0; t < dict.templates.size(); ++t) {
    const auto& tmpl = dict.templates[t];
    auto& matches = raw[t];
    std::sort(matches.begin(), matches.end(), [](const RawMatch& a, const RawMatch& b) {
      return std::tie(a.anchor_distance, a.start) < std::tie(b.anchor_distance, b.start);
    });
    const std::size_t half = exclusion_half_width(tmpl.length);
    std::set<std::size_t> accepted;
    for (const auto& r : matches) {
      const std::size_t lo = r.start > half ? r.start - half : 0;
      const auto it = accepted.lower_bound(lo);
      if (it != accepted.end() && *it <= r.start + half) continue;
      accepted.insert(r.start);
      MatchEvent e;
      e.behavior_class = tmpl.behavior_class;
      e.start_index = r.start;
      e.start_time_s = static_cast<double>(r.start) / sample_rate_hz;
      e.length = tmpl.length;
      for (std::size_t k = 0; k < tmpl.axes.size(); ++k) {
        e.per_axis_distance[tmpl.axes[k].axis] = r.distances[k];
      }
      events.push_back(std::move(e));
    }
  }
  std::sort(events.begin(), events.end(), [](const MatchEvent& a, const MatchEvent& b) {
    return std::tie(a.start_index, a.behavior_class) < std::tie(b.start_index, b.behavior_class);
  });
  return events;
}

}  // namespace

std::size_t minimum_overlap(const Dictionary& dict) {
  const std::size_t m = dict.max_length();
  return m + exclusion_half_width(m);
}

std::vector<MatchEvent> match_stream(const MultiAxisSeries& stream, const Dictionary& dict,
                                     const MatchOptions& options) {
  check_stream(stream, dict);
  std::vector<std::vector<RawMatch>> raw(dict.templates.size());
  parallel_for(dict.templates.size(), options.threads, [&](std::size_t t) {
    collect_raw(stream, dict.templates[t], 0, stream.size(), options.epsilon, raw[t]);
  });
  return reduce(dict, raw, stream.sample_rate_hz());
}

std::vector<MatchEvent> match_windowed(const MultiAxisSeries& stream, const Dictionary& dict,
                                       std::size_t chunk, std::size_t overlap,
                                       const MatchOptions& options) {
  check_stream(stream, dict);
  if (overlap < minimum_overlap(dict)) {
    throw DomainError("overlap of " + std::to_string(overlap) +
                      " samples is too small; need at least " +
                      std::to_string(minimum_overlap(dict)));
  }
  if (chunk <= 2 * overlap) {
    throw DomainError("chunk of " + std::to_string(chunk) +
                      " samples must exceed twice the overlap (" + std::to_string(overlap) + ")");
  }
  const std::size_t n = stream.size();
  std::vector<std::vector<RawMatch>> raw(dict.templates.size());
  for (std::size_t begin = 0;; begin += chunk - overlap) {
    const std::size_t end = std::min(n, begin + chunk);
    parallel_for(dict.templates.size(), options.threads, [&](std::size_t t) {
      collect_raw(stream, dict.templates[t], begin, end, options.epsilon, raw[t]);
    });
    if (end == n) break;
  }
  // Windows inside an overlap are scored by both chunks with identical
  // direct distances; keep one copy.
  for (auto& matches : raw) {
    std::sort(matches.begin(), matches.end(),
              [](const RawMatch& a, const RawMatch& b) { return a.start < b.start; });
    matches.erase(std::unique(matches.begin(), matches.end(),
                              [](const RawMatch& a, const RawMatch& b) { return a.start == b.start; }),
                  matches.end());
  }
  return reduce(dict, raw, stream.sample_rate_hz());
}

}  // namespace tsdict
