#include "tsdict/dictionary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <sstream>
#include <tuple>
#include <utility>

namespace tsdict {

namespace {

using Entry = std::pair<double, std::size_t>;
using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

std::vector<LabelInterval> intervals_of(std::span<const LabelInterval> labels,
                                        std::string_view target_class) {
  std::vector<LabelInterval> out;
  for (const auto& l : labels) {
    if (l.behavior_class == target_class) out.push_back(l);
  }
  return out;
}

}  // namespace

NoConservedTemplate::NoConservedTemplate(const std::string& behavior_class)
    : DomainError("no conserved template for class '" + behavior_class +
                  "': no candidate reached TP >= 1 with FP = 0"),
      class_(behavior_class) {}

LengthRange length_range_from_seconds(double min_s, double max_s, double step_s,
                                      double sample_rate_hz) {
  if (!(min_s > 0.0) || !(max_s >= min_s) || !(step_s >= 0.0)) {
    throw DomainError("length range needs 0 < min <= max and step >= 0 (seconds)");
  }
  auto to_samples = [&](double s) {
    return static_cast<std::size_t>(std::llround(s * sample_rate_hz));
  };
  return LengthRange{to_samples(min_s), to_samples(max_s), std::max<std::size_t>(1, to_samples(step_s))};
}

std::string_view threshold_rule_name(ThresholdRule rule) {
  switch (rule) {
    case ThresholdRule::LastTruePositive:
      return "last-tp";
    case ThresholdRule::Midpoint:
      return "midpoint";
    case ThresholdRule::FirstFalsePositive:
      return "first-fp";
  }
  return "midpoint";
}

ThresholdRule parse_threshold_rule(std::string_view name) {
  for (auto r : {ThresholdRule::LastTruePositive, ThresholdRule::Midpoint, ThresholdRule::FirstFalsePositive}) {
    if (threshold_rule_name(r) == name) return r;
  }
  throw DomainError("unknown threshold rule '" + std::string(name) + "' (last-tp, midpoint, first-fp)");
}

double template_threshold(const CandidateScore& score, ThresholdRule rule) {
  const double above = std::nextafter(score.threshold_distance, std::numeric_limits<double>::infinity());
  if (rule == ThresholdRule::LastTruePositive || !std::isfinite(score.stop_distance) ||
      !(score.stop_distance > score.threshold_distance)) {
    return above;
  }
  if (rule == ThresholdRule::FirstFalsePositive) return score.stop_distance;
  const double mid = score.threshold_distance + 0.5 * (score.stop_distance - score.threshold_distance);
  return std::min(std::max(mid, above), score.stop_distance);
}

const AxisTemplate& QueryTemplate::axis(Axis a) const {
  for (const auto& t : axes) {
    if (t.axis == a) return t;
  }
  throw DomainError("template '" + behavior_class + "' has no " + std::string(axis_name(a)) +
                    " axis");
}

std::vector<Axis> QueryTemplate::axis_ids() const {
  std::vector<Axis> ids;
  for (const auto& t : axes) ids.push_back(t.axis);
  return ids;
}

void validate(const QueryTemplate& tmpl) {
  if (tmpl.behavior_class.empty()) throw DomainError("template with empty class name");
  if (tmpl.axes.empty()) throw DomainError("template '" + tmpl.behavior_class + "' has no axes");
  if (tmpl.length < kMinSubsequenceLength) {
    throw DomainError("template '" + tmpl.behavior_class + "' is shorter than the minimum length");
  }
  bool anchor_found = false;
  for (std::size_t i = 0; i < tmpl.axes.size(); ++i) {
    const auto& a = tmpl.axes[i];
    if (i > 0 && !(tmpl.axes[i - 1].axis < a.axis)) {
      throw DomainError("template '" + tmpl.behavior_class + "' axes must be unique and sorted");
    }
    if (a.values.size() != tmpl.length) {
      throw DomainError("template '" + tmpl.behavior_class + "' axis " +
                        std::string(axis_name(a.axis)) + " has the wrong length");
    }
    if (!(a.threshold > 0.0) || !std::isfinite(a.threshold)) {
      throw DomainError("template '" + tmpl.behavior_class + "' axis " +
                        std::string(axis_name(a.axis)) + " needs a positive finite threshold");
    }
    anchor_found = anchor_found || a.axis == tmpl.anchor_axis;
  }
  if (!anchor_found) {
    throw DomainError("template '" + tmpl.behavior_class + "' lacks its anchor axis");
  }
}

const QueryTemplate* Dictionary::find(std::string_view behavior_class) const {
  for (const auto& t : templates) {
    if (t.behavior_class == behavior_class) return &t;
  }
  return nullptr;
}

void Dictionary::upsert(QueryTemplate tmpl) {
  for (auto& t : templates) {
    if (t.behavior_class == tmpl.behavior_class) {
      t = std::move(tmpl);
      return;
    }
  }
  templates.push_back(std::move(tmpl));
}

std::size_t Dictionary::max_length() const {
  std::size_t m = 0;
  for (const auto& t : templates) m = std::max(m, t.length);
  return m;
}

std::uint64_t series_digest(const MultiAxisSeries& series) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [axis, ts] : series.axes()) {
    mix(static_cast<std::uint64_t>(axis));
    for (double v : ts.values()) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

CandidateScore nn_sweep(const ProfileEngine& engine, std::span<const double> query,
                        std::span<const unsigned char> positive, const SweepOptions& options) {
  const auto profile = engine.profile(query);
  const auto zq = z_normalize(query, options.epsilon);
  const std::size_t m = query.size();
  const std::size_t count = profile.distances.size();
  if (positive.size() < count) throw DomainError("nn_sweep: label mask shorter than profile");
  const auto series = engine.series();

  // Candidates are ordered by the FFT distance, then confirmed with the
  // direct distance; the walk itself follows ascending (direct, index).
  std::vector<Entry> entries;
  entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (std::isfinite(profile.distances[i])) entries.emplace_back(profile.distances[i], i);
  }
  MinHeap screened(std::greater<>{}, std::move(entries));
  // (direct distance, 0 for target windows, index): exact ties visit target
  // windows first, so a tied non-target window still ends the sweep as FP.
  using Pending = std::tuple<double, int, std::size_t>;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending;
  std::vector<unsigned char> excluded(count, 0);

  CandidateScore score;
  score.length = m;
  const std::size_t half = exclusion_half_width(m);
  bool stopped_on_negative = false;

  for (;;) {
    while (!screened.empty() &&
           (pending.empty() ||
            screened.top().first <=
                std::get<0>(pending.top()) + screening_margin(std::get<0>(pending.top())))) {
      const std::size_t i = screened.top().second;
      screened.pop();
      if (excluded[i]) continue;
      const double d = window_distance(zq, series.subspan(i, m), options.epsilon);
      if (std::isfinite(d)) pending.emplace(d, positive[i] ? 0 : 1, i);
    }
    if (pending.empty()) break;
    const auto [d, negative, i] = pending.top();
    pending.pop();
    if (excluded[i]) continue;
    if (d > options.match_radius) break;
    if (negative) {
      score.stop_distance = d;
      score.stop_position = i;
      stopped_on_negative = true;
      break;
    }
    ++score.true_positives;
    score.threshold_distance = d;
    score.matched_positions.push_back(i);
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(count - 1, i + half);
    std::fill(excluded.begin() + static_cast<std::ptrdiff_t>(lo),
              excluded.begin() + static_cast<std::ptrdiff_t>(hi) + 1, 1);
  }

  if (stopped_on_negative &&
      (score.true_positives == 0 || score.stop_distance <= score.threshold_distance)) {
    score.false_positives = 1;
  }
  return score;
}

CandidateScore nn_sweep(const TimeSeries& series, std::span<const double> query,
                        std::span<const LabelInterval> labels, std::string_view target_class,
                        const SweepOptions& options) {
  if (labels.empty()) throw DomainError("nn_sweep: no label intervals given");
  const auto normalized = normalize_labels({labels.begin(), labels.end()});
  const ProfileEngine engine(series.values(), options.epsilon);
  const auto mask = class_mask(normalized, target_class, series.size());
  return nn_sweep(engine, query, mask, options);
}

std::vector<CandidateScore> enumerate_candidates(const MultiAxisSeries& series,
                                                 std::span<const LabelInterval> labels,
                                                 std::string_view target_class,
                                                 const LengthRange& lengths,
                                                 const EnumerateOptions& options) {
  if (labels.empty()) throw DomainError("enumerate_candidates: no label intervals given");
  if (options.stride == 0 || lengths.step == 0) {
    throw DomainError("enumerate_candidates: stride and length step must be >= 1");
  }
  const auto normalized = normalize_labels({labels.begin(), labels.end()});
  const auto regions = intervals_of(normalized, target_class);
  if (regions.empty()) {
    throw DomainError("class '" + std::string(target_class) + "' has no labeled interval");
  }
  std::size_t shortest = regions.front().width();
  for (const auto& r : regions) shortest = std::min(shortest, r.width());

  const std::size_t min_m = std::max(lengths.min_length, kMinSubsequenceLength);
  const std::size_t max_m = std::min(lengths.max_length, shortest);
  if (min_m > max_m) {
    std::ostringstream msg;
    msg << "empty length range for class '" << target_class << "': requested ["
        << lengths.min_length << ", " << lengths.max_length << "] samples, minimum length is "
        << kMinSubsequenceLength << " and the shortest labeled interval spans " << shortest
        << " samples";
    throw DomainError(msg.str());
  }

  const TimeSeries& ts = series.axis(options.axis);
  const ProfileEngine engine(ts.values(), options.sweep.epsilon);
  const auto mask = class_mask(normalized, target_class, ts.size());

  std::vector<CandidateScore> out;
  for (std::size_t m = min_m; m <= max_m; m += lengths.step) {
    const auto stats = engine.stats(m);
    for (const auto& r : regions) {
      for (std::size_t q = r.start_index; q + m - 1 <= r.end_index; q += options.stride) {
        if (stats->stds[q] < options.sweep.epsilon) continue;
        CandidateScore c;
        c.query_position = q;
        c.length = m;
        out.push_back(std::move(c));
      }
    }
  }

  parallel_for(out.size(), options.threads, [&](std::size_t k) {
    auto& c = out[k];
    const std::size_t q = c.query_position;
    c = nn_sweep(engine, ts.window(q, c.length), mask, options.sweep);
    c.query_position = q;
  });
  return out;
}

const CandidateScore& best_candidate(std::span<const CandidateScore> candidates,
                                     std::string_view target_class) {
  const CandidateScore* best = nullptr;
  auto better = [](const CandidateScore& a, const CandidateScore& b) {
    if (a.true_positives != b.true_positives) return a.true_positives > b.true_positives;
    if (a.length != b.length) return a.length > b.length;
    if (a.threshold_distance != b.threshold_distance) {
      return a.threshold_distance < b.threshold_distance;
    }
    return a.query_position < b.query_position;
  };
  for (const auto& c : candidates) {
    if (!c.eligible()) continue;
    if (best == nullptr || better(c, *best)) best = &c;
  }
  if (best == nullptr) throw NoConservedTemplate(std::string(target_class));
  return *best;
}

QueryTemplate select_template(std::span<const CandidateScore> candidates, const TimeSeries& series,
                              Axis axis, std::string_view target_class, ThresholdRule rule) {
  if (candidates.empty()) throw DomainError("select_template: no candidates");
  const auto& best = best_candidate(candidates, target_class);
  const auto values = series.window(best.query_position, best.length);
  QueryTemplate t;
  t.behavior_class = std::string(target_class);
  t.anchor_axis = axis;
  t.length = best.length;
  t.source_position = best.query_position;
  t.axes.push_back(AxisTemplate{axis, {values.begin(), values.end()}, template_threshold(best, rule),
                                best.true_positives});
  return t;
}

namespace {

QueryTemplate build_class(const MultiAxisSeries& series, std::span<const LabelInterval> labels,
                          const ClassConfig& config, const BuildOptions& options,
                          std::size_t& candidates_scored) {
  if (std::find(config.axes.begin(), config.axes.end(), config.anchor_axis) ==
      config.axes.end()) {
    throw DomainError("class '" + config.behavior_class + "': anchor axis " +
                      std::string(axis_name(config.anchor_axis)) + " is not among its axes");
  }
  for (Axis a : config.axes) series.axis(a);

  EnumerateOptions enum_opts;
  enum_opts.axis = config.anchor_axis;
  enum_opts.stride = options.stride;
  enum_opts.threads = options.threads;
  enum_opts.sweep = options.sweep;
  const auto candidates =
      enumerate_candidates(series, labels, config.behavior_class, config.lengths, enum_opts);
  candidates_scored = candidates.size();

  QueryTemplate tmpl = select_template(candidates, series.axis(config.anchor_axis),
                                       config.anchor_axis, config.behavior_class,
                                       options.threshold_rule);
  const auto mask = class_mask(labels, config.behavior_class, series.size());
  for (Axis a : config.axes) {
    if (a == config.anchor_axis) continue;
    const TimeSeries& ts = series.axis(a);
    const auto window = ts.window(tmpl.source_position, tmpl.length);
    const ProfileEngine engine(ts.values(), options.sweep.epsilon);
    CandidateScore score;
    try {
      score = nn_sweep(engine, window, mask, options.sweep);
    } catch (const DomainError& e) {
      throw DomainError("class '" + config.behavior_class + "' axis " +
                        std::string(axis_name(a)) + ": " + e.what());
    }
    if (!score.eligible()) {
      throw DomainError("class '" + config.behavior_class + "' axis " +
                        std::string(axis_name(a)) +
                        ": window at the anchor position cannot be separated from non-target data");
    }
    tmpl.axes.push_back(AxisTemplate{a, {window.begin(), window.end()},
                                     template_threshold(score, options.threshold_rule),
                                     score.true_positives});
  }
  std::sort(tmpl.axes.begin(), tmpl.axes.end(),
            [](const AxisTemplate& x, const AxisTemplate& y) { return x.axis < y.axis; });
  validate(tmpl);
  return tmpl;
}

}  // namespace

Dictionary build_dictionary(const MultiAxisSeries& series, std::span<const LabelInterval> labels,
                            std::span<const ClassConfig> classes, const BuildOptions& options) {
  const auto normalized = normalize_labels({labels.begin(), labels.end()});
  Dictionary dict;
  dict.metadata.training_source = options.training_source;
  dict.metadata.training_length = series.size();
  dict.metadata.training_digest = series_digest(series);
  dict.metadata.sample_rate_hz = series.sample_rate_hz();
  dict.metadata.stride = options.stride;
  dict.metadata.epsilon = options.sweep.epsilon;
  dict.metadata.threshold_rule = options.threshold_rule;

  for (const auto& config : classes) {
    ClassBuildInfo info{config.behavior_class, config.axes, config.anchor_axis, config.lengths, 0,
                        {}};
    std::sort(info.axes.begin(), info.axes.end());
    if (dict.find(config.behavior_class) != nullptr) {
      throw DomainError("class '" + config.behavior_class + "' configured twice");
    }
    try {
      dict.templates.push_back(
          build_class(series, normalized, config, options, info.candidates_scored));
    } catch (const DomainError& e) {
      if (!options.allow_partial) throw;
      info.error = e.what();
    }
    dict.metadata.classes.push_back(std::move(info));
  }
  return dict;
}

}  // namespace tsdict
