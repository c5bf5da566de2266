#include "tsdict/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

namespace tsdict {

std::vector<Bag> make_bags(std::span<const LabelInterval> labels) {
  std::vector<Bag> bags;
  for (const auto& l : normalize_labels({labels.begin(), labels.end()})) {
    bags.push_back(Bag{l});
  }
  for (std::size_t i = 1; i < bags.size(); ++i) {
    if (bags[i].interval.start_index <= bags[i - 1].interval.end_index) {
      throw DomainError("bags overlap: '" + bags[i - 1].bag_class() + "' ending at " +
                        std::to_string(bags[i - 1].interval.end_index) + " and '" +
                        bags[i].bag_class() + "' starting at " +
                        std::to_string(bags[i].interval.start_index));
    }
  }
  return bags;
}

ConfusionMatrix mil_score(std::span<const MatchEvent> events, std::span<const Bag> bags,
                          std::string_view target_class) {
  for (std::size_t i = 1; i < bags.size(); ++i) {
    if (bags[i].interval.start_index <= bags[i - 1].interval.end_index) {
      throw DomainError("mil_score: bags must be sorted and non-overlapping");
    }
  }
  std::vector<unsigned char> hit(bags.size(), 0);
  ConfusionMatrix cm;
  cm.target_class = std::string(target_class);
  cm.total_bags = bags.size();
  for (const auto& e : events) {
    if (e.behavior_class != target_class) continue;
    const auto it = std::upper_bound(
        bags.begin(), bags.end(), e.start_index,
        [](std::size_t s, const Bag& b) { return s < b.interval.start_index; });
    if (it != bags.begin() && std::prev(it)->interval.contains(e.start_index)) {
      hit[static_cast<std::size_t>(std::prev(it) - bags.begin())] = 1;
    } else {
      ++cm.out_of_bag_matches;
    }
  }
  for (std::size_t i = 0; i < bags.size(); ++i) {
    const bool target = bags[i].bag_class() == target_class;
    if (target) {
      hit[i] ? ++cm.tp : ++cm.fn;
    } else {
      hit[i] ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  const std::size_t total = cm.tp + cm.fp + cm.fn + cm.tn;
  const std::size_t target_bags = cm.tp + cm.fn;
  const std::size_t other_bags = cm.fp + cm.tn;
  return Metrics{ratio(cm.tp, cm.tp + cm.fp), ratio(cm.tp, target_bags),
                 ratio(cm.tp + cm.tn, total), ratio(std::max(target_bags, other_bags), total)};
}

std::size_t FrequencyProfile::total(std::size_t class_index) const {
  std::size_t sum = 0;
  for (const auto& row : counts) sum += row[class_index];
  return sum;
}

FrequencyProfile frequency_profile(std::span<const MatchEvent> events, double t0_s, double t1_s,
                                   double window_length_s, double stride_s,
                                   std::span<const std::string> classes) {
  if (!(t0_s < t1_s)) throw DomainError("frequency_profile: span must satisfy t0 < t1");
  if (!(window_length_s > 0.0) || window_length_s > t1_s - t0_s) {
    throw DomainError("frequency_profile: window length must lie in (0, t1 - t0]");
  }
  if (!(stride_s > 0.0)) throw DomainError("frequency_profile: stride must be positive");

  FrequencyProfile fp;
  fp.t0_s = t0_s;
  fp.t1_s = t1_s;
  fp.window_length_s = window_length_s;
  fp.stride_s = stride_s;

  std::set<std::string> names(classes.begin(), classes.end());
  for (const auto& e : events) names.insert(e.behavior_class);
  fp.classes.assign(names.begin(), names.end());

  for (std::size_t k = 0;; ++k) {
    const double start = t0_s + static_cast<double>(k) * stride_s;
    if (!(start < t1_s)) break;
    fp.window_starts_s.push_back(start);
  }
  fp.counts.assign(fp.window_starts_s.size(), std::vector<std::size_t>(fp.classes.size(), 0));

  for (const auto& e : events) {
    const double t = e.start_time_s;
    if (t < t0_s || !(t < t1_s)) continue;
    const auto c = static_cast<std::size_t>(
        std::lower_bound(fp.classes.begin(), fp.classes.end(), e.behavior_class) -
        fp.classes.begin());
    // Last window starting at or before t; walk back while t stays inside.
    auto k = static_cast<std::ptrdiff_t>(std::floor((t - t0_s) / stride_s));
    k = std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(fp.window_starts_s.size()) - 1);
    while (k + 1 < static_cast<std::ptrdiff_t>(fp.window_starts_s.size()) &&
           fp.window_starts_s[static_cast<std::size_t>(k + 1)] <= t) {
      ++k;
    }
    while (k >= 0 && fp.window_starts_s[static_cast<std::size_t>(k)] > t) --k;
    for (; k >= 0; --k) {
      const double start = fp.window_starts_s[static_cast<std::size_t>(k)];
      if (!(t < start + window_length_s)) break;
      ++fp.counts[static_cast<std::size_t>(k)][c];
    }
  }
  return fp;
}

}  // namespace tsdict
