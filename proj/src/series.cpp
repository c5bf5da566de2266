#include "tsdict/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace tsdict {

namespace {

// Windows between exact re-anchors of the sliding update.
constexpr std::size_t kReanchorInterval = 1024;

struct MeanM2 {
  double mean;
  double m2;
};

MeanM2 two_pass(std::span<const double> w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  const double mean = sum / static_cast<double>(w.size());
  double m2 = 0.0;
  for (double v : w) {
    const double d = v - mean;
    m2 += d * d;
  }
  return {mean, m2};
}

}  // namespace

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::X:
      return "X";
    case Axis::Y:
      return "Y";
    case Axis::Z:
      return "Z";
  }
  return "?";
}

Axis parse_axis(std::string_view name) {
  if (name == "X" || name == "x") return Axis::X;
  if (name == "Y" || name == "y") return Axis::Y;
  if (name == "Z" || name == "z") return Axis::Z;
  throw DomainError("unknown axis '" + std::string(name) + "' (expected X, Y or Z)");
}

std::vector<Axis> parse_axis_list(std::string_view list) {
  std::vector<Axis> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto token = list.substr(0, comma);
    const Axis a = parse_axis(token);
    if (std::find(out.begin(), out.end(), a) != out.end()) {
      throw DomainError("axis '" + std::string(token) + "' listed twice");
    }
    out.push_back(a);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw DomainError("empty axis list");
  std::sort(out.begin(), out.end());
  return out;
}

TimeSeries::TimeSeries(std::vector<double> values, double sample_rate_hz)
    : values_(std::move(values)), sample_rate_hz_(sample_rate_hz) {
  if (values_.empty()) throw DomainError("time series must contain at least one sample");
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw DomainError("sample rate must be positive and finite");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::span<const double> TimeSeries::window(std::size_t start, std::size_t length) const {
  if (start > values_.size() || length > values_.size() - start) {
    throw DomainError("window [" + std::to_string(start) + ", +" + std::to_string(length) +
                      ") exceeds series length " + std::to_string(values_.size()));
  }
  return std::span<const double>(values_).subspan(start, length);
}

MultiAxisSeries::MultiAxisSeries(std::map<Axis, TimeSeries> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw DomainError("multi-axis series needs at least one axis");
  const auto& first = axes_.begin()->second;
  length_ = first.size();
  sample_rate_hz_ = first.sample_rate_hz();
  for (const auto& [id, ts] : axes_) {
    if (ts.size() != length_) {
      throw DomainError("axis " + std::string(axis_name(id)) + " has length " +
                        std::to_string(ts.size()) + ", expected " + std::to_string(length_));
    }
    if (ts.sample_rate_hz() != sample_rate_hz_) {
      throw DomainError("axis " + std::string(axis_name(id)) + " has a different sample rate");
    }
  }
}

const TimeSeries& MultiAxisSeries::axis(Axis axis) const {
  const auto it = axes_.find(axis);
  if (it == axes_.end()) {
    throw DomainError("series has no " + std::string(axis_name(axis)) + " axis");
  }
  return it->second;
}

std::vector<Axis> MultiAxisSeries::axis_ids() const {
  std::vector<Axis> ids;
  for (const auto& [id, _] : axes_) ids.push_back(id);
  return ids;
}

std::vector<LabelInterval> normalize_labels(std::vector<LabelInterval> labels) {
  for (const auto& l : labels) {
    if (l.start_index > l.end_index) {
      throw DomainError("label interval for '" + l.behavior_class + "' has start " +
                        std::to_string(l.start_index) + " after end " +
                        std::to_string(l.end_index));
    }
    if (l.behavior_class.empty()) throw DomainError("label interval with empty class");
  }
  std::sort(labels.begin(), labels.end(), [](const LabelInterval& a, const LabelInterval& b) {
    return std::tie(a.start_index, a.end_index, a.behavior_class) <
           std::tie(b.start_index, b.end_index, b.behavior_class);
  });
  std::map<std::string, std::size_t> last_end;
  for (const auto& l : labels) {
    const auto it = last_end.find(l.behavior_class);
    if (it != last_end.end() && l.start_index <= it->second) {
      std::ostringstream msg;
      msg << "overlapping '" << l.behavior_class << "' intervals at index " << l.start_index;
      throw DomainError(msg.str());
    }
    last_end[l.behavior_class] = l.end_index;
  }
  return labels;
}

std::vector<unsigned char> class_mask(std::span<const LabelInterval> labels,
                                      std::string_view target_class, std::size_t length) {
  std::vector<unsigned char> mask(length, 0);
  for (const auto& l : labels) {
    if (l.behavior_class != target_class || l.start_index >= length) continue;
    const std::size_t end = std::min(l.end_index, length - 1);
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(l.start_index),
              mask.begin() + static_cast<std::ptrdiff_t>(end) + 1, 1);
  }
  return mask;
}

std::vector<double> z_normalize(std::span<const double> values, double epsilon) {
  if (values.empty()) throw DomainError("z_normalize: empty input");
  if (!(epsilon > 0.0)) throw DomainError("z_normalize: epsilon must be positive");
  const auto [mean, m2] = two_pass(values);
  const double sd = std::sqrt(m2 / static_cast<double>(values.size()));
  std::vector<double> out(values.size(), 0.0);
  if (sd < epsilon) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

WindowStats sliding_mean_std(std::span<const double> values, std::size_t m) {
  const std::size_t n = values.size();
  if (m == 0 || m > n) {
    throw DomainError("sliding_mean_std: window " + std::to_string(m) +
                      " must lie in [1, " + std::to_string(n) + "]");
  }
  const std::size_t count = n - m + 1;
  WindowStats out;
  out.means.resize(count);
  out.stds.resize(count);
  const double inv_m = 1.0 / static_cast<double>(m);

  // Largest index j <= i + m - 1 with values[j] != values[j - 1]; a window
  // starting at i is exactly constant iff that index is <= i.
  std::size_t last_change = 0;
  for (std::size_t j = 1; j < m; ++j) {
    if (values[j] != values[j - 1]) last_change = j;
  }

  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) {
      const std::size_t in = i + m - 1;
      if (values[in] != values[in - 1]) last_change = in;
    }
    if (i % kReanchorInterval == 0) {
      const auto exact = two_pass(values.subspan(i, m));
      mean = exact.mean;
      m2 = exact.m2;
    } else {
      const double x_out = values[i - 1];
      const double x_in = values[i + m - 1];
      const double new_mean = mean + (x_in - x_out) * inv_m;
      m2 += (x_in - x_out) * (x_in - new_mean + x_out - mean);
      mean = new_mean;
      if (m2 < 0.0) m2 = 0.0;
    }
    if (last_change <= i) {
      out.means[i] = values[i];
      out.stds[i] = 0.0;
    } else {
      out.means[i] = mean;
      out.stds[i] = std::sqrt(m2 * inv_m);
    }
  }
  return out;
}

double window_distance(std::span<const double> normalized_query, std::span<const double> window,
                       double epsilon) {
  if (normalized_query.size() != window.size()) {
    throw DomainError("window_distance: length mismatch");
  }
  const auto [mean, m2] = two_pass(window);
  const double sd = std::sqrt(m2 / static_cast<double>(window.size()));
  if (sd < epsilon) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double d = (window[i] - mean) / sd - normalized_query[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace tsdict
