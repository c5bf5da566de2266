#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsdict {

/// Raised when an operation's preconditions on its inputs are violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Default flatness threshold on a window's population standard deviation.
inline constexpr double kDefaultEpsilon = 1e-8;

/// Smallest window length for which z-normalized shapes are compared.
inline constexpr std::size_t kMinSubsequenceLength = 4;

/// Default sensor rate (Hz).
inline constexpr double kDefaultSampleRate = 100.0;

enum class Axis { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAllAxes = {Axis::X, Axis::Y, Axis::Z};

std::string_view axis_name(Axis axis);
/// Accepts "X"/"x", "Y"/"y", "Z"/"z".
Axis parse_axis(std::string_view name);
/// Parses a comma separated list such as "X,Z".
std::vector<Axis> parse_axis_list(std::string_view list);

/// Half-width of the trivial-match exclusion zone for a window of length m.
constexpr std::size_t exclusion_half_width(std::size_t m) { return (m + 1) / 2; }

/// A single sensor channel. Values are finite and non-empty.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, double sample_rate_hz = kDefaultSampleRate);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double sample_rate_hz() const { return sample_rate_hz_; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> window(std::size_t start, std::size_t length) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
  double sample_rate_hz_;
};

/// Aligned channels sharing one length and one sample rate.
class MultiAxisSeries {
 public:
  explicit MultiAxisSeries(std::map<Axis, TimeSeries> axes);

  bool has(Axis axis) const { return axes_.contains(axis); }
  const TimeSeries& axis(Axis axis) const;
  const std::map<Axis, TimeSeries>& axes() const { return axes_; }
  std::vector<Axis> axis_ids() const;

  std::size_t size() const { return length_; }
  double sample_rate_hz() const { return sample_rate_hz_; }

  friend bool operator==(const MultiAxisSeries&, const MultiAxisSeries&) = default;

 private:
  std::map<Axis, TimeSeries> axes_;
  std::size_t length_ = 0;
  double sample_rate_hz_ = kDefaultSampleRate;
};

/// A weak label: one or more instances of `behavior_class` occur somewhere
/// in [start_index, end_index] (0-based, inclusive).
struct LabelInterval {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  std::string behavior_class;

  std::size_t width() const { return end_index - start_index + 1; }
  bool contains(std::size_t i) const { return i >= start_index && i <= end_index; }

  friend bool operator==(const LabelInterval&, const LabelInterval&) = default;
};

/// Sorts by (start, end, class) and checks start <= end and that intervals
/// of the same class do not overlap.
std::vector<LabelInterval> normalize_labels(std::vector<LabelInterval> labels);

/// Per-index membership mask: mask[i] != 0 iff i lies in an interval of
/// `target_class`. Mask length is `length`.
std::vector<unsigned char> class_mask(std::span<const LabelInterval> labels,
                                      std::string_view target_class, std::size_t length);

/// (x - mean) / std with population std; all zeros when std < epsilon.
std::vector<double> z_normalize(std::span<const double> values, double epsilon = kDefaultEpsilon);

struct WindowStats {
  std::vector<double> means;
  std::vector<double> stds;
};

/// Population mean/std of every length-m window, O(n).
WindowStats sliding_mean_std(std::span<const double> values, std::size_t m);

/// Z-normalized Euclidean distance between an already z-normalized query and
/// a raw window of the same length, computed directly. +inf when the window
/// is flat. Identical windows always yield bitwise-identical results.
double window_distance(std::span<const double> normalized_query, std::span<const double> window,
                       double epsilon = kDefaultEpsilon);

}  // namespace tsdict
