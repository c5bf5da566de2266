#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsdict/series.hpp"

namespace tsdict {

/// Waveform shapes available for planted behaviors:
///  - "valley_peak": a valley on X with a simultaneous peak on Z.
///  - "transient_flat": a short Z oscillation followed by a flat tail.
///  - "oscillation": an enveloped oscillation on all three axes.
std::vector<std::string> plant_shapes();

/// Per-axis samples of one plant (no noise, no offset).
std::map<Axis, std::vector<double>> plant_waveform(std::string_view shape, std::size_t length,
                                                   double amplitude);

struct PlantClassSpec {
  std::string name;
  std::string shape;
  double duration_s = 0.5;
  double amplitude = 1.0;
  /// Exactly one of: count > 0, rate_per_hour > 0, or explicit positions.
  std::size_t count = 0;
  double rate_per_hour = 0.0;
  std::vector<double> positions_s;
};

struct SynthSpec {
  double duration_s = 60.0;
  double sample_rate_hz = kDefaultSampleRate;
  std::vector<Axis> axes{Axis::X, Axis::Y, Axis::Z};
  double noise_std = 0.05;
  std::map<Axis, double> axis_offsets;
  /// Maximum weak-label slack on each side of a plant; the actual slack is
  /// drawn from [min_label_padding_s, label_padding_s].
  double label_padding_s = 1.0;
  /// Unset means label_padding_s / 4.
  std::optional<double> min_label_padding_s;
  std::vector<PlantClassSpec> classes;
};

SynthSpec synth_spec_from_json(std::string_view text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

struct Plant {
  std::string behavior_class;
  std::size_t start_index = 0;
  std::size_t length = 0;
  /// The weak label emitted for this plant.
  LabelInterval interval;
};

struct SynthData {
  MultiAxisSeries series;
  std::vector<LabelInterval> labels;
  std::vector<Plant> plants;
};

/// Deterministic for a given (spec, seed). Throws DomainError when the
/// schedule cannot fit.
SynthData synth_generate(const SynthSpec& spec, std::uint64_t seed);

/// Writes sensor.csv, labels.csv and truth.csv into `dir`.
void write_synth(const std::filesystem::path& dir, const SynthData& data);

/// Ground truth rows: class, plant start/end, label start/end (1-based).
std::vector<Plant> read_truth_file(const std::filesystem::path& path);

}  // namespace tsdict
