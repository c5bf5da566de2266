#include "tsdict/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tsdict/io.hpp"

namespace tsdict {

namespace {

using json = nlohmann::json;

double bump(double u, double center, double width) {
  const double z = (u - center) / width;
  return std::exp(-z * z);
}

std::size_t samples(double seconds, double rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

}  // namespace

std::vector<std::string> plant_shapes() { return {"valley_peak", "transient_flat", "oscillation"}; }

std::map<Axis, std::vector<double>> plant_waveform(std::string_view shape, std::size_t length,
                                                   double amplitude) {
  if (length < kMinSubsequenceLength) throw DomainError("plant shorter than the minimum length");
  std::map<Axis, std::vector<double>> out;
  for (Axis a : kAllAxes) out[a].assign(length, 0.0);
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < length; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(length);
    if (shape == "valley_peak") {
      out[Axis::X][i] = -amplitude * (bump(u, 0.42, 0.12) - 0.3 * bump(u, 0.75, 0.08));
      out[Axis::Y][i] = 0.15 * amplitude * bump(u, 0.5, 0.2);
      out[Axis::Z][i] = amplitude * (bump(u, 0.48, 0.10) - 0.35 * bump(u, 0.2, 0.07));
    } else if (shape == "transient_flat") {
      const double active = 0.4;
      // Full-amplitude cycles end abruptly, so no window near the transient
      // degenerates into a noise-like taper.
      if (u < active) {
        const double wave = std::sin(2.0 * pi * 2.5 * u / active);
        out[Axis::Z][i] = amplitude * wave;
        out[Axis::X][i] = 0.2 * amplitude * wave;
      }
    } else if (shape == "oscillation") {
      const double envelope = std::pow(std::sin(pi * u), 2);
      out[Axis::X][i] = amplitude * envelope * std::sin(2.0 * pi * 6.0 * u);
      out[Axis::Y][i] = 0.6 * amplitude * envelope * std::sin(2.0 * pi * 6.0 * u + 1.0);
      out[Axis::Z][i] = 0.8 * amplitude * envelope * std::cos(2.0 * pi * 6.0 * u);
    } else {
      throw DomainError("unknown plant shape '" + std::string(shape) + "'");
    }
  }
  return out;
}

SynthSpec synth_spec_from_json(std::string_view text) {
  SynthSpec spec;
  try {
    const auto root = json::parse(text);
    spec.duration_s = root.at("duration_s").get<double>();
    spec.sample_rate_hz = root.value("sample_rate_hz", kDefaultSampleRate);
    spec.noise_std = root.value("noise_std", spec.noise_std);
    spec.label_padding_s = root.value("label_padding_s", spec.label_padding_s);
    if (root.contains("min_label_padding_s")) {
      spec.min_label_padding_s = root.at("min_label_padding_s").get<double>();
    }
    if (root.contains("axes")) {
      spec.axes.clear();
      for (const auto& a : root.at("axes")) spec.axes.push_back(parse_axis(a.get<std::string>()));
    }
    if (root.contains("axis_offsets")) {
      for (const auto& [k, v] : root.at("axis_offsets").items()) {
        spec.axis_offsets[parse_axis(k)] = v.get<double>();
      }
    }
    for (const auto& jc : root.at("classes")) {
      PlantClassSpec c;
      c.name = jc.at("name").get<std::string>();
      c.shape = jc.at("shape").get<std::string>();
      c.duration_s = jc.at("duration_s").get<double>();
      c.amplitude = jc.value("amplitude", 1.0);
      c.count = jc.value("count", std::size_t{0});
      c.rate_per_hour = jc.value("rate_per_hour", 0.0);
      if (jc.contains("positions_s")) c.positions_s = jc.at("positions_s").get<std::vector<double>>();
      spec.classes.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("synth spec: ") + e.what());
  }
  return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open synth spec " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return synth_spec_from_json(buf.str());
}

SynthData synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  if (!(spec.duration_s > 0.0) || !(spec.sample_rate_hz > 0.0)) {
    throw DomainError("synth: duration and sample rate must be positive");
  }
  if (!(spec.noise_std >= 0.0) || !(spec.label_padding_s >= 0.0)) {
    throw DomainError("synth: noise_std and label_padding_s must be non-negative");
  }
  if (spec.axes.empty()) throw DomainError("synth: no axes");
  const std::size_t n = samples(spec.duration_s, spec.sample_rate_hz);
  if (n == 0) throw DomainError("synth: duration shorter than one sample");
  const std::size_t pad = samples(spec.label_padding_s, spec.sample_rate_hz);
  std::size_t min_slack = (pad + 3) / 4;
  if (spec.min_label_padding_s) {
    if (!(*spec.min_label_padding_s >= 0.0) || *spec.min_label_padding_s > spec.label_padding_s) {
      throw DomainError("synth: min_label_padding_s must lie in [0, label_padding_s]");
    }
    min_slack = samples(*spec.min_label_padding_s, spec.sample_rate_hz);
  }

  std::set<std::string> names;
  bool explicit_positions = false;
  bool counted = false;
  for (const auto& c : spec.classes) {
    if (c.name.empty() || !names.insert(c.name).second) {
      throw DomainError("synth: class names must be unique and non-empty");
    }
    const int modes = (c.count > 0) + (c.rate_per_hour > 0.0) + !c.positions_s.empty();
    if (modes > 1) throw DomainError("synth: class '" + c.name + "' mixes schedule modes");
    explicit_positions = explicit_positions || !c.positions_s.empty();
    counted = counted || c.count > 0 || c.rate_per_hour > 0.0;
  }
  if (explicit_positions && counted) {
    throw DomainError("synth: explicit positions cannot be combined with counted schedules");
  }

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  // (class index, start) for every plant
  std::vector<std::pair<std::size_t, std::size_t>> schedule;
  std::vector<std::size_t> lengths;
  for (const auto& c : spec.classes) {
    const std::size_t len = samples(c.duration_s, spec.sample_rate_hz);
    if (len < kMinSubsequenceLength) {
      throw DomainError("synth: plants of '" + c.name + "' are shorter than the minimum length");
    }
    plant_waveform(c.shape, len, c.amplitude);
    lengths.push_back(len);
  }

  if (explicit_positions) {
    for (std::size_t k = 0; k < spec.classes.size(); ++k) {
      for (double p : spec.classes[k].positions_s) {
        if (p < 0.0) throw DomainError("synth: negative plant position");
        schedule.emplace_back(k, samples(p, spec.sample_rate_hz));
      }
    }
    std::sort(schedule.begin(), schedule.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
  } else {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < spec.classes.size(); ++k) {
      const auto& c = spec.classes[k];
      const std::size_t count =
          c.count > 0 ? c.count
                      : static_cast<std::size_t>(std::llround(c.rate_per_hour * spec.duration_s / 3600.0));
      order.insert(order.end(), count, k);
    }
    std::shuffle(order.begin(), order.end(), rng);
    if (!order.empty()) {
      const std::size_t slot = n / order.size();
      for (std::size_t j = 0; j < order.size(); ++j) {
        const std::size_t len = lengths[order[j]];
        const std::size_t slot_begin = j * slot;
        if (slot < len + 2 * pad) {
          throw DomainError("synth: infeasible schedule, " + std::to_string(order.size()) +
                            " plants do not fit with their label padding");
        }
        schedule.emplace_back(order[j], uniform(slot_begin + pad, slot_begin + slot - pad - len));
      }
    }
  }

  std::vector<Plant> plants;
  for (const auto& [k, start] : schedule) {
    const std::size_t len = lengths[k];
    const std::size_t left = pad == 0 ? 0 : uniform(min_slack, pad);
    const std::size_t right = pad == 0 ? 0 : uniform(min_slack, pad);
    if (start < left || start + len + right > n) {
      throw DomainError("synth: infeasible schedule, plant at sample " + std::to_string(start) +
                        " does not fit inside the series with its label padding");
    }
    Plant p{spec.classes[k].name, start, len,
            LabelInterval{start - left, start + len - 1 + right, spec.classes[k].name}};
    if (!plants.empty() && p.interval.start_index <= plants.back().interval.end_index) {
      throw DomainError("synth: infeasible schedule, padded intervals overlap near sample " +
                        std::to_string(start));
    }
    plants.push_back(std::move(p));
  }

  std::map<Axis, std::vector<double>> data;
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Axis a : spec.axes) {
    if (data.contains(a)) throw DomainError("synth: duplicate axis");
    const auto it = spec.axis_offsets.find(a);
    const double offset = it == spec.axis_offsets.end() ? 0.0 : it->second;
    auto& v = data[a];
    v.resize(n);
    for (auto& x : v) x = offset + spec.noise_std * noise(rng);
  }
  for (std::size_t j = 0; j < plants.size(); ++j) {
    const auto& c = spec.classes[schedule[j].first];
    const auto wave = plant_waveform(c.shape, plants[j].length, c.amplitude);
    for (auto& [a, v] : data) {
      const auto& w = wave.at(a);
      for (std::size_t i = 0; i < w.size(); ++i) v[plants[j].start_index + i] += w[i];
    }
  }

  std::map<Axis, TimeSeries> axes;
  for (auto& [a, v] : data) axes.emplace(a, TimeSeries(std::move(v), spec.sample_rate_hz));
  std::vector<LabelInterval> labels;
  for (const auto& p : plants) labels.push_back(p.interval);
  return SynthData{MultiAxisSeries(std::move(axes)), normalize_labels(std::move(labels)),
                   std::move(plants)};
}

void write_synth(const std::filesystem::path& dir, const SynthData& data) {
  std::filesystem::create_directories(dir);
  write_sensor_file(dir / "sensor.csv", data.series);
  std::set<std::string> classes;
  for (const auto& l : data.labels) classes.insert(l.behavior_class);
  const std::vector<std::string> declared(classes.begin(), classes.end());
  write_label_file(dir / "labels.csv", data.labels, declared);

  std::ofstream truth(dir / "truth.csv", std::ios::binary);
  if (!truth) throw std::runtime_error("cannot write " + (dir / "truth.csv").string());
  truth << "class,plant_start,plant_end,label_start,label_end\n";
  for (const auto& p : data.plants) {
    truth << p.behavior_class << "," << p.start_index + 1 << "," << p.start_index + p.length << ","
          << p.interval.start_index + 1 << "," << p.interval.end_index + 1 << "\n";
  }
}

std::vector<Plant> read_truth_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  std::vector<Plant> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cls, field;
    std::getline(row, cls, ',');
    std::size_t v[4];
    for (auto& x : v) {
      if (!std::getline(row, field, ',')) throw DomainError("malformed truth row: " + line);
      x = std::stoul(field);
    }
    out.push_back(Plant{cls, v[0] - 1, v[1] - v[0] + 1, LabelInterval{v[2] - 1, v[3] - 1, cls}});
  }
  return out;
}

}  // namespace tsdict
