// tsdict: batch command line for dictionary building, matching and scoring.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsdict/dictionary.hpp"
#include "tsdict/evaluation.hpp"
#include "tsdict/io.hpp"
#include "tsdict/matcher.hpp"
#include "tsdict/series.hpp"
#include "tsdict/synth.hpp"

namespace fs = std::filesystem;
using namespace tsdict;

namespace {

using Provenance = std::vector<std::pair<std::string, std::string>>;

constexpr const char* kVersion = "0.1.0";

// Reported as "tsdict: error: <kind>: <message>" on one line.
struct CliError : std::runtime_error {
  CliError(std::string kind, const std::string& msg) : std::runtime_error(msg), kind(std::move(kind)) {}
  std::string kind;
};

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("io", "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw CliError("io", "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---- build-dict ----

struct BuildArgs {
  std::string sensor, labels, out, config;
  std::string cls, axes, anchor;
  std::optional<double> min_len, max_len;
  double len_step = 0.1;
  std::size_t stride = 1;
  unsigned threads = 0;
  bool append = false;
  bool allow_partial = false;
  std::string threshold_rule = "midpoint";
};

std::vector<ClassConfig> classes_from_args(const BuildArgs& a, double rate, std::size_t& stride,
                                           bool& allow_partial) {
  std::vector<ClassConfig> out;
  if (!a.config.empty()) {
    if (!a.cls.empty()) throw CliError("usage", "--config and --class are mutually exclusive");
    nlohmann::json root;
    try {
      root = nlohmann::json::parse(read_text(a.config));
      stride = root.value("stride", stride);
      allow_partial = root.value("allow_partial", allow_partial);
      const double default_step = root.value("len_step_s", a.len_step);
      for (const auto& jc : root.at("classes")) {
        ClassConfig c;
        c.behavior_class = jc.at("name").get<std::string>();
        c.axes = parse_axis_list(jc.at("axes").get<std::string>());
        c.anchor_axis = parse_axis(jc.value("anchor", std::string(axis_name(c.axes.front()))));
        c.lengths = length_range_from_seconds(jc.at("min_len_s").get<double>(),
                                              jc.at("max_len_s").get<double>(),
                                              jc.value("len_step_s", default_step), rate);
        out.push_back(std::move(c));
      }
    } catch (const nlohmann::json::exception& e) {
      throw CliError("config", a.config + ": " + e.what());
    }
    return out;
  }
  if (a.cls.empty() || a.axes.empty() || !a.min_len || !a.max_len) {
    throw CliError("usage", "build-dict needs --config or --class, --axes, --min-len and --max-len");
  }
  ClassConfig c;
  c.behavior_class = a.cls;
  c.axes = parse_axis_list(a.axes);
  c.anchor_axis = a.anchor.empty() ? c.axes.front() : parse_axis(a.anchor);
  c.lengths = length_range_from_seconds(*a.min_len, *a.max_len, a.len_step, rate);
  out.push_back(std::move(c));
  return out;
}

int run_build(const BuildArgs& a) {
  const auto data = ingest(a.sensor, a.labels);
  BuildOptions opt;
  opt.stride = a.stride;
  opt.threads = a.threads;
  opt.allow_partial = a.allow_partial;
  opt.threshold_rule = parse_threshold_rule(a.threshold_rule);
  opt.training_source = fs::path(a.sensor).filename().string();
  const auto classes = classes_from_args(a, data.series.sample_rate_hz(), opt.stride, opt.allow_partial);
  Dictionary built = build_dictionary(data.series, data.labels, classes, opt);
  for (const auto& info : built.metadata.classes) {
    if (!info.error.empty()) {
      std::cerr << "tsdict: warning: class " << info.behavior_class << " skipped: " << one_line(info.error)
                << "\n";
    }
  }
  if (a.append && fs::exists(a.out)) {
    Dictionary merged = load_dictionary(a.out);
    for (auto& t : built.templates) merged.upsert(std::move(t));
    for (auto& info : built.metadata.classes) {
      auto& cl = merged.metadata.classes;
      std::erase_if(cl, [&](const ClassBuildInfo& c) { return c.behavior_class == info.behavior_class; });
      cl.push_back(std::move(info));
    }
    built = std::move(merged);
  }
  save_dictionary(a.out, built);
  for (const auto& t : built.templates) {
    std::cout << t.behavior_class << ": length=" << t.length << " position=" << t.source_position + 1;
    for (const auto& ax : t.axes) {
      std::cout << " " << axis_name(ax.axis) << ":thr=" << format_double(ax.threshold)
                << ",tp=" << ax.training_true_positives;
    }
    std::cout << "\n";
  }
  return 0;
}

// ---- match ----

struct MatchArgs {
  std::string sensor, dict, out;
  std::size_t chunk = 0;
  std::size_t overlap = 0;
  unsigned threads = 0;
};

int run_match(const MatchArgs& a) {
  const auto series = read_sensor_file(a.sensor);
  const auto dict = load_dictionary(a.dict);
  MatchOptions opt;
  opt.threads = a.threads;
  EventFile file;
  std::size_t ov = 0;
  if (a.chunk > 0) {
    ov = a.overlap > 0 ? a.overlap : minimum_overlap(dict);
    file.events = match_windowed(series, dict, a.chunk, ov, opt);
  } else {
    file.events = match_stream(series, dict, opt);
  }
  file.axes = dictionary_axes(dict);
  file.sample_rate_hz = series.sample_rate_hz();
  file.stream_length = series.size();
  file.provenance = {{"tool", std::string("tsdict ") + kVersion},
                     {"command", "match"},
                     {"sensor", a.sensor},
                     {"sensor_digest", hex64(series_digest(series))},
                     {"dictionary", a.dict},
                     {"chunk", std::to_string(a.chunk)},
                     {"overlap", std::to_string(ov)}};
  write_event_file(a.out, file);
  std::cout << file.events.size() << " events\n";
  return 0;
}

// ---- evaluate ----

struct EvalArgs {
  std::string events, labels, cls, out, format = "text";
};

int run_evaluate(const EvalArgs& a) {
  const auto ev = read_event_file(a.events);
  const auto labels = read_label_file(a.labels, ev.stream_length);
  const auto bags = make_bags(labels);
  const auto cm = mil_score(ev.events, bags, a.cls);
  const Provenance prov{{"tool", std::string("tsdict ") + kVersion},
                        {"command", "evaluate"},
                        {"events", a.events},
                        {"labels", a.labels},
                        {"class", a.cls}};
  std::ostringstream ss;
  write_report(ss, cm, a.format == "csv" ? ReportFormat::Delimited : ReportFormat::Text, prov);
  if (a.out.empty()) {
    std::cout << ss.str();
  } else {
    write_text(a.out, ss.str());
  }
  return 0;
}

// ---- frequency ----

struct FreqArgs {
  std::string events, out;
  double window_s = 3600.0;
  double stride_s = 3600.0;
  double t0 = 0.0;
  std::optional<double> t1;
  std::vector<std::string> classes;
};

int run_frequency(const FreqArgs& a) {
  const auto ev = read_event_file(a.events);
  double t1 = 0.0;
  if (a.t1) {
    t1 = *a.t1;
  } else if (ev.stream_length) {
    t1 = static_cast<double>(*ev.stream_length) / ev.sample_rate_hz;
  } else {
    throw CliError("usage", "--t1 is required when the event file has no stream_length");
  }
  const auto profile = frequency_profile(ev.events, a.t0, t1, a.window_s, a.stride_s, a.classes);
  const Provenance prov{{"tool", std::string("tsdict ") + kVersion},
                        {"command", "frequency"},
                        {"events", a.events}};
  std::ostringstream ss;
  write_frequency_profile(ss, profile, prov);
  write_text(a.out, ss.str());
  return 0;
}

// ---- synth ----

struct SynthArgs {
  std::string spec, out_dir;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
  const auto spec = load_synth_spec(a.spec);
  const auto data = synth_generate(spec, a.seed);
  write_synth(a.out_dir, data);
  std::cout << data.series.size() << " samples, " << data.plants.size() << " plants\n";
  return 0;
}

int report(const std::string& kind, const std::string& msg) {
  std::cerr << "tsdict: error: " << kind << ": " << one_line(msg) << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised time-series dictionary building and matching"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build-dict", "Learn one query template per class from weak labels");
  b->add_option("--sensor", build.sensor, "Training sensor file")->required();
  b->add_option("--labels", build.labels, "Training label file")->required();
  b->add_option("--out", build.out, "Dictionary file to write")->required();
  b->add_option("--config", build.config, "JSON file listing several classes");
  b->add_option("--class", build.cls, "Target class");
  b->add_option("--axes", build.axes, "Comma-separated axes, e.g. X,Z");
  b->add_option("--anchor", build.anchor, "Axis used for selection (default: first of --axes)");
  b->add_option("--min-len", build.min_len, "Shortest template, seconds");
  b->add_option("--max-len", build.max_len, "Longest template, seconds");
  b->add_option("--len-step", build.len_step, "Length step, seconds")->capture_default_str();
  b->add_option("--stride", build.stride, "Candidate start step, samples")->capture_default_str();
  b->add_option("--threads", build.threads, "Worker threads (0 = all cores)");
  b->add_flag("--append", build.append, "Add or replace classes in an existing dictionary");
  b->add_flag("--allow-partial", build.allow_partial, "Skip classes without a conserved template");
  b->add_option("--threshold-rule", build.threshold_rule, "last-tp, midpoint or first-fp")
      ->check(CLI::IsMember({"last-tp", "midpoint", "first-fp"}))
      ->capture_default_str();

  MatchArgs match;
  auto* m = app.add_subcommand("match", "Find template occurrences in a stream");
  m->add_option("--sensor", match.sensor, "Sensor file to scan")->required();
  m->add_option("--dict", match.dict, "Dictionary file")->required();
  m->add_option("--out", match.out, "Event file to write")->required();
  m->add_option("--chunk", match.chunk, "Process in chunks of N samples (0 = whole stream)");
  m->add_option("--overlap", match.overlap, "Chunk overlap in samples (0 = minimum safe)");
  m->add_option("--threads", match.threads, "Worker threads (0 = all cores)");

  EvalArgs eval;
  auto* e = app.add_subcommand("evaluate", "Score events against weak labels, one bag per interval");
  e->add_option("--events", eval.events, "Event file")->required();
  e->add_option("--labels", eval.labels, "Label file")->required();
  e->add_option("--class", eval.cls, "Target class")->required();
  e->add_option("--out", eval.out, "Report file (default: stdout)");
  e->add_option("--format", eval.format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();

  FreqArgs freq;
  auto* f = app.add_subcommand("frequency", "Count events per class in sliding time windows");
  f->add_option("--events", freq.events, "Event file")->required();
  f->add_option("--out", freq.out, "Profile file to write")->required();
  f->add_option("--window-s", freq.window_s, "Window length, seconds")->capture_default_str();
  f->add_option("--stride-s", freq.stride_s, "Window step, seconds")->capture_default_str();
  f->add_option("--t0", freq.t0, "Profile start, seconds")->capture_default_str();
  f->add_option("--t1", freq.t1, "Profile end, seconds (default: stream end)");
  f->add_option("--class", freq.classes, "Class to report even when it has no events");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic data set with planted behaviors");
  s->add_option("--spec", synth.spec, "JSON synthesis spec")->required();
  s->add_option("--seed", synth.seed, "Random seed")->required();
  s->add_option("--out-dir", synth.out_dir, "Directory for sensor.csv, labels.csv, truth.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    report("usage", ex.what());
    return 2;
  }

  try {
    if (b->parsed()) return run_build(build);
    if (m->parsed()) return run_match(match);
    if (e->parsed()) return run_evaluate(eval);
    if (f->parsed()) return run_frequency(freq);
    if (s->parsed()) return run_synth(synth);
  } catch (const CliError& ex) {
    return report(ex.kind, ex.what());
  } catch (const IngestError& ex) {
    std::string msg = ex.what();
    if (!ex.diagnostics().empty()) {
      const auto& d = ex.diagnostics().front();
      msg = ex.path().string() + ":" + std::to_string(d.line) + ": " +
            std::string(diagnostic_name(d.kind)) + ": " + d.detail;
      if (ex.diagnostics().size() > 1) {
        msg += " (+" + std::to_string(ex.diagnostics().size() - 1) + " more)";
      }
    }
    return report("ingest", msg);
  } catch (const NoConservedTemplate& ex) {
    return report("no-template", ex.what());
  } catch (const DomainError& ex) {
    return report("domain", ex.what());
  } catch (const std::exception& ex) {
    return report("internal", ex.what());
  }
  return 1;
}
