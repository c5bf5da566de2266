#include "tsdict/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tsdict {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(sep);
    out.push_back(trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_size(std::string_view s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

/// "# key=value" directive; nullopt for plain comments.
std::optional<std::pair<std::string, std::string>> directive(std::string_view line) {
  line.remove_prefix(1);
  line = trim(line);
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError(path, {Diagnostic{0, DiagnosticKind::EmptyFile, "cannot open file"}}, 0, 0);
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string first_line_summary(const std::filesystem::path& path,
                               const std::vector<Diagnostic>& diags) {
  std::ostringstream msg;
  const auto& d = diags.front();
  msg << path.string() << ":" << d.line << ": " << diagnostic_name(d.kind) << ": " << d.detail;
  if (diags.size() > 1) msg << " (+" << diags.size() - 1 << " more)";
  return msg.str();
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v, bool full_precision) {
  if (!v) return "NA";
  if (full_precision) return format_double(*v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string_view diagnostic_name(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::BadHeader:
      return "bad-header";
    case DiagnosticKind::MalformedRow:
      return "malformed-row";
    case DiagnosticKind::NonFiniteValue:
      return "non-finite-value";
    case DiagnosticKind::NonMonotoneIndex:
      return "non-monotone-index";
    case DiagnosticKind::IrregularSpacing:
      return "irregular-spacing";
    case DiagnosticKind::InvertedInterval:
      return "inverted-interval";
    case DiagnosticKind::LabelOutOfRange:
      return "label-out-of-range";
    case DiagnosticKind::LabelOverlap:
      return "label-overlap";
    case DiagnosticKind::UnknownClass:
      return "unknown-class";
    case DiagnosticKind::EmptyFile:
      return "empty-file";
  }
  return "unknown";
}

IngestError::IngestError(std::filesystem::path path, std::vector<Diagnostic> diagnostics,
                         std::size_t rows_read, std::size_t rows_accepted)
    : std::runtime_error(first_line_summary(path, diagnostics)),
      path_(std::move(path)),
      diagnostics_(std::move(diagnostics)),
      rows_read_(rows_read),
      rows_accepted_(rows_accepted) {}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------- sensors

MultiAxisSeries parse_sensor(std::istream& in, const std::filesystem::path& name) {
  std::optional<double> declared_rate;
  bool header_seen = false;
  bool time_mode = false;
  std::vector<Axis> columns;
  std::map<Axis, std::vector<double>> data;
  std::vector<Diagnostic> diags;
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;

  std::optional<double> prev_key;
  std::optional<double> first_key;
  std::optional<double> spacing;

  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (const auto kv = directive(line); kv && kv->first == "sample_rate_hz") {
        const auto rate = parse_double(kv->second);
        if (!rate || !(*rate > 0.0) || !std::isfinite(*rate)) {
          diags.push_back({lineno, DiagnosticKind::BadHeader, "invalid sample_rate_hz"});
        } else {
          declared_rate = *rate;
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      const auto fields = split(line);
      const auto key = lower(fields.front());
      if (key == "time_s" || key == "timestamp") {
        time_mode = true;
      } else if (key != "index" && key != "sample_index") {
        throw IngestError(name, {{lineno, DiagnosticKind::BadHeader,
                                  "first column must be index, sample_index, time_s or timestamp"}},
                          0, 0);
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        Axis a;
        try {
          a = parse_axis(fields[i]);
        } catch (const DomainError&) {
          throw IngestError(name, {{lineno, DiagnosticKind::BadHeader,
                                    "unknown column '" + std::string(fields[i]) + "'"}},
                            0, 0);
        }
        if (std::find(columns.begin(), columns.end(), a) != columns.end()) {
          throw IngestError(name, {{lineno, DiagnosticKind::BadHeader, "duplicate axis column"}},
                            0, 0);
        }
        columns.push_back(a);
        data[a];
      }
      if (columns.empty()) {
        throw IngestError(name, {{lineno, DiagnosticKind::BadHeader, "no axis columns"}}, 0, 0);
      }
      continue;
    }

    ++rows_read;
    const auto fields = split(line);
    if (fields.size() != columns.size() + 1) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow,
                       "expected " + std::to_string(columns.size() + 1) + " fields, found " +
                           std::to_string(fields.size())});
      continue;
    }
    std::optional<double> key;
    if (time_mode) {
      key = parse_double(fields[0]);
      if (key && !std::isfinite(*key)) key.reset();
    } else if (const auto idx = parse_size(fields[0])) {
      key = static_cast<double>(*idx);
    }
    if (!key) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow,
                       "cannot parse " + std::string(time_mode ? "timestamp" : "index") + " '" +
                           std::string(fields[0]) + "'"});
      continue;
    }

    bool row_ok = true;
    if (prev_key) {
      if (*key <= *prev_key) {
        diags.push_back({lineno, DiagnosticKind::NonMonotoneIndex,
                         "key " + std::string(fields[0]) + " does not increase"});
        row_ok = false;
      } else if (!time_mode) {
        if (*key != *prev_key + 1.0) {
          diags.push_back({lineno, DiagnosticKind::IrregularSpacing,
                           "index jumps from " + format_double(*prev_key) + " to " +
                               std::string(fields[0])});
          row_ok = false;
        }
      } else {
        if (!spacing) spacing = declared_rate ? 1.0 / *declared_rate : *key - *prev_key;
        const double expected = *first_key + static_cast<double>(rows_accepted) * *spacing;
        if (std::abs(*key - expected) > 1e-6 * *spacing + 1e-9) {
          diags.push_back({lineno, DiagnosticKind::IrregularSpacing,
                           "timestamp " + std::string(fields[0]) + " breaks the constant spacing"});
          row_ok = false;
        }
      }
    } else if (!time_mode && *key < 1.0) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow, "indices are 1-based"});
      row_ok = false;
    }
    prev_key = key;

    std::vector<double> values;
    for (std::size_t c = 0; c < columns.size() && row_ok; ++c) {
      const auto v = parse_double(fields[c + 1]);
      if (!v) {
        diags.push_back({lineno, DiagnosticKind::MalformedRow,
                         "cannot parse value '" + std::string(fields[c + 1]) + "'"});
        row_ok = false;
      } else if (!std::isfinite(*v)) {
        diags.push_back({lineno, DiagnosticKind::NonFiniteValue,
                         std::string(axis_name(columns[c])) + " is " + std::string(fields[c + 1])});
        row_ok = false;
      } else {
        values.push_back(*v);
      }
    }
    if (!row_ok) continue;
    if (!first_key) first_key = key;
    for (std::size_t c = 0; c < columns.size(); ++c) data[columns[c]].push_back(values[c]);
    ++rows_accepted;
  }

  if (!header_seen) throw IngestError(name, {{0, DiagnosticKind::EmptyFile, "no header line"}}, 0, 0);
  if (!diags.empty()) throw IngestError(name, std::move(diags), rows_read, rows_accepted);
  if (rows_accepted == 0) {
    throw IngestError(name, {{0, DiagnosticKind::EmptyFile, "no data rows"}}, rows_read, 0);
  }

  double rate = kDefaultSampleRate;
  if (declared_rate) {
    rate = *declared_rate;
  } else if (time_mode && spacing) {
    rate = 1.0 / *spacing;
  }
  std::map<Axis, TimeSeries> axes;
  for (auto& [axis, values] : data) axes.emplace(axis, TimeSeries(std::move(values), rate));
  return MultiAxisSeries(std::move(axes));
}

MultiAxisSeries read_sensor_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_sensor(in, path);
}

void write_sensor(std::ostream& out, const MultiAxisSeries& series) {
  out << "# sample_rate_hz=" << format_double(series.sample_rate_hz()) << "\n";
  out << "index";
  for (Axis a : series.axis_ids()) out << "," << lower(axis_name(a));
  out << "\n";
  std::vector<std::span<const double>> cols;
  for (const auto& [_, ts] : series.axes()) cols.push_back(ts.values());
  std::string line;
  for (std::size_t i = 0; i < series.size(); ++i) {
    line = std::to_string(i + 1);
    for (const auto& c : cols) {
      line += ',';
      line += format_double(c[i]);
    }
    line += '\n';
    out << line;
  }
}

void write_sensor_file(const std::filesystem::path& path, const MultiAxisSeries& series) {
  auto out = open_out(path);
  write_sensor(out, series);
}

// ----------------------------------------------------------------- labels

std::vector<LabelInterval> parse_labels(std::istream& in, std::optional<std::size_t> series_length,
                                        const std::filesystem::path& name) {
  std::optional<std::set<std::string>> declared;
  bool header_seen = false;
  std::vector<Diagnostic> diags;
  std::vector<std::pair<std::size_t, LabelInterval>> rows;  // (line, interval)
  std::size_t rows_read = 0;

  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (const auto kv = directive(line); kv && kv->first == "classes") {
        declared.emplace();
        for (const auto c : split(kv->second)) {
          if (!c.empty()) declared->insert(std::string(c));
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      const auto fields = split(line);
      if (fields.size() != 3 || lower(fields[0]) != "start_index" ||
          lower(fields[1]) != "end_index" ||
          (lower(fields[2]) != "class" && lower(fields[2]) != "behavior_class")) {
        throw IngestError(name, {{lineno, DiagnosticKind::BadHeader,
                                  "expected header start_index,end_index,class"}},
                          0, 0);
      }
      continue;
    }
    ++rows_read;
    const auto fields = split(line);
    if (fields.size() != 3) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow,
                       "expected 3 fields, found " + std::to_string(fields.size())});
      continue;
    }
    const auto start = parse_size(fields[0]);
    const auto end = parse_size(fields[1]);
    if (!start || !end || *start == 0 || *end == 0 || fields[2].empty()) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow,
                       "need 1-based start_index, end_index and a class name"});
      continue;
    }
    if (*start > *end) {
      diags.push_back({lineno, DiagnosticKind::InvertedInterval,
                       "start " + std::to_string(*start) + " after end " + std::to_string(*end)});
      continue;
    }
    if (series_length && *end > *series_length) {
      diags.push_back({lineno, DiagnosticKind::LabelOutOfRange,
                       "end " + std::to_string(*end) + " exceeds series length " +
                           std::to_string(*series_length)});
      continue;
    }
    const std::string cls(fields[2]);
    if (declared && !declared->contains(cls)) {
      diags.push_back({lineno, DiagnosticKind::UnknownClass, "class '" + cls + "' not declared"});
      continue;
    }
    rows.push_back({lineno, LabelInterval{*start - 1, *end - 1, cls}});
  }
  if (!header_seen) throw IngestError(name, {{0, DiagnosticKind::EmptyFile, "no header line"}}, 0, 0);

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second.start_index < b.second.start_index;
  });
  std::map<std::string, std::size_t> last_end;
  std::vector<LabelInterval> accepted;
  for (const auto& [lineno, l] : rows) {
    const auto it = last_end.find(l.behavior_class);
    if (it != last_end.end() && l.start_index <= it->second) {
      diags.push_back({lineno, DiagnosticKind::LabelOverlap,
                       "'" + l.behavior_class + "' interval overlaps an earlier one"});
      continue;
    }
    last_end[l.behavior_class] = l.end_index;
    accepted.push_back(l);
  }
  if (!diags.empty()) {
    std::sort(diags.begin(), diags.end(),
              [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    throw IngestError(name, std::move(diags), rows_read, accepted.size());
  }
  return normalize_labels(std::move(accepted));
}

std::vector<LabelInterval> read_label_file(const std::filesystem::path& path,
                                           std::optional<std::size_t> series_length) {
  auto in = open_in(path);
  return parse_labels(in, series_length, path);
}

void write_labels(std::ostream& out, std::span<const LabelInterval> labels,
                  std::span<const std::string> declared_classes) {
  if (!declared_classes.empty()) {
    out << "# classes=";
    for (std::size_t i = 0; i < declared_classes.size(); ++i) {
      out << (i ? "," : "") << declared_classes[i];
    }
    out << "\n";
  }
  out << "start_index,end_index,class\n";
  for (const auto& l : labels) {
    out << l.start_index + 1 << "," << l.end_index + 1 << "," << l.behavior_class << "\n";
  }
}

void write_label_file(const std::filesystem::path& path, std::span<const LabelInterval> labels,
                      std::span<const std::string> declared_classes) {
  auto out = open_out(path);
  write_labels(out, labels, declared_classes);
}

IngestResult ingest(const std::filesystem::path& sensor_path,
                    const std::filesystem::path& label_path) {
  auto series = read_sensor_file(sensor_path);
  auto labels = read_label_file(label_path, series.size());
  return IngestResult{std::move(series), std::move(labels)};
}

// ------------------------------------------------------------- dictionary

std::string dictionary_to_json(const Dictionary& dict) {
  json meta;
  meta["training_source"] = dict.metadata.training_source;
  meta["training_length"] = dict.metadata.training_length;
  char digest[32];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(dict.metadata.training_digest));
  meta["training_digest"] = digest;
  meta["sample_rate_hz"] = dict.metadata.sample_rate_hz;
  meta["stride"] = dict.metadata.stride;
  meta["epsilon"] = dict.metadata.epsilon;
  meta["threshold_rule"] = std::string(threshold_rule_name(dict.metadata.threshold_rule));
  meta["classes"] = json::array();
  for (const auto& c : dict.metadata.classes) {
    json jc;
    jc["class"] = c.behavior_class;
    jc["axes"] = json::array();
    for (Axis a : c.axes) jc["axes"].push_back(std::string(axis_name(a)));
    jc["anchor"] = std::string(axis_name(c.anchor_axis));
    jc["min_length"] = c.lengths.min_length;
    jc["max_length"] = c.lengths.max_length;
    jc["length_step"] = c.lengths.step;
    jc["candidates_scored"] = c.candidates_scored;
    jc["error"] = c.error;
    meta["classes"].push_back(std::move(jc));
  }

  json templates = json::array();
  for (const auto& t : dict.templates) {
    json jt;
    jt["class"] = t.behavior_class;
    jt["anchor"] = std::string(axis_name(t.anchor_axis));
    jt["length"] = t.length;
    jt["source_position"] = t.source_position + 1;
    jt["axes"] = json::array();
    for (const auto& a : t.axes) {
      json ja;
      ja["axis"] = std::string(axis_name(a.axis));
      ja["threshold"] = a.threshold;
      ja["training_true_positives"] = a.training_true_positives;
      ja["values"] = a.values;
      jt["axes"].push_back(std::move(ja));
    }
    templates.push_back(std::move(jt));
  }

  json root;
  root["format"] = "tsdict-dictionary";
  root["version"] = 1;
  root["metadata"] = std::move(meta);
  root["templates"] = std::move(templates);
  return root.dump(1) + "\n";
}

Dictionary dictionary_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("dictionary: invalid JSON: ") + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != "tsdict-dictionary" ||
        root.at("version").get<int>() != 1) {
      throw DomainError("dictionary: unsupported format or version");
    }
    Dictionary dict;
    const auto& meta = root.at("metadata");
    dict.metadata.training_source = meta.at("training_source").get<std::string>();
    dict.metadata.training_length = meta.at("training_length").get<std::size_t>();
    dict.metadata.training_digest =
        std::stoull(meta.at("training_digest").get<std::string>(), nullptr, 16);
    dict.metadata.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    dict.metadata.stride = meta.at("stride").get<std::size_t>();
    dict.metadata.epsilon = meta.at("epsilon").get<double>();
    dict.metadata.threshold_rule = parse_threshold_rule(meta.value("threshold_rule", std::string("midpoint")));
    for (const auto& jc : meta.at("classes")) {
      ClassBuildInfo c;
      c.behavior_class = jc.at("class").get<std::string>();
      for (const auto& a : jc.at("axes")) c.axes.push_back(parse_axis(a.get<std::string>()));
      c.anchor_axis = parse_axis(jc.at("anchor").get<std::string>());
      c.lengths = LengthRange{jc.at("min_length").get<std::size_t>(),
                              jc.at("max_length").get<std::size_t>(),
                              jc.at("length_step").get<std::size_t>()};
      c.candidates_scored = jc.at("candidates_scored").get<std::size_t>();
      c.error = jc.at("error").get<std::string>();
      dict.metadata.classes.push_back(std::move(c));
    }
    for (const auto& jt : root.at("templates")) {
      QueryTemplate t;
      t.behavior_class = jt.at("class").get<std::string>();
      t.anchor_axis = parse_axis(jt.at("anchor").get<std::string>());
      t.length = jt.at("length").get<std::size_t>();
      const auto pos = jt.at("source_position").get<std::size_t>();
      if (pos == 0) throw DomainError("dictionary: source_position is 1-based");
      t.source_position = pos - 1;
      for (const auto& ja : jt.at("axes")) {
        AxisTemplate a;
        a.axis = parse_axis(ja.at("axis").get<std::string>());
        a.threshold = ja.at("threshold").get<double>();
        a.training_true_positives = ja.at("training_true_positives").get<std::size_t>();
        a.values = ja.at("values").get<std::vector<double>>();
        t.axes.push_back(std::move(a));
      }
      validate(t);
      if (dict.find(t.behavior_class) != nullptr) {
        throw DomainError("dictionary: duplicate class '" + t.behavior_class + "'");
      }
      dict.templates.push_back(std::move(t));
    }
    return dict;
  } catch (const json::exception& e) {
    throw DomainError(std::string("dictionary: ") + e.what());
  }
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
  auto out = open_out(path);
  out << dictionary_to_json(dict);
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open dictionary " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return dictionary_from_json(buf.str());
}

// ----------------------------------------------------------------- events

std::vector<Axis> dictionary_axes(const Dictionary& dict) {
  std::set<Axis> axes;
  for (const auto& t : dict.templates) {
    for (const auto& a : t.axes) axes.insert(a.axis);
  }
  return {axes.begin(), axes.end()};
}

void write_events(std::ostream& out, const EventFile& file) {
  for (const auto& [k, v] : file.provenance) out << "# " << k << "=" << v << "\n";
  out << "# sample_rate_hz=" << format_double(file.sample_rate_hz) << "\n";
  if (file.stream_length) out << "# stream_length=" << *file.stream_length << "\n";
  out << "class,start_index,start_time_s,length";
  for (Axis a : file.axes) out << ",dist_" << axis_name(a);
  out << "\n";
  for (const auto& e : file.events) {
    out << e.behavior_class << "," << e.start_index + 1 << "," << fixed6(e.start_time_s) << ","
        << e.length;
    for (Axis a : file.axes) {
      const auto it = e.per_axis_distance.find(a);
      out << "," << (it == e.per_axis_distance.end() ? std::string("NA") : format_double(it->second));
    }
    out << "\n";
  }
}

void write_event_file(const std::filesystem::path& path, const EventFile& file) {
  auto out = open_out(path);
  write_events(out, file);
}

EventFile parse_events(std::istream& in, const std::filesystem::path& name) {
  EventFile file;
  bool header_seen = false;
  std::vector<Diagnostic> diags;
  std::size_t rows_read = 0;
  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto kv = directive(line);
      if (!kv) continue;
      if (kv->first == "sample_rate_hz") {
        const auto r = parse_double(kv->second);
        if (!r || !(*r > 0.0)) {
          diags.push_back({lineno, DiagnosticKind::BadHeader, "invalid sample_rate_hz"});
        } else {
          file.sample_rate_hz = *r;
        }
      } else if (kv->first == "stream_length") {
        file.stream_length = parse_size(kv->second);
        if (!file.stream_length) {
          diags.push_back({lineno, DiagnosticKind::BadHeader, "invalid stream_length"});
        }
      } else {
        file.provenance.push_back(*kv);
      }
      continue;
    }
    const auto fields = split(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 4 || fields[0] != "class" || fields[1] != "start_index" ||
          fields[2] != "start_time_s" || fields[3] != "length") {
        throw IngestError(name, {{lineno, DiagnosticKind::BadHeader,
                                  "expected header class,start_index,start_time_s,length,..."}},
                          0, 0);
      }
      for (std::size_t i = 4; i < fields.size(); ++i) {
        if (fields[i].substr(0, 5) != "dist_") {
          throw IngestError(name, {{lineno, DiagnosticKind::BadHeader,
                                    "unexpected column '" + std::string(fields[i]) + "'"}},
                            0, 0);
        }
        file.axes.push_back(parse_axis(fields[i].substr(5)));
      }
      continue;
    }
    ++rows_read;
    if (fields.size() != 4 + file.axes.size()) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow, "wrong number of fields"});
      continue;
    }
    const auto start = parse_size(fields[1]);
    const auto length = parse_size(fields[3]);
    if (fields[0].empty() || !start || *start == 0 || !length) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow, "cannot parse event"});
      continue;
    }
    MatchEvent e;
    e.behavior_class = std::string(fields[0]);
    e.start_index = *start - 1;
    e.start_time_s = static_cast<double>(e.start_index) / file.sample_rate_hz;
    e.length = *length;
    bool ok = true;
    for (std::size_t k = 0; k < file.axes.size(); ++k) {
      if (fields[4 + k] == "NA") continue;
      const auto d = parse_double(fields[4 + k]);
      if (!d) {
        ok = false;
        break;
      }
      e.per_axis_distance[file.axes[k]] = *d;
    }
    if (!ok) {
      diags.push_back({lineno, DiagnosticKind::MalformedRow, "cannot parse distance"});
      continue;
    }
    file.events.push_back(std::move(e));
  }
  if (!header_seen) throw IngestError(name, {{0, DiagnosticKind::EmptyFile, "no header line"}}, 0, 0);
  if (!diags.empty()) throw IngestError(name, std::move(diags), rows_read, file.events.size());
  // Start times depend on the rate directive, which may follow data rows in
  // hand-edited files.
  for (auto& e : file.events) {
    e.start_time_s = static_cast<double>(e.start_index) / file.sample_rate_hz;
  }
  return file;
}

EventFile read_event_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_events(in, path);
}

// ---------------------------------------------------------------- reports

void write_report(std::ostream& out, const ConfusionMatrix& cm, ReportFormat format,
                  std::span<const std::pair<std::string, std::string>> provenance) {
  const auto m = metrics(cm);
  for (const auto& [k, v] : provenance) out << "# " << k << "=" << v << "\n";
  if (format == ReportFormat::Delimited) {
    out << "class,tp,fp,fn,tn,total_bags,precision,recall,accuracy,default_rate,out_of_bag_matches\n";
    out << cm.target_class << "," << cm.tp << "," << cm.fp << "," << cm.fn << "," << cm.tn << ","
        << cm.total_bags << "," << format_optional(m.precision, true) << ","
        << format_optional(m.recall, true) << "," << format_optional(m.accuracy, true) << ","
        << format_optional(m.default_rate, true) << "," << cm.out_of_bag_matches << "\n";
    return;
  }
  char row[160];
  out << "Bag-level evaluation for class '" << cm.target_class << "'\n\n";
  std::snprintf(row, sizeof row, "%-22s%-18s%-18s\n", "", "actual target", "actual other");
  out << row;
  std::snprintf(row, sizeof row, "%-22s%-18s%-18s\n", "predicted target",
                ("TP " + std::to_string(cm.tp)).c_str(), ("FP " + std::to_string(cm.fp)).c_str());
  out << row;
  std::snprintf(row, sizeof row, "%-22s%-18s%-18s\n", "predicted other",
                ("FN " + std::to_string(cm.fn)).c_str(), ("TN " + std::to_string(cm.tn)).c_str());
  out << row << "\n";
  out << "bags:               " << cm.total_bags << "\n";
  out << "precision:          " << format_optional(m.precision, false) << "\n";
  out << "recall:             " << format_optional(m.recall, false) << "\n";
  out << "accuracy:           " << format_optional(m.accuracy, false) << "\n";
  out << "default rate:       " << format_optional(m.default_rate, false) << "\n";
  out << "out-of-bag matches: " << cm.out_of_bag_matches << "\n";
}

void write_frequency_profile(std::ostream& out, const FrequencyProfile& profile,
                             std::span<const std::pair<std::string, std::string>> provenance) {
  for (const auto& [k, v] : provenance) out << "# " << k << "=" << v << "\n";
  out << "# t0_s=" << format_double(profile.t0_s) << "\n";
  out << "# t1_s=" << format_double(profile.t1_s) << "\n";
  out << "# window_length_s=" << format_double(profile.window_length_s) << "\n";
  out << "# stride_s=" << format_double(profile.stride_s) << "\n";
  out << "window_start_s,window_end_s";
  for (const auto& c : profile.classes) out << "," << c;
  out << "\n";
  for (std::size_t w = 0; w < profile.window_starts_s.size(); ++w) {
    const double s = profile.window_starts_s[w];
    out << format_double(s) << "," << format_double(s + profile.window_length_s);
    for (std::size_t c : profile.counts[w]) out << "," << c;
    out << "\n";
  }
}

}  // namespace tsdict
