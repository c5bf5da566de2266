#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsdict/dictionary.hpp"
#include "tsdict/evaluation.hpp"
#include "tsdict/matcher.hpp"
#include "tsdict/series.hpp"

namespace tsdict {

enum class DiagnosticKind {
  BadHeader,
  MalformedRow,
  NonFiniteValue,
  NonMonotoneIndex,
  IrregularSpacing,
  InvertedInterval,
  LabelOutOfRange,
  LabelOverlap,
  UnknownClass,
  EmptyFile,
};

std::string_view diagnostic_name(DiagnosticKind kind);

struct Diagnostic {
  std::size_t line = 0;  // 1-based line in the file
  DiagnosticKind kind = DiagnosticKind::MalformedRow;
  std::string detail;
};

/// Ingestion failure. Every rejected row is itemized; rows_read equals
/// rows_accepted plus the number of row-level diagnostics.
class IngestError : public std::runtime_error {
 public:
  IngestError(std::filesystem::path path, std::vector<Diagnostic> diagnostics,
              std::size_t rows_read, std::size_t rows_accepted);

  const std::filesystem::path& path() const { return path_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  std::size_t rows_read() const { return rows_read_; }
  std::size_t rows_accepted() const { return rows_accepted_; }

 private:
  std::filesystem::path path_;
  std::vector<Diagnostic> diagnostics_;
  std::size_t rows_read_;
  std::size_t rows_accepted_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Sensor records: "# sample_rate_hz=R" directive, header "index,x,y,z" (or
// "time_s,..."; any non-empty subset of x/y/z), 1-based consecutive indices.
MultiAxisSeries read_sensor_file(const std::filesystem::path& path);
MultiAxisSeries parse_sensor(std::istream& in, const std::filesystem::path& name = "<stream>");
void write_sensor_file(const std::filesystem::path& path, const MultiAxisSeries& series);
void write_sensor(std::ostream& out, const MultiAxisSeries& series);

// Labels: optional "# classes=a,b" directive, header
// "start_index,end_index,class", 1-based inclusive indices. Returned
// intervals are 0-based and normalized.
std::vector<LabelInterval> read_label_file(const std::filesystem::path& path,
                                           std::optional<std::size_t> series_length = {});
std::vector<LabelInterval> parse_labels(std::istream& in, std::optional<std::size_t> series_length,
                                        const std::filesystem::path& name = "<stream>");
void write_label_file(const std::filesystem::path& path, std::span<const LabelInterval> labels,
                      std::span<const std::string> declared_classes = {});
void write_labels(std::ostream& out, std::span<const LabelInterval> labels,
                  std::span<const std::string> declared_classes = {});

struct IngestResult {
  MultiAxisSeries series;
  std::vector<LabelInterval> labels;
};

IngestResult ingest(const std::filesystem::path& sensor_path,
                    const std::filesystem::path& label_path);

// Dictionary files are JSON; doubles are written in shortest round-trip form
// so loading reproduces every value bit for bit.
std::string dictionary_to_json(const Dictionary& dict);
Dictionary dictionary_from_json(std::string_view text);
void save_dictionary(const std::filesystem::path& path, const Dictionary& dict);
Dictionary load_dictionary(const std::filesystem::path& path);

/// Event files: "# key=value" provenance lines, then
/// "class,start_index,start_time_s,length,dist_X,..." with 1-based indices.
struct EventFile {
  std::vector<MatchEvent> events;
  std::vector<Axis> axes;
  double sample_rate_hz = kDefaultSampleRate;
  std::optional<std::size_t> stream_length;
  std::vector<std::pair<std::string, std::string>> provenance;
};

void write_events(std::ostream& out, const EventFile& file);
void write_event_file(const std::filesystem::path& path, const EventFile& file);
EventFile read_event_file(const std::filesystem::path& path);
EventFile parse_events(std::istream& in, const std::filesystem::path& name = "<stream>");

/// Axes used by any template, in X, Y, Z order.
std::vector<Axis> dictionary_axes(const Dictionary& dict);

enum class ReportFormat { Text, Delimited };

void write_report(std::ostream& out, const ConfusionMatrix& cm, ReportFormat format,
                  std::span<const std::pair<std::string, std::string>> provenance = {});

void write_frequency_profile(std::ostream& out, const FrequencyProfile& profile,
                             std::span<const std::pair<std::string, std::string>> provenance = {});

}  // namespace tsdict
