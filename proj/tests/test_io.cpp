#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tsdict/io.hpp"
#include "tsdict/synth.hpp"

using namespace tsdict;

namespace {

std::vector<DiagnosticKind> kinds(const IngestError& e) {
  std::vector<DiagnosticKind> out;
  for (const auto& d : e.diagnostics()) out.push_back(d.kind);
  return out;
}

IngestError sensor_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_sensor(in);
  } catch (const IngestError& e) {
    return e;
  }
  FAIL("expected an ingestion error");
  throw;
}

IngestError label_error(const std::string& text, std::optional<std::size_t> n = {}) {
  std::istringstream in(text);
  try {
    parse_labels(in, n);
  } catch (const IngestError& e) {
    return e;
  }
  FAIL("expected an ingestion error");
  throw;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tsdict_unit" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

SynthSpec three_class_spec() {
  SynthSpec spec;
  spec.duration_s = 300.0;
  spec.label_padding_s = 1.0;
  spec.classes = {{"feeding", "valley_peak", 0.8, 1.0, 5, 0.0, {}},
                  {"preening", "transient_flat", 1.0, 1.0, 5, 0.0, {}},
                  {"dustbathing", "oscillation", 1.2, 1.0, 5, 0.0, {}}};
  return spec;
}

}  // namespace

TEST_CASE("sensor parsing accepts index and time columns") {
  std::istringstream in("# sample_rate_hz=50\nindex,x,z\n1,0.5,1\n2,-1e-3,2\n3,7,3\n");
  const auto s = parse_sensor(in);
  CHECK(s.size() == 3);
  CHECK(s.sample_rate_hz() == 50.0);
  CHECK(s.axis_ids() == std::vector<Axis>{Axis::X, Axis::Z});
  CHECK(s.axis(Axis::X).values()[1] == -1e-3);

  std::istringstream timed("time_s,y\n0.00,1\n0.01,2\n0.02,3\n0.03,4\n");
  const auto t = parse_sensor(timed);
  CHECK(t.sample_rate_hz() == doctest::Approx(100.0));
  CHECK(t.size() == 4);
}

TEST_CASE("sensor parsing itemizes every bad row") {
  const auto e = sensor_error(
      "index,x,y,z\n1,0,0,0\n2,0,nan,0\n3,0,0\n5,0,0,0\n4,1,1,1\n6,abc,0,0\n");
  CHECK(kinds(e) == std::vector<DiagnosticKind>{DiagnosticKind::NonFiniteValue,
                                                DiagnosticKind::MalformedRow,
                                                DiagnosticKind::IrregularSpacing,
                                                DiagnosticKind::NonMonotoneIndex,
                                                DiagnosticKind::IrregularSpacing});
  CHECK(e.diagnostics()[0].line == 3);
  CHECK(e.diagnostics()[4].line == 7);
  CHECK(e.rows_read() == 6);
  CHECK(e.rows_accepted() + e.diagnostics().size() == e.rows_read());

  CHECK(kinds(sensor_error("index,x,w\n1,2,3\n")) ==
        std::vector<DiagnosticKind>{DiagnosticKind::BadHeader});
  CHECK(kinds(sensor_error("")) == std::vector<DiagnosticKind>{DiagnosticKind::EmptyFile});
  CHECK(kinds(sensor_error("index,x\n")) == std::vector<DiagnosticKind>{DiagnosticKind::EmptyFile});
  CHECK(kinds(sensor_error("index,x\n0,1\n")) ==
        std::vector<DiagnosticKind>{DiagnosticKind::MalformedRow});
  CHECK(kinds(sensor_error("time_s,x\n0,1\n0.01,1\n0.5,1\n")) ==
        std::vector<DiagnosticKind>{DiagnosticKind::IrregularSpacing});
}

TEST_CASE("sensor files round trip bit for bit") {
  std::map<Axis, TimeSeries> axes;
  axes.emplace(Axis::X, TimeSeries(oracle::gaussian(500, 1), 25.0));
  axes.emplace(Axis::Y, TimeSeries(oracle::random_walk(500, 2), 25.0));
  axes.emplace(Axis::Z, TimeSeries(oracle::gaussian(500, 3, 1e-7), 25.0));
  const MultiAxisSeries s(std::move(axes));
  std::stringstream buf;
  write_sensor(buf, s);
  const auto back = parse_sensor(buf);
  CHECK(back.sample_rate_hz() == 25.0);
  for (Axis a : kAllAxes) {
    const auto x = s.axis(a).values();
    const auto y = back.axis(a).values();
    CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
  }
}

TEST_CASE("label parsing converts to 0-based intervals and validates") {
  std::istringstream in("# classes=feeding,preening\nstart_index,end_index,class\n"
                        "101,200,feeding\n1,50,preening\n");
  const auto labels = parse_labels(in, 300);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == LabelInterval{0, 49, "preening"});
  CHECK(labels[1] == LabelInterval{100, 199, "feeding"});

  const auto e = label_error(
      "# classes=a\nstart_index,end_index,class\n5,4,a\n1,10,b\n1,400,a\n20,30,a\n25,35,a\nx,1,a\n",
      300);
  CHECK(kinds(e) == std::vector<DiagnosticKind>{DiagnosticKind::InvertedInterval,
                                                DiagnosticKind::UnknownClass,
                                                DiagnosticKind::LabelOutOfRange,
                                                DiagnosticKind::LabelOverlap,
                                                DiagnosticKind::MalformedRow});
  CHECK(kinds(label_error("start,end,class\n")) ==
        std::vector<DiagnosticKind>{DiagnosticKind::BadHeader});
}

TEST_CASE("label files round trip") {
  const std::vector<LabelInterval> labels{{0, 9, "a"}, {20, 29, "b"}, {40, 45, "a"}};
  const std::vector<std::string> declared{"a", "b", "c"};
  std::stringstream buf;
  write_labels(buf, labels, declared);
  CHECK(buf.str().find("# classes=a,b,c") != std::string::npos);
  CHECK(parse_labels(buf, 46) == labels);
}

TEST_CASE("ingest pairs sensor and label files") {
  const auto dir = scratch("ingest");
  {
    std::ofstream(dir / "s.csv") << "index,x\n1,1\n2,2\n3,3\n4,1\n5,0\n";
    std::ofstream(dir / "l.csv") << "start_index,end_index,class\n2,6,a\n";
  }
  try {
    ingest(dir / "s.csv", dir / "l.csv");
    FAIL("expected an ingestion error");
  } catch (const IngestError& e) {
    CHECK(kinds(e) == std::vector<DiagnosticKind>{DiagnosticKind::LabelOutOfRange});
    CHECK(e.path() == dir / "l.csv");
  }
  std::ofstream(dir / "l.csv") << "start_index,end_index,class\n2,5,a\n";
  const auto r = ingest(dir / "s.csv", dir / "l.csv");
  CHECK(r.series.size() == 5);
  CHECK(r.labels.at(0).end_index == 4);
  CHECK_THROWS_AS(read_sensor_file(dir / "missing.csv"), IngestError);
}

TEST_CASE("event files round trip and mark absent axes as NA") {
  EventFile f;
  f.axes = {Axis::X, Axis::Z};
  f.sample_rate_hz = 100.0;
  f.stream_length = 1000;
  f.provenance = {{"dictionary", "dict.json"}, {"chunk", "0"}};
  MatchEvent a{"feeding", 12, 0.12, 50, {{Axis::X, 0.1 + 0.2}, {Axis::Z, 1e-300}}};
  MatchEvent b{"preening", 400, 4.0, 80, {{Axis::Z, 3.25}}};
  f.events = {a, b};
  std::stringstream buf;
  write_events(buf, f);
  const auto text = buf.str();
  CHECK(text.find("class,start_index,start_time_s,length,dist_X,dist_Z\n") != std::string::npos);
  CHECK(text.find("feeding,13,0.120000,50,0.30000000000000004,1e-300\n") != std::string::npos);
  CHECK(text.find("preening,401,4.000000,80,NA,3.25\n") != std::string::npos);
  CHECK(text.rfind("# dictionary=dict.json\n", 0) == 0);

  const auto back = parse_events(buf);
  CHECK(back.events == f.events);
  CHECK(back.axes == f.axes);
  CHECK(back.stream_length == f.stream_length);
  CHECK(back.provenance == f.provenance);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-10) == "-2.5e-10");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("reports render the same matrix as text and csv") {
  ConfusionMatrix cm{"feeding", 17, 7, 4, 43, 71, 3};
  std::ostringstream csv;
  write_report(csv, cm, ReportFormat::Delimited);
  CHECK(csv.str() ==
        "class,tp,fp,fn,tn,total_bags,precision,recall,accuracy,default_rate,out_of_bag_matches\n"
        "feeding,17,7,4,43,71,0.7083333333333334,0.8095238095238095,0.8450704225352113,"
        "0.704225352112676,3\n");
  std::ostringstream text;
  const std::vector<std::pair<std::string, std::string>> prov{{"events", "e.csv"}};
  write_report(text, cm, ReportFormat::Text, prov);
  CHECK(text.str().rfind("# events=e.csv\n", 0) == 0);
  CHECK(text.str().find("TP 17") != std::string::npos);
  CHECK(text.str().find("precision:          0.7083") != std::string::npos);

  std::ostringstream na;
  write_report(na, ConfusionMatrix{"x", 0, 0, 0, 3, 3, 0}, ReportFormat::Delimited);
  CHECK(na.str().find("x,0,0,0,3,3,NA,NA,1,1,0\n") != std::string::npos);
}

TEST_CASE("frequency profile csv layout") {
  std::vector<MatchEvent> ev{{"a", 0, 0.0, 10, {}}, {"b", 0, 1.5, 10, {}}};
  const auto fp = frequency_profile(ev, 0.0, 2.0, 1.0, 1.0);
  std::ostringstream out;
  write_frequency_profile(out, fp);
  CHECK(out.str().find("window_start_s,window_end_s,a,b\n0,1,1,0\n1,2,0,1\n") != std::string::npos);
}

TEST_CASE("synthetic generator is deterministic and plants one behavior per interval") {
  const auto spec = three_class_spec();
  const auto a = synth_generate(spec, 7);
  const auto b = synth_generate(spec, 7);
  const auto c = synth_generate(spec, 8);
  CHECK(a.labels == b.labels);
  CHECK(series_digest(a.series) == series_digest(b.series));
  CHECK(series_digest(a.series) != series_digest(c.series));

  REQUIRE(a.plants.size() == 15);
  std::map<std::string, std::size_t> per_class;
  for (const auto& p : a.plants) {
    ++per_class[p.behavior_class];
    CHECK(p.interval.start_index < p.start_index);
    CHECK(p.interval.end_index > p.start_index + p.length - 1);
    std::size_t inside = 0;
    for (const auto& q : a.plants) {
      inside += q.start_index >= p.interval.start_index &&
                q.start_index + q.length - 1 <= p.interval.end_index;
    }
    CHECK(inside == 1);
  }
  CHECK(per_class == std::map<std::string, std::size_t>{{"dustbathing", 5}, {"feeding", 5},
                                                        {"preening", 5}});
  CHECK_NOTHROW(make_bags(a.labels));
}

TEST_CASE("synthetic output files read back through the ingestion path") {
  const auto dir = scratch("synth");
  const auto data = synth_generate(three_class_spec(), 3);
  write_synth(dir, data);
  const auto r = ingest(dir / "sensor.csv", dir / "labels.csv");
  CHECK(r.labels == data.labels);
  CHECK(series_digest(r.series) == series_digest(data.series));
  const auto truth = read_truth_file(dir / "truth.csv");
  REQUIRE(truth.size() == data.plants.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(truth[i].start_index == data.plants[i].start_index);
    CHECK(truth[i].length == data.plants[i].length);
    CHECK(truth[i].interval == data.plants[i].interval);
  }
}

TEST_CASE("synthetic spec errors") {
  auto spec = three_class_spec();
  spec.classes[0].rate_per_hour = 10.0;
  CHECK_THROWS_AS(synth_generate(spec, 1), DomainError);
  spec = three_class_spec();
  spec.duration_s = 10.0;
  CHECK_THROWS_AS(synth_generate(spec, 1), DomainError);
  spec = three_class_spec();
  spec.classes[1].shape = "spiral";
  CHECK_THROWS_AS(synth_generate(spec, 1), DomainError);
  CHECK_THROWS_AS(synth_spec_from_json("{\"classes\": []}"), DomainError);
  const auto parsed = synth_spec_from_json(
      R"({"duration_s": 120, "axes": ["X", "Z"], "classes": [{"name": "f", "shape": "valley_peak",
          "duration_s": 0.5, "rate_per_hour": 300}]})");
  CHECK(parsed.axes == std::vector<Axis>{Axis::X, Axis::Z});
  CHECK(synth_generate(parsed, 2).plants.size() == 10);
}
