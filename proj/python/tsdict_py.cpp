#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tsdict/dictionary.hpp"
#include "tsdict/distance_profile.hpp"
#include "tsdict/evaluation.hpp"
#include "tsdict/io.hpp"
#include "tsdict/matcher.hpp"
#include "tsdict/series.hpp"
#include "tsdict/synth.hpp"

namespace py = pybind11;
using namespace tsdict;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw DomainError("expected a one-dimensional array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array to_array(std::span<const double> v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

MultiAxisSeries make_series(const std::map<std::string, Array>& axes, double rate) {
  std::map<Axis, TimeSeries> out;
  for (const auto& [name, arr] : axes) out.emplace(parse_axis(name), TimeSeries(to_vector(arr), rate));
  return MultiAxisSeries(std::move(out));
}

ClassConfig class_config(const py::dict& d) {
  ClassConfig c;
  c.behavior_class = d["name"].cast<std::string>();
  c.axes = parse_axis_list(d["axes"].cast<std::string>());
  c.anchor_axis = d.contains("anchor") ? parse_axis(d["anchor"].cast<std::string>()) : c.axes.front();
  c.lengths.min_length = d["min_length"].cast<std::size_t>();
  c.lengths.max_length = d["max_length"].cast<std::size_t>();
  c.lengths.step = d.contains("step") ? d["step"].cast<std::size_t>() : 1;
  return c;
}

}  // namespace

PYBIND11_MODULE(_tsdict, m) {
  m.doc() = "Weakly supervised time-series dictionary building and matching";

  auto domain_error = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NoConservedTemplate>(m, "NoConservedTemplate", domain_error.ptr());
  py::register_exception<IngestError>(m, "IngestError", PyExc_ValueError);

  py::enum_<Axis>(m, "Axis").value("X", Axis::X).value("Y", Axis::Y).value("Z", Axis::Z);

  m.attr("DEFAULT_EPSILON") = kDefaultEpsilon;
  m.attr("DEFAULT_SAMPLE_RATE") = kDefaultSampleRate;

  // ---- series ----
  py::class_<LabelInterval>(m, "LabelInterval")
      .def(py::init([](std::size_t s, std::size_t e, std::string c) { return LabelInterval{s, e, std::move(c)}; }),
           py::arg("start_index"), py::arg("end_index"), py::arg("behavior_class"))
      .def_readwrite("start_index", &LabelInterval::start_index)
      .def_readwrite("end_index", &LabelInterval::end_index)
      .def_readwrite("behavior_class", &LabelInterval::behavior_class)
      .def("__eq__", [](const LabelInterval& a, const LabelInterval& b) { return a == b; })
      .def("__repr__", [](const LabelInterval& l) {
        return "LabelInterval(" + std::to_string(l.start_index) + ", " + std::to_string(l.end_index) + ", '" +
               l.behavior_class + "')";
      });

  py::class_<MultiAxisSeries>(m, "MultiAxisSeries")
      .def(py::init(&make_series), py::arg("axes"), py::arg("sample_rate_hz") = kDefaultSampleRate,
           "Build from a mapping such as {'X': array, 'Z': array}.")
      .def("__len__", &MultiAxisSeries::size)
      .def_property_readonly("sample_rate_hz", &MultiAxisSeries::sample_rate_hz)
      .def_property_readonly("axes", [](const MultiAxisSeries& s) {
        std::vector<std::string> out;
        for (Axis a : s.axis_ids()) out.emplace_back(axis_name(a));
        return out;
      })
      .def("axis", [](const MultiAxisSeries& s, const std::string& a) {
        return to_array(s.axis(parse_axis(a)).values());
      })
      .def("__eq__", [](const MultiAxisSeries& a, const MultiAxisSeries& b) { return a == b; });

  m.def("z_normalize", [](const Array& v, double eps) { return to_array(z_normalize(to_vector(v), eps)); },
        py::arg("values"), py::arg("epsilon") = kDefaultEpsilon);
  m.def("sliding_mean_std", [](const Array& v, std::size_t w) {
        const auto s = sliding_mean_std(to_vector(v), w);
        return py::make_tuple(to_array(s.means), to_array(s.stds));
      }, py::arg("values"), py::arg("m"));

  // ---- distance profile ----
  m.def("distance_profile",
        [](const Array& series, const Array& query, const std::string& method, double eps) {
          const auto t = to_vector(series);
          const auto q = to_vector(query);
          if (method == "naive") return to_array(naive_profile(t, q, eps).distances);
          if (method == "fast") return to_array(fast_profile(t, q, eps).distances);
          throw DomainError("method must be 'fast' or 'naive'");
        },
        py::arg("series"), py::arg("query"), py::arg("method") = "fast", py::arg("epsilon") = kDefaultEpsilon);
  m.def("apply_exclusion",
        [](const Array& profile, std::size_t center, std::size_t half_width) {
          auto d = to_vector(profile);
          mask_exclusion(d, ExclusionZone{center, half_width});
          return to_array(d);
        },
        py::arg("profile"), py::arg("center"), py::arg("half_width"));
  m.def("exclusion_half_width", &exclusion_half_width, py::arg("m"));

  // ---- dictionary ----
  py::class_<CandidateScore>(m, "CandidateScore")
      .def_readonly("query_position", &CandidateScore::query_position)
      .def_readonly("length", &CandidateScore::length)
      .def_readonly("true_positives", &CandidateScore::true_positives)
      .def_readonly("false_positives", &CandidateScore::false_positives)
      .def_readonly("threshold_distance", &CandidateScore::threshold_distance)
      .def_readonly("stop_distance", &CandidateScore::stop_distance)
      .def_readonly("matched_positions", &CandidateScore::matched_positions)
      .def_property_readonly("eligible", &CandidateScore::eligible);

  m.def("nn_sweep",
        [](const Array& series, const Array& query, const std::vector<LabelInterval>& labels,
           const std::string& target, double match_radius) {
          SweepOptions opt;
          opt.match_radius = match_radius;
          return nn_sweep(TimeSeries(to_vector(series)), to_vector(query), labels, target, opt);
        },
        py::arg("series"), py::arg("query"), py::arg("labels"), py::arg("target_class"),
        py::arg("match_radius") = std::numeric_limits<double>::infinity());
  m.def("template_threshold",
        [](const CandidateScore& s, const std::string& rule) { return template_threshold(s, parse_threshold_rule(rule)); },
        py::arg("score"), py::arg("rule") = "midpoint");

  py::class_<AxisTemplate>(m, "AxisTemplate")
      .def_property_readonly("axis", [](const AxisTemplate& a) { return std::string(axis_name(a.axis)); })
      .def_property_readonly("values", [](const AxisTemplate& a) { return to_array(a.values); })
      .def_readonly("threshold", &AxisTemplate::threshold)
      .def_readonly("training_true_positives", &AxisTemplate::training_true_positives);

  py::class_<QueryTemplate>(m, "QueryTemplate")
      .def_readonly("behavior_class", &QueryTemplate::behavior_class)
      .def_property_readonly("anchor_axis", [](const QueryTemplate& t) { return std::string(axis_name(t.anchor_axis)); })
      .def_readonly("axes", &QueryTemplate::axes)
      .def_readonly("length", &QueryTemplate::length)
      .def_readonly("source_position", &QueryTemplate::source_position);

  py::class_<Dictionary>(m, "Dictionary")
      .def(py::init<>())
      .def_readonly("templates", &Dictionary::templates)
      .def("find", [](const Dictionary& d, const std::string& c) -> py::object {
        const auto* t = d.find(c);
        return t ? py::cast(*t) : py::none();
      })
      .def("to_json", &dictionary_to_json)
      .def_static("from_json", [](const std::string& s) { return dictionary_from_json(s); })
      .def("__eq__", [](const Dictionary& a, const Dictionary& b) { return a == b; })
      .def("__len__", [](const Dictionary& d) { return d.templates.size(); });

  m.def("build_dictionary",
        [](const MultiAxisSeries& series, const std::vector<LabelInterval>& labels, const py::list& classes,
           std::size_t stride, unsigned threads, bool allow_partial, double match_radius,
           const std::string& threshold_rule) {
          std::vector<ClassConfig> cfg;
          for (const auto& c : classes) cfg.push_back(class_config(c.cast<py::dict>()));
          BuildOptions opt;
          opt.stride = stride;
          opt.threads = threads;
          opt.allow_partial = allow_partial;
          opt.sweep.match_radius = match_radius;
          opt.threshold_rule = parse_threshold_rule(threshold_rule);
          py::gil_scoped_release release;
          return build_dictionary(series, labels, cfg, opt);
        },
        py::arg("series"), py::arg("labels"), py::arg("classes"), py::arg("stride") = 1, py::arg("threads") = 0,
        py::arg("allow_partial") = false, py::arg("match_radius") = std::numeric_limits<double>::infinity(),
        py::arg("threshold_rule") = "midpoint",
        "classes: list of dicts with name, axes ('X,Z'), anchor, min_length, max_length, step (samples).");

  // ---- matcher ----
  py::class_<MatchEvent>(m, "MatchEvent")
      .def_readonly("behavior_class", &MatchEvent::behavior_class)
      .def_readonly("start_index", &MatchEvent::start_index)
      .def_readonly("start_time_s", &MatchEvent::start_time_s)
      .def_readonly("length", &MatchEvent::length)
      .def_property_readonly("distances", [](const MatchEvent& e) {
        std::map<std::string, double> out;
        for (const auto& [a, d] : e.per_axis_distance) out.emplace(std::string(axis_name(a)), d);
        return out;
      })
      .def("__eq__", [](const MatchEvent& a, const MatchEvent& b) { return a == b; });

  m.def("match_stream",
        [](const MultiAxisSeries& s, const Dictionary& d, unsigned threads) {
          MatchOptions opt;
          opt.threads = threads;
          py::gil_scoped_release release;
          return match_stream(s, d, opt);
        },
        py::arg("series"), py::arg("dictionary"), py::arg("threads") = 0);
  m.def("match_windowed",
        [](const MultiAxisSeries& s, const Dictionary& d, std::size_t chunk, std::size_t overlap, unsigned threads) {
          MatchOptions opt;
          opt.threads = threads;
          py::gil_scoped_release release;
          return match_windowed(s, d, chunk, overlap, opt);
        },
        py::arg("series"), py::arg("dictionary"), py::arg("chunk"), py::arg("overlap"), py::arg("threads") = 0);
  m.def("minimum_overlap", &minimum_overlap, py::arg("dictionary"));

  // ---- evaluation ----
  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def_readonly("target_class", &ConfusionMatrix::target_class)
      .def_readonly("tp", &ConfusionMatrix::tp)
      .def_readonly("fp", &ConfusionMatrix::fp)
      .def_readonly("fn", &ConfusionMatrix::fn)
      .def_readonly("tn", &ConfusionMatrix::tn)
      .def_readonly("total_bags", &ConfusionMatrix::total_bags)
      .def_readonly("out_of_bag_matches", &ConfusionMatrix::out_of_bag_matches);

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("precision", &Metrics::precision)
      .def_readonly("recall", &Metrics::recall)
      .def_readonly("accuracy", &Metrics::accuracy)
      .def_readonly("default_rate", &Metrics::default_rate);

  m.def("mil_score",
        [](const std::vector<MatchEvent>& ev, const std::vector<LabelInterval>& labels, const std::string& target) {
          return mil_score(ev, make_bags(labels), target);
        },
        py::arg("events"), py::arg("labels"), py::arg("target_class"));
  m.def("metrics", &metrics, py::arg("confusion"));

  m.def("frequency_profile",
        [](const std::vector<MatchEvent>& ev, double t0, double t1, double window, double stride,
           const std::vector<std::string>& classes) {
          const auto p = frequency_profile(ev, t0, t1, window, stride, classes);
          py::dict out;
          out["window_starts_s"] = p.window_starts_s;
          out["classes"] = p.classes;
          out["counts"] = p.counts;
          return out;
        },
        py::arg("events"), py::arg("t0_s"), py::arg("t1_s"), py::arg("window_length_s") = 3600.0,
        py::arg("stride_s") = 3600.0, py::arg("classes") = std::vector<std::string>{});

  // ---- io and synthesis ----
  m.def("read_sensor_file", &read_sensor_file, py::arg("path"));
  m.def("write_sensor_file", &write_sensor_file, py::arg("path"), py::arg("series"));
  m.def("read_label_file", &read_label_file, py::arg("path"), py::arg("series_length") = py::none());
  m.def("write_label_file",
        [](const std::filesystem::path& p, const std::vector<LabelInterval>& l) { write_label_file(p, l); },
        py::arg("path"), py::arg("labels"));
  m.def("ingest", [](const std::filesystem::path& s, const std::filesystem::path& l) {
        auto r = ingest(s, l);
        return py::make_tuple(std::move(r.series), std::move(r.labels));
      }, py::arg("sensor_path"), py::arg("label_path"));
  m.def("load_dictionary", &load_dictionary, py::arg("path"));
  m.def("save_dictionary", &save_dictionary, py::arg("path"), py::arg("dictionary"));
  m.def("read_events", [](const std::filesystem::path& p) { return read_event_file(p).events; }, py::arg("path"));

  py::class_<Plant>(m, "Plant")
      .def_readonly("behavior_class", &Plant::behavior_class)
      .def_readonly("start_index", &Plant::start_index)
      .def_readonly("length", &Plant::length)
      .def_readonly("interval", &Plant::interval);

  m.def("synth_generate",
        [](const std::string& spec_json, std::uint64_t seed) {
          auto d = synth_generate(synth_spec_from_json(spec_json), seed);
          return py::make_tuple(std::move(d.series), std::move(d.labels), std::move(d.plants));
        },
        py::arg("spec_json"), py::arg("seed"), "Returns (series, labels, plants).");
}
