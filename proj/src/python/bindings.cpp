#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "anticipate/backend.hpp"
#include "anticipate/cli.hpp"
#include "anticipate/error.hpp"
#include "anticipate/metrics.hpp"
#include "anticipate/parsing.hpp"
#include "anticipate/prompting.hpp"
#include "anticipate/retrieval.hpp"

namespace py = pybind11;
using namespace anticipate;

namespace {

// JSON crosses the boundary as text; Python's json module does the conversion.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

using Pair = std::pair<std::size_t, std::size_t>;

ActionSequence to_actions(const std::vector<Pair>& pairs) {
  ActionSequence out;
  out.reserve(pairs.size());
  for (const auto& [v, n] : pairs) out.push_back({v, n});
  return out;
}

std::vector<Pair> from_actions(const ActionSequence& seq) {
  std::vector<Pair> out;
  out.reserve(seq.size());
  for (const auto& a : seq) out.emplace_back(a.verb_id, a.noun_id);
  return out;
}

DlVariant parse_variant(const std::string& name) {
  if (name == "osa") return DlVariant::Osa;
  if (name == "unrestricted") return DlVariant::Unrestricted;
  throw Error(ErrorCode::InvalidOptions, "unknown DL variant \"" + name + "\"");
}

EmbeddingStore to_store(const std::map<std::string, std::vector<double>>& vectors) {
  EmbeddingStore store(vectors.empty() ? 0 : vectors.begin()->second.size());
  for (const auto& [id, v] : vectors) store.add(id, v);
  return store;
}

nlohmann::json response_json(const ResponseBody& body) { return response_payload_to_json(body); }

}  // namespace

PYBIND11_MODULE(_anticipate, m) {
  m.doc() = "Core routines and backend wire protocol of the anticipate toolkit.";

  // Messages start with the error code name, e.g. "UnknownLabel: ...".
  py::register_exception<Error>(m, "AnticipateError", PyExc_ValueError);

  m.def(
      "dl_distance",
      [](const std::vector<long long>& a, const std::vector<long long>& b, const std::string& variant) {
        return dl_distance(std::span<const long long>(a), std::span<const long long>(b), parse_variant(variant));
      },
      py::arg("a"), py::arg("b"), py::arg("variant") = "osa");

  m.def(
      "ed_report",
      [](const std::vector<std::vector<Pair>>& candidates, const std::vector<Pair>& gt, const std::string& variant) {
        PredictionSet preds{"", {}};
        for (const auto& c : candidates) preds.sequences.push_back(to_actions(c));
        const VideoEd ed = ed_report(preds, to_actions(gt), parse_variant(variant));
        return py::dict(py::arg("verb_ed") = ed.verb_ed, py::arg("noun_ed") = ed.noun_ed,
                        py::arg("action_ed") = ed.action_ed);
      },
      py::arg("candidates"), py::arg("gt"), py::arg("variant") = "osa");

  m.def(
      "average_precision",
      [](const std::vector<double>& scores, const std::vector<bool>& labels) {
        const std::unique_ptr<bool[]> flags(new bool[labels.size()]);
        for (std::size_t i = 0; i < labels.size(); ++i) flags[i] = labels[i];
        return average_precision(scores, std::span<const bool>(flags.get(), labels.size()));
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "select_mmr",
      [](const std::vector<double>& query, const std::map<std::string, std::vector<double>>& pool, double lambda,
         std::size_t count) { return select_mmr(query, to_store(pool), lambda, count); },
      py::arg("query"), py::arg("pool"), py::arg("lam"), py::arg("count"));

  m.def(
      "select_similar",
      [](const std::vector<double>& query, const std::map<std::string, std::vector<double>>& pool, std::size_t count) {
        return select_similar(query, to_store(pool), count);
      },
      py::arg("query"), py::arg("pool"), py::arg("count"));

  m.def(
      "parse_output",
      [](const std::string& raw, std::vector<std::string> verbs, std::vector<std::string> nouns, const Pair& fallback,
         std::size_t horizon) {
        const Taxonomy tax(std::move(verbs), std::move(nouns));
        return from_actions(parse_output(raw, ParseContext{&tax, {fallback.first, fallback.second}, horizon}));
      },
      py::arg("raw"), py::arg("verbs"), py::arg("nouns"), py::arg("fallback"), py::arg("horizon"));

  m.def(
      "serialize_actions",
      [](const std::vector<Pair>& actions, std::vector<std::string> verbs, std::vector<std::string> nouns) {
        const Taxonomy tax(std::move(verbs), std::move(nouns));
        return serialize_actions(to_actions(actions), tax);
      },
      py::arg("actions"), py::arg("verbs"), py::arg("nouns"));

  // Wire protocol, for adapters written in Python.
  m.def(
      "parse_request",
      [](const std::string& line) {
        const BackendRequest req = parse_request(line);
        nlohmann::json j = request_to_json(req.body);
        j["id"] = req.id;
        return to_python(j);
      },
      py::arg("line"));

  m.def(
      "frame_response",
      [](std::uint64_t id, const py::object& payload) {
        return frame_response(BackendResponse{id, response_payload_from_json(from_python(payload))});
      },
      py::arg("id"), py::arg("payload"));

  m.def(
      "canonical_key", [](const py::object& request) { return canonical_key(request_from_json(from_python(request))); },
      py::arg("request"));

  m.def("prompt_hash", [](const std::string& prompt) { return prompt_hash(prompt); }, py::arg("prompt"));

  m.def(
      "load_fixture",
      [](const std::string& path) {
        nlohmann::json doc = nlohmann::json::array();
        for (const auto& rec : load_fixture(path)) {
          doc.push_back({{"request", rec.request}, {"response", response_json(rec.response)}});
        }
        return to_python(doc);
      },
      py::arg("path"));

  m.def(
      "save_fixture",
      [](const std::string& path, const py::object& records) {
        std::vector<FixtureRecord> out;
        for (const auto& rec : from_python(records)) {
          out.push_back(FixtureRecord{rec.at("request"), response_payload_from_json(rec.at("response"))});
        }
        save_fixture(path, out);
      },
      py::arg("path"), py::arg("records"));

  py::class_<MockBackend>(m, "MockBackend")
      .def(py::init([](const std::string& path) { return std::make_unique<MockBackend>(std::filesystem::path(path)); }),
           py::arg("fixture"))
      .def(
          "lookup",
          [](const MockBackend& mock, const py::object& request) {
            return to_python(response_json(mock.lookup(request_from_json(from_python(request)))));
          },
          py::arg("request"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"anticipate"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
