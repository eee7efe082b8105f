#include "anticipate/reports.hpp"

#include <fstream>
#include <sstream>

#include "anticipate/error.hpp"
#include "anticipate/retrieval.hpp"

namespace anticipate {

using nlohmann::json;

json predictions_to_json(const std::vector<PredictionSet>& predictions, const Taxonomy& tax, const json& config) {
  json rows = json::array();
  for (const auto& p : predictions) {
    json seqs = json::array();
    for (const auto& seq : p.sequences) {
      json actions = json::array();
      for (const auto& a : seq) {
        if (!tax.valid(a)) throw Error(ErrorCode::IdOutOfRange, "prediction for " + p.video_id);
        actions.push_back(json::array({tax.verbs()[a.verb_id], tax.nouns()[a.noun_id]}));
      }
      seqs.push_back(std::move(actions));
    }
    rows.push_back(json{{"video_id", p.video_id}, {"sequences", std::move(seqs)}});
  }
  return json{{"config", config}, {"predictions", std::move(rows)}};
}

std::vector<PredictionSet> predictions_from_json(const json& doc, const Taxonomy& tax) {
  std::vector<PredictionSet> out;
  try {
    for (const auto& row : doc.at("predictions")) {
      PredictionSet p;
      p.video_id = row.at("video_id").get<std::string>();
      for (const auto& seq : row.at("sequences")) {
        ActionSequence actions;
        for (const auto& pair : seq) {
          if (!pair.is_array() || pair.size() != 2) {
            throw Error(ErrorCode::MalformedFile, "action in " + p.video_id + " is not a [verb, noun] pair");
          }
          actions.push_back(tax.resolve(pair[0].get<std::string>(), pair[1].get<std::string>()));
        }
        p.sequences.push_back(std::move(actions));
      }
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("prediction file: ") + e.what());
  }
  return out;
}

std::vector<PredictionSet> read_predictions(const std::filesystem::path& path, const Taxonomy& tax) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedFile, path.string() + ": not valid JSON");
  return predictions_from_json(doc, tax);
}

json ed_report_to_json(const EdReport& report, const json& config) {
  json rows = json::array();
  for (const auto& v : report.videos) {
    rows.push_back(json{{"video_id", v.video_id}, {"verb_ed", v.verb_ed}, {"noun_ed", v.noun_ed},
                        {"action_ed", v.action_ed}});
  }
  return json{{"config", config},
              {"videos", std::move(rows)},
              {"aggregate",
               {{"videos", report.videos.size()},
                {"verb_ed", report.verb_ed},
                {"noun_ed", report.noun_ed},
                {"action_ed", report.action_ed}}}};
}

std::string ed_report_to_text(const EdReport& report) {
  std::ostringstream out;
  out << "video_id\tverb_ed\tnoun_ed\taction_ed\n";
  for (const auto& v : report.videos) {
    out << v.video_id << '\t' << format_double(v.verb_ed) << '\t' << format_double(v.noun_ed) << '\t'
        << format_double(v.action_ed) << '\n';
  }
  out << "mean(" << report.videos.size() << ")\t" << format_double(report.verb_ed) << '\t'
      << format_double(report.noun_ed) << '\t' << format_double(report.action_ed) << '\n';
  return out.str();
}

namespace {

json optional_value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json map_report_to_json(const MapReport& report, const json& config) {
  json per_ratio = json::object();
  for (const auto& [ratio, all] : report.all_by_ratio) {
    per_ratio[std::to_string(ratio)] = json{{"all", all},
                                            {"freq", optional_value(report.freq_by_ratio.at(ratio))},
                                            {"rare", optional_value(report.rare_by_ratio.at(ratio))}};
  }
  return json{{"config", config},
              {"per_ratio", std::move(per_ratio)},
              {"aggregate",
               {{"all", report.all_map}, {"freq", optional_value(report.freq_map)}, {"rare", optional_value(report.rare_map)}}}};
}

std::string map_report_to_text(const MapReport& report) {
  auto show = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("n/a"); };
  std::ostringstream out;
  out << "ratio\tall\tfreq\trare\n";
  for (const auto& [ratio, all] : report.all_by_ratio) {
    out << ratio << '\t' << format_double(all) << '\t' << show(report.freq_by_ratio.at(ratio)) << '\t'
        << show(report.rare_by_ratio.at(ratio)) << '\n';
  }
  out << "mean\t" << format_double(report.all_map) << '\t' << show(report.freq_map) << '\t' << show(report.rare_map)
      << '\n';
  return out.str();
}

std::string render_document(const json& doc) {
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path.string());
  out << text;
}

}  // namespace anticipate
