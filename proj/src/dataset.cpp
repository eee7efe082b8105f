#include "anticipate/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "anticipate/error.hpp"

namespace anticipate {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::MalformedFile, where + ": missing \"" + key + "\"");
  }
  return obj.at(key);
}

ActionLabel gt_of(const Segment& seg, const std::string& video_id) {
  if (!seg.gt_action) {
    throw Error(ErrorCode::UnknownLabel,
                "video " + video_id + " segment " + std::to_string(seg.index) + " has no ground-truth action");
  }
  return *seg.gt_action;
}

VideoRecord parse_video(const json& jv, const Taxonomy& tax, const std::string& file) {
  VideoRecord video;
  try {
    video.video_id = require(jv, "video_id", file).get<std::string>();
    const std::string where = file + " video " + video.video_id;
    const json& segs = require(jv, "segments", where);
    if (!segs.is_array()) throw Error(ErrorCode::MalformedFile, where + ": segments is not an array");
    for (const auto& js : segs) {
      Segment seg;
      seg.index = video.segments.size();
      seg.start_s = require(js, "start_s", where).get<double>();
      seg.end_s = require(js, "end_s", where).get<double>();
      const bool has_verb = js.contains("verb");
      const bool has_noun = js.contains("noun");
      if (has_verb != has_noun) {
        throw Error(ErrorCode::MalformedFile, where + ": segment " + std::to_string(seg.index) +
                                                  " must carry both verb and noun or neither");
      }
      if (has_verb) {
        const auto verb = js.at("verb").get<std::string>();
        const auto noun = js.at("noun").get<std::string>();
        try {
          seg.gt_action = tax.resolve(verb, noun);
        } catch (const Error& e) {
          throw Error(ErrorCode::UnknownLabel,
                      std::string(e.what()) + " in " + where + " segment " + std::to_string(seg.index));
        }
      }
      if (js.contains("narration")) seg.narration = js.at("narration").get<std::string>();
      if (!(seg.start_s < seg.end_s)) {
        throw Error(ErrorCode::NonMonotoneSegments,
                    where + ": segment " + std::to_string(seg.index) + " has start_s >= end_s");
      }
      if (!video.segments.empty() && seg.start_s < video.segments.back().start_s) {
        throw Error(ErrorCode::NonMonotoneSegments,
                    where + ": segment " + std::to_string(seg.index) + " starts before its predecessor");
      }
      video.segments.push_back(std::move(seg));
    }
    video.observed_count = jv.contains("observed_count") ? jv.at("observed_count").get<std::size_t>()
                                                         : video.segments.size();
    if (video.observed_count > video.segments.size()) {
      throw Error(ErrorCode::MalformedFile, where + ": observed_count exceeds segment count");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, file + ": " + e.what());
  }
  return video;
}

}  // namespace

ActionSequence VideoRecord::observed_actions() const {
  ActionSequence out;
  for (std::size_t i = 0; i < observed_count && i < segments.size(); ++i) out.push_back(gt_of(segments[i], video_id));
  return out;
}

ActionSequence VideoRecord::future_actions(std::size_t limit) const {
  ActionSequence out;
  for (std::size_t i = observed_count; i < segments.size() && out.size() < limit; ++i) {
    out.push_back(gt_of(segments[i], video_id));
  }
  return out;
}

std::vector<Segment> VideoRecord::observed_segments() const {
  return {segments.begin(), segments.begin() + static_cast<std::ptrdiff_t>(observed_count)};
}

std::vector<ExemplarRecord> build_exemplars(const VideoRecord& video, const ExemplarWindowing& windowing) {
  std::vector<ExemplarRecord> out;
  const std::size_t span = windowing.past + windowing.future;
  if (windowing.past == 0 || video.segments.size() < span) return out;
  const std::size_t stride = windowing.past;
  for (std::size_t start = 0; start + span <= video.segments.size(); start += stride) {
    ExemplarRecord rec;
    rec.exemplar_id = video.video_id + "@" + std::to_string(start);
    bool complete = true;
    bool narrated = true;
    for (std::size_t i = start; i < start + span; ++i) {
      const Segment& seg = video.segments[i];
      if (!seg.gt_action) {
        complete = false;
        break;
      }
      if (i < start + windowing.past) {
        rec.past_actions.push_back(*seg.gt_action);
        if (seg.narration && !seg.narration->empty()) {
          rec.narrations.push_back(*seg.narration);
        } else {
          narrated = false;
        }
      } else {
        rec.future_actions.push_back(*seg.gt_action);
      }
    }
    if (!narrated) rec.narrations.clear();
    if (complete) out.push_back(std::move(rec));
    if (windowing.mode == ExemplarWindowing::Mode::PerVideo) break;
  }
  return out;
}

Dataset ingest_dataset(const std::filesystem::path& path, const Taxonomy& tax, const ExemplarWindowing& windowing) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + file);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, file + ": " + e.what());
  }
  Dataset ds;
  try {
    ds.split = require(doc, "split", file).get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, file + ": " + e.what());
  }
  const json& videos = require(doc, "videos", file);
  if (!videos.is_array()) throw Error(ErrorCode::MalformedFile, file + ": videos is not an array");
  for (const auto& jv : videos) ds.videos.push_back(parse_video(jv, tax, file));
  if (ds.split == "train") {
    for (const auto& v : ds.videos) {
      auto recs = build_exemplars(v, windowing);
      ds.exemplars.insert(ds.exemplars.end(), std::make_move_iterator(recs.begin()),
                          std::make_move_iterator(recs.end()));
    }
  }
  return ds;
}

ObservedPrefix observed_prefix_by_ratio(const VideoRecord& video, int ratio_percent) {
  if (video.segments.empty() || !(video.segments.back().end_s > 0.0)) {
    throw Error(ErrorCode::EmptyVideo, "video " + video.video_id);
  }
  const double cutoff = ratio_percent / 100.0 * video.segments.back().end_s;
  ObservedPrefix out;
  std::size_t count = 0;
  while (count < video.segments.size() && video.segments[count].end_s <= cutoff) ++count;
  if (count == 0) count = 1;
  out.observed.assign(video.segments.begin(), video.segments.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = count; i < video.segments.size(); ++i) {
    if (video.segments[i].gt_action) out.remaining_verbs.insert(video.segments[i].gt_action->verb_id);
  }
  return out;
}

}  // namespace anticipate
