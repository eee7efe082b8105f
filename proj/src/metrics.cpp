#include "anticipate/metrics.hpp"

#include <memory>
#include <numeric>

#include "anticipate/error.hpp"

namespace anticipate {

namespace {

std::vector<std::size_t> verbs_of(const ActionSequence& seq) {
  std::vector<std::size_t> out;
  out.reserve(seq.size());
  for (const auto& a : seq) out.push_back(a.verb_id);
  return out;
}

std::vector<std::size_t> nouns_of(const ActionSequence& seq) {
  std::vector<std::size_t> out;
  out.reserve(seq.size());
  for (const auto& a : seq) out.push_back(a.noun_id);
  return out;
}

}  // namespace

void PredictionSet::validate(std::size_t horizon, const Taxonomy* tax) const {
  if (sequences.empty()) throw Error(ErrorCode::LengthMismatch, "prediction set " + video_id + " is empty");
  for (const auto& seq : sequences) {
    if (seq.size() != horizon) {
      throw Error(ErrorCode::LengthMismatch, "prediction for " + video_id + " has " + std::to_string(seq.size()) +
                                                 " actions, expected " + std::to_string(horizon));
    }
    if (tax != nullptr) {
      for (const auto& a : seq) {
        if (!tax->valid(a)) throw Error(ErrorCode::IdOutOfRange, "prediction for " + video_id);
      }
    }
  }
}

VideoEd ed_report(const PredictionSet& preds, const ActionSequence& gt, DlVariant variant) {
  if (gt.empty()) throw Error(ErrorCode::LengthMismatch, "empty ground truth for " + preds.video_id);
  preds.validate(gt.size());
  const auto gt_verbs = verbs_of(gt);
  const auto gt_nouns = nouns_of(gt);
  std::size_t best_verb = SIZE_MAX, best_noun = SIZE_MAX, best_action = SIZE_MAX;
  for (const auto& seq : preds.sequences) {
    const auto v = verbs_of(seq);
    const auto n = nouns_of(seq);
    best_verb = std::min(best_verb, dl_distance<std::size_t>(v, gt_verbs, variant));
    best_noun = std::min(best_noun, dl_distance<std::size_t>(n, gt_nouns, variant));
    best_action = std::min(best_action, dl_distance<ActionLabel>(seq, gt, variant));
  }
  const auto z = static_cast<double>(gt.size());
  return VideoEd{preds.video_id, static_cast<double>(best_verb) / z, static_cast<double>(best_noun) / z,
                 static_cast<double>(best_action) / z};
}

EdReport aggregate_ed(std::vector<VideoEd> per_video) {
  std::sort(per_video.begin(), per_video.end(),
            [](const VideoEd& a, const VideoEd& b) { return a.video_id < b.video_id; });
  EdReport report;
  for (const auto& v : per_video) {
    report.verb_ed += v.verb_ed;
    report.noun_ed += v.noun_ed;
    report.action_ed += v.action_ed;
  }
  if (!per_video.empty()) {
    const auto count = static_cast<double>(per_video.size());
    report.verb_ed /= count;
    report.noun_ed /= count;
    report.action_ed /= count;
  }
  report.videos = std::move(per_video);
  return report;
}

double average_precision(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

std::vector<double> verb_scores(const PredictionSet& preds, std::size_t verb_count) {
  std::vector<double> scores(verb_count, 0.0);
  std::size_t slots = 0;
  for (const auto& seq : preds.sequences) {
    for (const auto& a : seq) {
      if (a.verb_id >= verb_count) throw Error(ErrorCode::IdOutOfRange, "verb id in prediction " + preds.video_id);
      scores[a.verb_id] += 1.0;
      ++slots;
    }
  }
  if (slots > 0) {
    for (double& s : scores) s /= static_cast<double>(slots);
  }
  return scores;
}

MapReport map_report(const std::map<int, RatioInputs>& by_ratio, const MapSplits& splits) {
  if (splits.all.empty()) throw Error(ErrorCode::EmptySplit, "ALL class list is empty");
  MapReport report;
  auto split_mean = [](const std::vector<std::size_t>& classes, const std::map<std::size_t, double>& ap)
      -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c : classes) {
      auto it = ap.find(c);
      if (it == ap.end()) continue;
      sum += it->second;
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };

  std::vector<double> all_values, freq_values, rare_values;
  for (const auto& [ratio, inputs] : by_ratio) {
    if (inputs.scores.size() != inputs.remaining_verbs.size()) {
      throw Error(ErrorCode::LengthMismatch, "scores and remaining sets differ at R=" + std::to_string(ratio));
    }
    std::set<std::size_t> wanted(splits.all.begin(), splits.all.end());
    wanted.insert(splits.freq.begin(), splits.freq.end());
    wanted.insert(splits.rare.begin(), splits.rare.end());
    std::map<std::size_t, double> ap;
    for (std::size_t c : wanted) {
      const std::size_t videos = inputs.scores.size();
      std::vector<double> s(videos);
      auto labels = std::make_unique<bool[]>(videos);
      bool any_positive = false;
      for (std::size_t v = 0; v < videos; ++v) {
        if (c >= inputs.scores[v].size()) throw Error(ErrorCode::IdOutOfRange, "class " + std::to_string(c));
        s[v] = inputs.scores[v][c];
        labels[v] = inputs.remaining_verbs[v].count(c) != 0;
        any_positive = any_positive || labels[v];
      }
      if (!any_positive) continue;
      ap[c] = average_precision(s, std::span<const bool>(labels.get(), videos));
    }
    auto all = split_mean(splits.all, ap);
    if (all) {
      report.all_by_ratio[ratio] = *all;
      all_values.push_back(*all);
    }
    report.freq_by_ratio[ratio] = splits.freq.empty() ? std::nullopt : split_mean(splits.freq, ap);
    report.rare_by_ratio[ratio] = splits.rare.empty() ? std::nullopt : split_mean(splits.rare, ap);
    if (report.freq_by_ratio[ratio]) freq_values.push_back(*report.freq_by_ratio[ratio]);
    if (report.rare_by_ratio[ratio]) rare_values.push_back(*report.rare_by_ratio[ratio]);
  }
  auto mean = [](const std::vector<double>& xs) -> std::optional<double> {
    if (xs.empty()) return std::nullopt;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };
  auto all = mean(all_values);
  if (!all) throw Error(ErrorCode::EmptySplit, "no ALL class has a positive at any ratio");
  report.all_map = *all;
  report.freq_map = mean(freq_values);
  report.rare_map = mean(rare_values);
  return report;
}

}  // namespace anticipate
