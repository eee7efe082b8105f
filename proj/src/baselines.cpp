#include "anticipate/baselines.hpp"

#include <unordered_map>

#include "anticipate/error.hpp"
#include "anticipate/parsing.hpp"

namespace anticipate {

PredictionSet predict_last(const ActionSequence& past, std::size_t horizon, std::size_t candidates) {
  if (past.empty()) throw Error(ErrorCode::EmptyPast, "last-action baseline needs a past action");
  PredictionSet out;
  out.sequences.assign(candidates, ActionSequence(horizon, past.back()));
  return out;
}

PredictionSet predict_repeat(const ActionSequence& past, std::size_t horizon, std::size_t candidates) {
  if (past.empty()) throw Error(ErrorCode::EmptyPast, "repeat baseline needs a past action");
  ActionSequence seq;
  seq.reserve(horizon);
  for (std::size_t i = 0; i < horizon; ++i) seq.push_back(past[i % past.size()]);
  PredictionSet out;
  out.sequences.assign(candidates, seq);
  return out;
}

PredictionSet predict_retrieve(std::span<const double> query, const EmbeddingStore& store,
                               std::span<const ExemplarRecord> exemplars, std::size_t horizon,
                               std::size_t candidates) {
  std::unordered_map<std::string, const ExemplarRecord*> by_id;
  for (const auto& ex : exemplars) by_id.emplace(ex.exemplar_id, &ex);
  PredictionSet out;
  for (const auto& id : select_similar(query, store, candidates)) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::UnknownLabel, "embedding " + id + " has no exemplar record");
    if (it->second->future_actions.empty()) {
      throw Error(ErrorCode::MissingFutureActions, "exemplar " + id + " has no future actions");
    }
    out.sequences.push_back(pad_to_horizon(it->second->future_actions, horizon));
  }
  return out;
}

}  // namespace anticipate
