#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anticipate/dataset.hpp"
#include "anticipate/metrics.hpp"
#include "anticipate/retrieval.hpp"

namespace anticipate {

/// K copies of Z repetitions of the last past action. Throws EmptyPast.
PredictionSet predict_last(const ActionSequence& past, std::size_t horizon, std::size_t candidates);

/// K copies of the past repeated cyclically and cut to Z. Throws EmptyPast.
PredictionSet predict_repeat(const ActionSequence& past, std::size_t horizon, std::size_t candidates);

/// Futures of the K nearest exemplars by cosine, each padded or cut to Z.
PredictionSet predict_retrieve(std::span<const double> query, const EmbeddingStore& store,
                               std::span<const ExemplarRecord> exemplars, std::size_t horizon,
                               std::size_t candidates);

}  // namespace anticipate
