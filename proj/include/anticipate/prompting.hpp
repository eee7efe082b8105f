#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anticipate/dataset.hpp"
#include "anticipate/taxonomy.hpp"

namespace anticipate {

inline constexpr std::string_view kNarrationsLabel = "Narrations:";
inline constexpr std::string_view kPastActionsLabel = "Past actions:";
inline constexpr std::string_view kCandidateNounsLabel = "Candidate nouns:";
inline constexpr std::string_view kFutureActionsLabel = "Future actions:";

/// "{Z}" in the instruction is replaced by the prediction length.
inline constexpr std::string_view kDefaultInstruction =
    "Predict the next {Z} actions of the person. Each block below lists narrations of what the person "
    "was doing and their past actions, written as (verb, noun). Continue the last block with exactly {Z} "
    "future actions in the form (verb, noun), separated by commas, and end with a period.";

struct PromptOptions {
  bool include_captions = true;
  bool include_noun_list = false;
  std::string instruction{kDefaultInstruction};
  std::size_t max_output_tokens = 80;

  /// Throws InvalidOptions.
  void validate() const;
};

/// What gets rendered for one block, exemplar or query.
struct PromptRecord {
  std::vector<std::string> narrations;
  ActionSequence past_actions;
  ActionSequence future_actions;
  std::vector<std::string> candidate_nouns;
};

PromptRecord to_prompt_record(const ExemplarRecord& exemplar, const Taxonomy& tax);

std::string instruction_for(std::string_view instruction, std::size_t horizon);

/// "(v, n), (v, n), ..."
std::string serialize_actions(const ActionSequence& actions, const Taxonomy& tax);

std::string render_block(const PromptRecord& record, const Taxonomy& tax, const PromptOptions& options,
                         bool with_future);

struct RenderedPrompt {
  std::string text;
  std::vector<std::string> exemplar_ids;
  std::size_t prompt_index = 0;
};

RenderedPrompt compose_prompt(std::span<const ExemplarRecord> exemplars, const PromptRecord& query,
                              const Taxonomy& tax, const PromptOptions& options, std::size_t prompt_index = 0);

struct TopNouns {
  std::vector<std::string> nouns;
  bool fewer_than_five = false;
};

/// Five highest-probability nouns, descending, ties by lowest id.
TopNouns top5_nouns(std::span<const double> distribution, const Taxonomy& tax);

/// Five most frequent nouns of a sequence (count > 0), ties by lowest id.
std::vector<std::string> frequent_nouns(const ActionSequence& actions, const Taxonomy& tax);

}  // namespace anticipate
