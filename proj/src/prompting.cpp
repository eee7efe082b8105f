#include "anticipate/prompting.hpp"

#include <algorithm>
#include <numeric>

#include "anticipate/error.hpp"

namespace anticipate {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

void PromptOptions::validate() const {
  if (instruction.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::InvalidOptions, "instruction text is empty");
  }
  if (max_output_tokens < 16) throw Error(ErrorCode::InvalidOptions, "max_output_tokens must be >= 16");
}

PromptRecord to_prompt_record(const ExemplarRecord& exemplar, const Taxonomy& tax) {
  return PromptRecord{exemplar.narrations, exemplar.past_actions, exemplar.future_actions,
                      frequent_nouns(exemplar.past_actions, tax)};
}

std::string instruction_for(std::string_view instruction, std::size_t horizon) {
  std::string out(instruction);
  const std::string z = std::to_string(horizon);
  for (auto pos = out.find("{Z}"); pos != std::string::npos; pos = out.find("{Z}", pos + z.size())) {
    out.replace(pos, 3, z);
  }
  return out;
}

std::string serialize_actions(const ActionSequence& actions, const Taxonomy& tax) {
  std::vector<std::string> parts;
  parts.reserve(actions.size());
  for (const auto& a : actions) parts.push_back(tax.label_to_text(a));
  return join(parts, ", ");
}

std::string render_block(const PromptRecord& record, const Taxonomy& tax, const PromptOptions& options,
                         bool with_future) {
  if (with_future && record.future_actions.empty()) {
    throw Error(ErrorCode::MissingFutureActions, "exemplar block has no future actions");
  }
  std::string out;
  if (options.include_captions && !record.narrations.empty()) {
    out += std::string(kNarrationsLabel) + " " + join(record.narrations, "; ") + "\n";
  }
  out += std::string(kPastActionsLabel) + " " + serialize_actions(record.past_actions, tax) + "\n";
  if (options.include_noun_list && !record.candidate_nouns.empty()) {
    out += std::string(kCandidateNounsLabel) + " " + join(record.candidate_nouns, ", ") + "\n";
  }
  out += kFutureActionsLabel;
  if (with_future) out += " " + serialize_actions(record.future_actions, tax);
  return out;
}

RenderedPrompt compose_prompt(std::span<const ExemplarRecord> exemplars, const PromptRecord& query,
                              const Taxonomy& tax, const PromptOptions& options, std::size_t prompt_index) {
  options.validate();
  if (exemplars.empty()) throw Error(ErrorCode::InvalidOptions, "a prompt needs at least one exemplar");
  RenderedPrompt prompt;
  prompt.prompt_index = prompt_index;
  prompt.text = options.instruction + "\n\n";
  for (const auto& ex : exemplars) {
    prompt.text += render_block(to_prompt_record(ex, tax), tax, options, true) + "\n\n";
    prompt.exemplar_ids.push_back(ex.exemplar_id);
  }
  prompt.text += render_block(query, tax, options, false);
  return prompt;
}

TopNouns top5_nouns(std::span<const double> distribution, const Taxonomy& tax) {
  if (distribution.size() != tax.nouns().size()) {
    throw Error(ErrorCode::DimensionMismatch, "noun distribution has " + std::to_string(distribution.size()) +
                                                  " entries for " + std::to_string(tax.nouns().size()) + " nouns");
  }
  std::vector<std::size_t> order(distribution.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return distribution[a] > distribution[b]; });
  TopNouns out;
  out.fewer_than_five = order.size() < 5;
  for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i) out.nouns.push_back(tax.nouns()[order[i]]);
  return out;
}

std::vector<std::string> frequent_nouns(const ActionSequence& actions, const Taxonomy& tax) {
  std::vector<std::size_t> counts(tax.nouns().size(), 0);
  for (const auto& a : actions) {
    if (a.noun_id < counts.size()) ++counts[a.noun_id];
  }
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  std::vector<std::string> out;
  for (std::size_t id : order) {
    if (out.size() == 5 || counts[id] == 0) break;
    out.push_back(tax.nouns()[id]);
  }
  return out;
}

}  // namespace anticipate
