#include "anticipate/parsing.hpp"

#include <optional>

#include "anticipate/error.hpp"

namespace anticipate {

namespace {

void check_context(const ParseContext& ctx) {
  if (ctx.taxonomy == nullptr) throw Error(ErrorCode::InvalidConfig, "parse context has no taxonomy");
  if (!ctx.taxonomy->valid(ctx.fallback)) throw Error(ErrorCode::IdOutOfRange, "parse fallback action");
  if (ctx.horizon == 0) throw Error(ErrorCode::InvalidConfig, "prediction horizon must be >= 1");
}

bool overlaps(const LexiconMatch& a, const LexiconMatch& b) { return a.begin < b.end && b.begin < a.end; }

}  // namespace

std::string truncate_first_period(std::string_view raw) {
  return std::string(raw.substr(0, raw.find('.')));
}

std::vector<std::string> split_items(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto piece = text.substr(start, end - start);
    const auto first = piece.find_first_not_of(" \t\r\n\v\f");
    if (first != std::string_view::npos) {
      const auto last = piece.find_last_not_of(" \t\r\n\v\f");
      items.emplace_back(piece.substr(first, last - first + 1));
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ',' || c == '(' || c == ')') {
      flush(i);
      start = i + 1;
    }
  }
  flush(text.size());
  return items;
}

ActionSequence map_items(const std::vector<std::string>& items, const ParseContext& ctx) {
  check_context(ctx);
  const Taxonomy& tax = *ctx.taxonomy;
  std::size_t prev_verb = ctx.fallback.verb_id;
  std::size_t prev_noun = ctx.fallback.noun_id;
  std::optional<std::size_t> pending;
  ActionSequence out;

  auto emit = [&](std::size_t verb, std::size_t noun) {
    out.push_back(ActionLabel{verb, noun});
    prev_verb = verb;
    prev_noun = noun;
    pending.reset();
  };

  for (const auto& raw_item : items) {
    const std::string item = normalize_text(raw_item);
    auto verb = tax.longest_match(item, Lexicon::Verbs);
    auto noun = tax.longest_match(item, Lexicon::Nouns);
    if (verb && noun && overlaps(*verb, *noun)) {
      if (pending) {
        verb.reset();
      } else {
        noun.reset();
      }
    }

    if (verb && noun) {
      if (pending) emit(*pending, prev_noun);
      emit(verb->id, noun->id);
    } else if (verb) {
      if (pending) emit(*pending, prev_noun);
      pending = verb->id;
    } else if (noun) {
      emit(pending.value_or(prev_verb), noun->id);
    } else if (pending) {
      // Blank or unrecognized noun slot.
      emit(*pending, prev_noun);
    } else {
      // Blank or unrecognized verb slot.
      pending = prev_verb;
    }
  }
  if (pending) emit(*pending, prev_noun);
  return out;
}

ActionSequence pad_to_horizon(const ActionSequence& seq, std::size_t horizon) {
  if (seq.empty()) throw Error(ErrorCode::EmptySequence, "cannot pad an empty sequence");
  ActionSequence out(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(std::min(seq.size(), horizon)));
  while (out.size() < horizon) out.push_back(out.back());
  return out;
}

ActionSequence parse_output(std::string_view raw, const ParseContext& ctx) {
  check_context(ctx);
  const std::string lowered = normalize_text(truncate_first_period(raw));
  ActionSequence actions = map_items(split_items(lowered), ctx);
  if (actions.empty()) actions.push_back(ctx.fallback);
  return pad_to_horizon(actions, ctx.horizon);
}

}  // namespace anticipate
