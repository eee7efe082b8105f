#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "anticipate/taxonomy.hpp"

namespace anticipate {

/// Marker language models emit for a slot they could not fill.
inline constexpr std::string_view kBlankToken = "___";

struct ParseContext {
  const Taxonomy* taxonomy = nullptr;
  ActionLabel fallback;  // last observed past action
  std::size_t horizon = 20;  // Z
};

std::string truncate_first_period(std::string_view raw);

/// Splits on ',', '(' and ')', trims whitespace, drops empty items.
std::vector<std::string> split_items(std::string_view text);

/// Rule-based mapping of items onto taxonomy labels.
///
/// A verb-only item opens a pending action that the next noun-bearing item
/// closes. Missing components (blank "___" items, unmatched items, a pending
/// verb followed by another verb) borrow the most recent emitted verb or noun,
/// seeded from the context fallback. When an item's verb and noun matches
/// overlap, its position decides: it is a noun if a verb is pending, else a verb.
ActionSequence map_items(const std::vector<std::string>& items, const ParseContext& ctx);

/// Repeats the last action up to `horizon`, or keeps the first `horizon`. Throws EmptySequence.
ActionSequence pad_to_horizon(const ActionSequence& seq, std::size_t horizon);

/// Total: always returns exactly ctx.horizon valid labels.
ActionSequence parse_output(std::string_view raw, const ParseContext& ctx);

}  // namespace anticipate
