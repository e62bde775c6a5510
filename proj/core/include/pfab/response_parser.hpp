#ifndef PFAB_RESPONSE_PARSER_HPP_
#define PFAB_RESPONSE_PARSER_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pfab {

/// A model response decomposed into its <factual>, <thinking> and
/// <answering> blocks.
///
/// The three blocks are either all present (basic_pattern_ok) or all absent.
struct ParsedResponse {
  std::string raw_text;
  std::optional<std::string> factual_block;
  std::optional<std::string> thinking_block;
  std::optional<std::string> answering_block;
  bool basic_pattern_ok = false;
  // Every opening and closing tag occurs exactly once.
  bool tags_unique = false;
  // Whitespace-delimited token count of raw_text.
  std::size_t token_length = 0;

  bool operator==(const ParsedResponse&) const = default;
};

struct TimeSegment {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool operator==(const TimeSegment&) const = default;
};

struct KeywordReport {
  std::set<std::string> present;
  std::set<std::string> missing;

  bool complete() const { return missing.empty(); }
};

/// The mandatory causal headings a thinking block must traverse.
inline constexpr std::array<std::string_view, 6> kCausalKeywords = {
    "Global Search",  "Causal Verification", "Final Alignment",
    "Antecedent",     "Visual Verification", "Consequence"};

ParsedResponse parse_response(std::string_view text);

/// Case-sensitive substring check of every causal keyword.
KeywordReport check_causal_keywords(std::string_view thinking_block);

/// Pulls "<start> <sep> <end>" pairs (sep one of "to", "-", ",") out of free
/// text, bracketed or not. Pairs with end < start are dropped.
std::vector<TimeSegment> extract_segments(std::string_view answering_block);

/// First standalone A/B/C/D letter, if any.
std::optional<char> extract_choice(std::string_view answering_block);

/// Renders blocks back into the canonical tag template.
std::string render_response(std::string_view factual, std::string_view thinking,
                            std::string_view answering);

std::size_t count_whitespace_tokens(std::string_view text);

}  // namespace pfab

#endif  // PFAB_RESPONSE_PARSER_HPP_
