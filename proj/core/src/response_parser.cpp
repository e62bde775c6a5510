#include "pfab/response_parser.hpp"

#include <cctype>
#include <regex>

namespace pfab {

namespace {

constexpr std::string_view kTagNames[] = {"factual", "thinking", "answering"};

std::string open_tag(std::string_view name) {
  return "<" + std::string(name) + ">";
}

std::string close_tag(std::string_view name) {
  return "</" + std::string(name) + ">";
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::vector<std::size_t> find_all(std::string_view text, std::string_view needle) {
  std::vector<std::size_t> positions;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + 1)) {
    positions.push_back(pos);
  }
  return positions;
}

std::size_t skip_space(std::string_view text, std::size_t pos) {
  while (pos < text.size() && is_space(text[pos])) ++pos;
  return pos;
}

struct BlockSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Backtracking search equivalent to the lazy pattern
//   <factual>(.*?)</factual>\s*<thinking>(.*?)</thinking>\s*<answering>(.*?)</answering>
// evaluated leftmost-first. `block` indexes kTagNames; `from` is where its
// opening tag must start.
bool match_blocks(std::string_view text, std::size_t block, std::size_t from,
                  std::array<BlockSpan, 3>& spans) {
  const auto open = open_tag(kTagNames[block]);
  const auto close = close_tag(kTagNames[block]);
  if (text.compare(from, open.size(), open) != 0) return false;
  const std::size_t content = from + open.size();
  for (auto pos = text.find(close, content); pos != std::string_view::npos;
       pos = text.find(close, pos + 1)) {
    spans[block] = {content, pos};
    if (block + 1 == std::size(kTagNames)) return true;
    const auto next = skip_space(text, pos + close.size());
    if (match_blocks(text, block + 1, next, spans)) return true;
  }
  return false;
}

}  // namespace

std::size_t count_whitespace_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

ParsedResponse parse_response(std::string_view text) {
  ParsedResponse parsed;
  parsed.raw_text = std::string(text);
  parsed.token_length = count_whitespace_tokens(text);

  parsed.tags_unique = true;
  for (auto name : kTagNames) {
    if (find_all(text, open_tag(name)).size() != 1 ||
        find_all(text, close_tag(name)).size() != 1) {
      parsed.tags_unique = false;
      break;
    }
  }

  std::array<BlockSpan, 3> spans{};
  for (auto start : find_all(text, open_tag(kTagNames[0]))) {
    if (!match_blocks(text, 0, start, spans)) continue;
    auto slice = [&](const BlockSpan& s) {
      return std::string(text.substr(s.begin, s.end - s.begin));
    };
    parsed.factual_block = slice(spans[0]);
    parsed.thinking_block = slice(spans[1]);
    parsed.answering_block = slice(spans[2]);
    parsed.basic_pattern_ok = true;
    break;
  }
  return parsed;
}

KeywordReport check_causal_keywords(std::string_view thinking_block) {
  KeywordReport report;
  for (auto keyword : kCausalKeywords) {
    auto& bucket = thinking_block.find(keyword) != std::string_view::npos
                       ? report.present
                       : report.missing;
    bucket.emplace(keyword);
  }
  return report;
}

std::vector<TimeSegment> extract_segments(std::string_view answering_block) {
  static const std::regex kPair(
      R"((\d+(?:\.\d+)?)(?:\s*(?:seconds|secs|sec|s)\b)?\s*(?:to|-|,)\s*)"
      R"((\d+(?:\.\d+)?)(?:\s*(?:seconds|secs|sec|s)\b)?)");
  std::vector<TimeSegment> segments;
  const std::string text(answering_block);
  for (std::sregex_iterator it(text.begin(), text.end(), kPair), last; it != last;
       ++it) {
    const TimeSegment segment{std::stod((*it)[1].str()), std::stod((*it)[2].str())};
    if (segment.end >= segment.start) segments.push_back(segment);
  }
  return segments;
}

std::optional<char> extract_choice(std::string_view answering_block) {
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  };
  for (std::size_t i = 0; i < answering_block.size(); ++i) {
    const char c = answering_block[i];
    if (c < 'A' || c > 'D') continue;
    const bool left_ok = i == 0 || !is_word(answering_block[i - 1]);
    const bool right_ok =
        i + 1 == answering_block.size() || !is_word(answering_block[i + 1]);
    if (left_ok && right_ok) return c;
  }
  return std::nullopt;
}

std::string render_response(std::string_view factual, std::string_view thinking,
                            std::string_view answering) {
  std::string out;
  out.reserve(factual.size() + thinking.size() + answering.size() + 64);
  const std::string_view blocks[] = {factual, thinking, answering};
  for (std::size_t i = 0; i < 3; ++i) {
    out += open_tag(kTagNames[i]);
    out += blocks[i];
    out += close_tag(kTagNames[i]);
  }
  return out;
}

}  // namespace pfab
