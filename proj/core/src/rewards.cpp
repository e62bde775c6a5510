#include "pfab/rewards.hpp"

#include <algorithm>
#include <numeric>

namespace pfab {

void RewardConfig::validate() const {
  if (l_buffer == 0 || l_buffer >= l_max) {
    throw std::invalid_argument("reward config requires 0 < l_buffer < l_max");
  }
}

double format_reward(const ParsedResponse& parsed, const KeywordReport& keywords) {
  if (!parsed.basic_pattern_ok) return 0.0;
  if (parsed.tags_unique && keywords.complete()) return 1.0;
  return 0.5;
}

double segment_iou(const TimeSegment& a, const TimeSegment& b) {
  const double intersection =
      std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double union_length = a.length() + b.length() - intersection;
  if (union_length <= 0.0) return a == b ? 1.0 : 0.0;
  return intersection / union_length;
}

TimeSegment segment_hull(std::span<const TimeSegment> segments) {
  TimeSegment hull = segments.front();
  for (const auto& s : segments) {
    hull.start = std::min(hull.start, s.start);
    hull.end = std::max(hull.end, s.end);
  }
  return hull;
}

double coverage_ratio(const TimeSegment& pred, std::span<const TimeSegment> gt) {
  double covered = 0.0;
  double total = 0.0;
  for (const auto& g : gt) {
    covered += std::max(0.0, std::min(pred.end, g.end) - std::max(pred.start, g.start));
    total += g.length();
  }
  return total > 0.0 ? covered / total : 0.0;
}

double linear_iou_reward(std::span<const TimeSegment> pred,
                         std::span<const TimeSegment> gt) {
  if (gt.empty()) {
    throw std::invalid_argument("linear_iou_reward requires ground-truth segments");
  }
  if (pred.empty()) return 0.0;
  if (pred.size() == 1 && gt.size() > 1) {
    return std::max(coverage_ratio(pred.front(), gt),
                    segment_iou(pred.front(), segment_hull(gt)));
  }
  double sum = 0.0;
  for (const auto& g : gt) {
    double best = 0.0;
    for (const auto& p : pred) best = std::max(best, segment_iou(p, g));
    sum += best;
  }
  return sum / static_cast<double>(gt.size());
}

double accuracy_reward(std::optional<char> pred, char gt) {
  return pred.has_value() && *pred == gt ? 1.0 : 0.0;
}

double length_reward(std::size_t length, const RewardConfig& cfg) {
  if (length <= cfg.l_target()) return 1.0;
  if (length > cfg.l_max) return 0.0;
  return 1.0 - static_cast<double>(length - cfg.l_target()) /
                   static_cast<double>(cfg.l_buffer);
}

namespace {

std::string join_keywords(const std::set<std::string>& keywords) {
  std::string out;
  for (const auto& k : keywords) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

}  // namespace

ScoredRecord score_record(const RecordInput& record, const RewardConfig& cfg) {
  cfg.validate();
  ScoredRecord scored{record.id, record.group_id, {}, {}};
  if (record.group_id < 0) {
    throw InvalidRecordError(record.id, "group_id must be nonnegative");
  }

  if (record.task == TaskKind::kGrounding) {
    if (!record.gt_segments || record.gt_segments->empty()) {
      throw InvalidRecordError(record.id, "grounding record requires gt_segments");
    }
    for (const auto& s : *record.gt_segments) {
      if (!(s.start >= 0.0) || !(s.end >= s.start)) {
        throw InvalidRecordError(record.id, "gt_segments entries must satisfy 0 <= start <= end");
      }
    }
  } else {
    if (!record.gt_answer) {
      throw InvalidRecordError(record.id, "multichoice record requires gt_answer");
    }
    if (*record.gt_answer < 'A' || *record.gt_answer > 'D') {
      throw InvalidRecordError(record.id, "gt_answer must be one of A, B, C, D");
    }
  }

  const auto parsed = parse_response(record.response_text);
  const auto keywords = check_causal_keywords(parsed.thinking_block.value_or(""));

  scored.reward.format = format_reward(parsed, keywords);
  if (!parsed.basic_pattern_ok) {
    scored.diagnostics.format = "pattern mismatch";
  } else if (scored.reward.format == 1.0) {
    scored.diagnostics.format = "complete structure";
  } else {
    std::string why;
    if (!parsed.tags_unique) why = "duplicate tags";
    if (!keywords.complete()) {
      if (!why.empty()) why += "; ";
      why += "missing keywords: " + join_keywords(keywords.missing);
    }
    scored.diagnostics.format = "basic structure only (" + why + ")";
  }

  const std::string answer = parsed.answering_block.value_or("");
  if (record.task == TaskKind::kGrounding) {
    const auto pred = extract_segments(answer);
    const auto& gt = *record.gt_segments;
    scored.reward.task = linear_iou_reward(pred, gt);
    if (pred.empty()) {
      scored.diagnostics.task = "no segments parsed";
    } else if (pred.size() == 1 && gt.size() > 1) {
      const double coverage = coverage_ratio(pred.front(), gt);
      const double span = segment_iou(pred.front(), segment_hull(gt));
      scored.diagnostics.task =
          coverage >= span ? "single prediction: coverage ratio"
                           : "single prediction: span iou";
    } else {
      scored.diagnostics.task = "best-match iou over " + std::to_string(gt.size()) +
                                " ground-truth segment(s)";
    }
  } else {
    const auto pred = extract_choice(answer);
    scored.reward.task = accuracy_reward(pred, *record.gt_answer);
    if (!pred) {
      scored.diagnostics.task = "no choice parsed";
    } else {
      scored.diagnostics.task = std::string("predicted ") + *pred +
                                (scored.reward.task == 1.0 ? ", correct" : ", wrong");
    }
  }

  scored.reward.length = length_reward(parsed.token_length, cfg);
  const auto tokens = std::to_string(parsed.token_length);
  if (parsed.token_length <= cfg.l_target()) {
    scored.diagnostics.length = tokens + " tokens within target";
  } else if (parsed.token_length <= cfg.l_max) {
    scored.diagnostics.length = tokens + " tokens in buffer zone";
  } else {
    scored.diagnostics.length = tokens + " tokens over l_max";
  }
  return scored;
}

}  // namespace pfab
