#ifndef PFAB_REWARDS_HPP_
#define PFAB_REWARDS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfab/response_parser.hpp"

namespace pfab {

/// Raised when a record cannot be scored at all (missing or malformed
/// ground truth). Unparseable model output is never an error.
class InvalidRecordError : public std::runtime_error {
 public:
  InvalidRecordError(std::string record_id, const std::string& what)
      : std::runtime_error(what), record_id_(std::move(record_id)) {}

  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

struct RewardConfig {
  std::size_t l_max = 8192;
  std::size_t l_buffer = 1024;

  std::size_t l_target() const { return l_max - l_buffer; }
  /// Throws std::invalid_argument unless 0 < l_buffer < l_max.
  void validate() const;
};

enum class TaskKind { kGrounding, kMultichoice };

/// Objective order is fixed: format, task, length.
inline constexpr std::array<const char*, 3> kRewardObjectives = {"format", "task",
                                                                 "length"};

struct RewardVector {
  double format = 0.0;
  double task = 0.0;
  double length = 0.0;

  std::array<double, 3> components() const { return {format, task, length}; }
};

struct RewardDiagnostics {
  std::string format;
  std::string task;
  std::string length;
};

struct RecordInput {
  std::string id;
  long long group_id = 0;
  TaskKind task = TaskKind::kGrounding;
  std::string response_text;
  std::optional<std::vector<TimeSegment>> gt_segments;
  std::optional<char> gt_answer;
};

struct ScoredRecord {
  std::string id;
  long long group_id = 0;
  RewardVector reward;
  RewardDiagnostics diagnostics;
};

double format_reward(const ParsedResponse& parsed, const KeywordReport& keywords);

/// Intersection over union of two intervals. Two identical zero-length
/// segments score 1.0; any other zero-measure union scores 0.0.
double segment_iou(const TimeSegment& a, const TimeSegment& b);

/// Hybrid grounding reward. One prediction against several ground-truth
/// segments takes max(coverage ratio, span IoU); every other shape averages
/// the best-matching prediction IoU over the ground-truth segments.
/// Throws std::invalid_argument when gt is empty.
double linear_iou_reward(std::span<const TimeSegment> pred,
                         std::span<const TimeSegment> gt);

/// Fraction of total ground-truth duration covered by `pred`.
double coverage_ratio(const TimeSegment& pred, std::span<const TimeSegment> gt);
TimeSegment segment_hull(std::span<const TimeSegment> segments);

double accuracy_reward(std::optional<char> pred, char gt);

double length_reward(std::size_t length, const RewardConfig& cfg);

ScoredRecord score_record(const RecordInput& record, const RewardConfig& cfg);

}  // namespace pfab

#endif  // PFAB_REWARDS_HPP_
