#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>

namespace infgrowth {

enum class DetectorKind { kNone, kTransition, kDegenerate };

std::string to_string(DetectorKind kind);

struct TransitionParams {
  double min_range = 0.2;
  double jump_share = 0.5;
};

struct DegenerateParams {
  double min_peak = 100;
  double root_share = 0.01;
};

struct TransitionEvidence {
  std::size_t index = 0;  // the jump is points[index] -> points[index + 1]
  double alpha_from = 0;
  double alpha_to = 0;
  double jump = 0;
  double range = 0;
};

struct DegenerateEvidence {
  int peak_depth = 0;
  std::size_t peak_count = 0;
  std::size_t root_count = 0;
};

struct DetectorReport {
  DetectorKind kind = DetectorKind::kNone;
  TransitionEvidence transition;  // meaningful when kind == kTransition
  DegenerateEvidence degenerate;  // meaningful when kind == kDegenerate
  TransitionParams transition_params;
  DegenerateParams degenerate_params;

  bool fired() const { return kind != DetectorKind::kNone; }
  /// Evidence is emitted only when the detector fired.
  std::string to_json() const;
};

/// Points are (alpha, answered fraction), sorted by alpha. With R the range of
/// fractions and J the largest increase between neighbours, reports a
/// transition iff R >= min_range and J >= jump_share * R.
/// Throws std::invalid_argument for fewer than 3 points or unsorted input.
DetectorReport detect_transition(std::span<const std::pair<double, double>> points, TransitionParams params = {});

/// Degenerate iff the peak count reaches min_peak and the depth-0 count is at
/// most root_share of it. Throws std::invalid_argument on an empty profile.
DetectorReport detect_degenerate(const std::map<int, std::size_t>& profile, DegenerateParams params = {});

}  // namespace infgrowth
