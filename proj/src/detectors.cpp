#include "infgrowth/detectors.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace infgrowth {

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kTransition: return "transition";
    case DetectorKind::kDegenerate: return "degenerate";
    default: return "none";
  }
}

std::string DetectorReport::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  if (kind == DetectorKind::kTransition) {
    j["evidence"] = {{"index", transition.index},     {"alpha_from", transition.alpha_from},
                     {"alpha_to", transition.alpha_to}, {"jump", transition.jump},
                     {"range", transition.range}};
    j["parameters"] = {{"min_range", transition_params.min_range}, {"jump_share", transition_params.jump_share}};
  } else if (kind == DetectorKind::kDegenerate) {
    j["evidence"] = {{"peak_depth", degenerate.peak_depth},
                     {"peak_count", degenerate.peak_count},
                     {"root_count", degenerate.root_count}};
    j["parameters"] = {{"min_peak", degenerate_params.min_peak}, {"root_share", degenerate_params.root_share}};
  }
  return j.dump();
}

DetectorReport detect_transition(std::span<const std::pair<double, double>> points, TransitionParams params) {
  if (points.size() < 3) throw std::invalid_argument("transition detection needs at least 3 points");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first < points[i - 1].first) throw std::invalid_argument("points must be sorted by alpha");

  DetectorReport r;
  r.transition_params = params;
  auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  const double range = hi->second - lo->second;
  double best = 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double d = points[i + 1].second - points[i].second;
    if (d > best) best = d, at = i;
  }
  if (range > 0 && range >= params.min_range && best >= params.jump_share * range) {
    r.kind = DetectorKind::kTransition;
    r.transition = {at, points[at].first, points[at + 1].first, best, range};
  }
  return r;
}

DetectorReport detect_degenerate(const std::map<int, std::size_t>& profile, DegenerateParams params) {
  if (profile.empty()) throw std::invalid_argument("empty depth profile");
  DetectorReport r;
  r.degenerate_params = params;
  int peak_depth = profile.begin()->first;
  std::size_t peak = 0;
  for (const auto& [d, n] : profile)
    if (n > peak) peak = n, peak_depth = d;
  auto root = profile.find(0);
  std::size_t root_count = root == profile.end() ? 0 : root->second;
  const double p = static_cast<double>(peak);
  if (p >= params.min_peak && static_cast<double>(root_count) <= params.root_share * p) {
    r.kind = DetectorKind::kDegenerate;
    r.degenerate = {peak_depth, peak, root_count};
  }
  return r;
}

}  // namespace infgrowth
