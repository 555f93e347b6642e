#include "tplan/assessment.hpp"

#include <algorithm>
#include <cmath>

#include "tplan/allen.hpp"
#include "tplan/error.hpp"

namespace tplan {

namespace {

double truth(double x, Sense sense, double eps) {
  if (eps <= 0.0) {
    switch (sense) {
      case Sense::kZero:
        return x == 0.0 ? 1.0 : 0.0;
      case Sense::kPositive:
        return x > 0.0 ? 1.0 : 0.0;
      case Sense::kNegative:
        return x < 0.0 ? 1.0 : 0.0;
    }
  }
  switch (sense) {
    case Sense::kZero:
      return std::max(0.0, 1.0 - std::abs(x) / eps);
    case Sense::kPositive:
      return std::clamp(0.5 + x / (2.0 * eps), 0.0, 1.0);
    case Sense::kNegative:
      return std::clamp(0.5 - x / (2.0 * eps), 0.0, 1.0);
  }
  return 0.0;
}

RelationScores inverse_scores(const RelationScores& s) {
  RelationScores out{};
  for (auto r : kAllRelations) out[index_of(inverse(r))] = s[index_of(r)];
  return out;
}

std::string pair_label(const ActionPair& p) {
  return "('" + p.first.label() + "', '" + p.second.label() + "')";
}

}  // namespace

void RelationScoreTable::set(const ActionPair& pair,
                             const RelationScores& scores) {
  if (pair.first < pair.second) {
    table_[pair] = scores;
  } else {
    table_[reversed(pair)] = inverse_scores(scores);
  }
}

bool RelationScoreTable::contains(const ActionPair& pair) const {
  return table_.count(pair) || table_.count(reversed(pair));
}

double RelationScoreTable::score(const ActionPair& pair,
                                 AllenRelation r) const {
  if (auto it = table_.find(pair); it != table_.end()) {
    return it->second[index_of(r)];
  }
  if (auto it = table_.find(reversed(pair)); it != table_.end()) {
    return it->second[index_of(inverse(r))];
  }
  return 0.0;
}

RelationScores RelationScoreTable::scores(const ActionPair& pair) const {
  if (auto it = table_.find(pair); it != table_.end()) return it->second;
  if (auto it = table_.find(reversed(pair)); it != table_.end()) {
    return inverse_scores(it->second);
  }
  return RelationScores{};
}

std::vector<ActionPair> RelationScoreTable::pairs() const {
  std::vector<ActionPair> out;
  out.reserve(table_.size());
  for (const auto& [p, s] : table_) out.push_back(p);
  return out;
}

double relation_membership(const Interval& a, const Interval& b,
                           AllenRelation r, double eps) {
  const KeypointOffsets o = keypoint_offsets(a, b);
  double m = 1.0;
  for (const auto& p : relation_predicates(r)) {
    m = std::min(m, truth(offset_value(o, p.offset), p.sense, eps));
  }
  return m;
}

std::vector<Timing3> collect_timings(const Dataset& d, const ActionPair& pair) {
  if (pair.first == pair.second) {
    throw ValidationError("pair " + pair_label(pair) +
                          " relates an action to itself");
  }
  std::vector<Timing3> out;
  for (const auto& demo : d.demonstrations) {
    const auto* a = find_action(demo, pair.first);
    const auto* b = find_action(demo, pair.second);
    if (a && b) out.push_back(embed(timing_of(a->interval(), b->interval())));
  }
  return out;
}

namespace {

std::vector<std::pair<Interval, Interval>> co_occurrences(
    const Dataset& d, const ActionPair& pair) {
  if (pair.first == pair.second) {
    throw ValidationError("pair " + pair_label(pair) +
                          " relates an action to itself");
  }
  std::vector<std::pair<Interval, Interval>> out;
  for (const auto& demo : d.demonstrations) {
    const auto* a = find_action(demo, pair.first);
    const auto* b = find_action(demo, pair.second);
    if (a && b) out.emplace_back(a->interval(), b->interval());
  }
  if (out.empty()) {
    throw PairNeverCoOccursError("pair " + pair_label(pair) +
                                 " never occurs in one demonstration");
  }
  return out;
}

}  // namespace

double score_relation(const Dataset& d, const ActionPair& pair,
                      AllenRelation r, double eps) {
  const auto seen = co_occurrences(d, pair);
  double sum = 0.0;
  for (const auto& [a, b] : seen) sum += relation_membership(a, b, r, eps);
  return sum / static_cast<double>(seen.size());
}

RelationScores score_pair(const Dataset& d, const ActionPair& pair,
                          double eps) {
  const auto seen = co_occurrences(d, pair);
  RelationScores out{};
  for (auto r : kAllRelations) {
    double sum = 0.0;
    for (const auto& [a, b] : seen) sum += relation_membership(a, b, r, eps);
    out[index_of(r)] = sum / static_cast<double>(seen.size());
  }
  return out;
}

ActionPair canonical(const ActionPair& p) {
  return p.first < p.second ? p : reversed(p);
}

Assessment assess_all(const Dataset& d, double eps, const GmmOptions& gmm) {
  validate_dataset(d);
  if (eps < 0.0) throw ValidationError("eps must be >= 0");
  Assessment out;
  out.eps = eps;
  out.actions = action_vocabulary(d);
  const auto& acts = out.actions;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    for (std::size_t j = i + 1; j < acts.size(); ++j) {
      const ActionPair pair{acts[i], acts[j]};
      auto points = collect_timings(d, pair);
      if (points.empty()) {
        out.never_co_occurring.push_back(pair);
        continue;
      }
      out.co_occurrences[pair] = points.size();
      out.scores.set(pair, score_pair(d, pair, eps));
      TimingModel m = fit_gmm(points, gmm);
      m.pair = pair;
      out.models.emplace(pair, std::move(m));
    }
  }
  return out;
}

std::map<ActionPair, TimingModel> fit_timing_models(
    const Dataset& d, std::span<const ActionPair> pairs,
    const GmmOptions& gmm) {
  std::map<ActionPair, TimingModel> out;
  for (const auto& p : pairs) {
    const ActionPair pair = canonical(p);
    const auto points = collect_timings(d, pair);
    if (points.empty()) {
      throw PairNeverCoOccursError("pair " + pair_label(pair) +
                                   " never occurs in one demonstration");
    }
    TimingModel m = fit_gmm(points, gmm);
    m.pair = pair;
    out.emplace(pair, std::move(m));
  }
  return out;
}

}  // namespace tplan
