#include "tplan/inference.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>
#include <set>

#include "tplan/error.hpp"
#include "tplan/gmm.hpp"

namespace tplan {

namespace {

bool counts_toward_score(AllenRelation r) {
  return r != AllenRelation::kBefore && r != AllenRelation::kAfter;
}

constexpr RelationSet kSequential{AllenRelation::kBefore, AllenRelation::kAfter,
                                  AllenRelation::kMeets, AllenRelation::kMetBy};

/// Both orientations of every binding; nullopt on a conflicting duplicate.
std::optional<std::map<ActionPair, AllenRelation>> relation_map(
    std::span<const Binding> bindings) {
  std::map<ActionPair, AllenRelation> out;
  for (const auto& b : bindings) {
    for (const auto& [p, r] : {std::pair{b.pair, b.relation},
                               std::pair{reversed(b.pair), inverse(b.relation)}}) {
      auto [it, fresh] = out.emplace(p, r);
      if (!fresh && it->second != r) return std::nullopt;
    }
  }
  return out;
}

std::string pair_label(const ActionPair& p) {
  return "('" + p.first.label() + "', '" + p.second.label() + "')";
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::optional<std::size_t> SubtaskPartition::group_of(const Action& a) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::binary_search(groups[g].begin(), groups[g].end(), a)) return g;
  }
  return std::nullopt;
}

SubtaskPartition segment_subtasks(const Dataset& d, const Assessment& a,
                                  double theta) {
  const auto& acts = a.actions;
  const std::size_t n = acts.size();
  // order[i][j] = +1 if i is clearly before j, -1 if after, 0 if linked.
  std::vector<int> order(n * n, 0);
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ActionPair p{acts[i], acts[j]};
      int o = 0;
      if (a.scores.contains(p)) {
        if (a.scores.score(p, AllenRelation::kBefore) >= theta) {
          o = 1;
        } else if (a.scores.score(p, AllenRelation::kAfter) >= theta) {
          o = -1;
        }
      }
      order[i * n + j] = o;
      order[j * n + i] = -o;
      if (o == 0) uf.unite(i, j);
    }
  }

  // Merge groups until every pair of groups is ordered one way.
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) members[uf.find(i)].push_back(i);
    for (auto g1 = members.begin(); g1 != members.end() && !changed; ++g1) {
      for (auto g2 = std::next(g1); g2 != members.end() && !changed; ++g2) {
        int seen = 0;
        for (auto i : g1->second) {
          for (auto j : g2->second) {
            const int o = order[i * n + j];
            if (o == 0 || (seen != 0 && o != seen)) {
              uf.unite(g1->first, g2->first);
              changed = true;
              break;
            }
            seen = o;
          }
          if (changed) break;
        }
      }
    }
  }

  std::vector<double> mean_start(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& demo : d.demonstrations) {
      if (const auto* x = find_action(demo, acts[i])) {
        sum += x->start;
        ++count;
      }
    }
    mean_start[i] = count ? sum / static_cast<double>(count) : 0.0;
  }

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[uf.find(i)].push_back(i);
  struct Group {
    double start;
    std::vector<Action> actions;
  };
  std::vector<Group> groups;
  for (const auto& [root, idx] : members) {
    Group g{0.0, {}};
    for (auto i : idx) {
      g.start += mean_start[i];
      g.actions.push_back(acts[i]);
    }
    g.start /= static_cast<double>(idx.size());
    std::sort(g.actions.begin(), g.actions.end());
    groups.push_back(std::move(g));
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const Group& x, const Group& y) {
                     if (x.start != y.start) return x.start < y.start;
                     return x.actions.front() < y.actions.front();
                   });
  SubtaskPartition out;
  for (auto& g : groups) out.groups.push_back(std::move(g.actions));
  return out;
}

std::vector<Binding> pre_assign(const RelationScoreTable& scores, double theta,
                                std::span<const Action> scope) {
  const std::set<Action> in_scope(scope.begin(), scope.end());
  std::vector<Binding> out;
  for (const auto& p : scores.pairs()) {
    if (!scope.empty() &&
        (!in_scope.count(p.first) || !in_scope.count(p.second))) {
      continue;
    }
    std::optional<Binding> best;
    for (auto r : {AllenRelation::kBefore, AllenRelation::kAfter,
                   AllenRelation::kMeets, AllenRelation::kMetBy}) {
      const double s = scores.score(p, r);
      if (s >= theta && (!best || s > best->score)) best = Binding{p, r, s};
    }
    if (best) out.push_back(*best);
  }
  return out;
}

bool is_feasible(std::span<const Binding> assigned, const Binding& candidate) {
  const auto rel = relation_map(assigned);
  if (!rel) return false;
  const auto& [a, b] = candidate.pair;
  if (auto it = rel->find(candidate.pair); it != rel->end()) {
    return it->second == candidate.relation;
  }
  std::set<Action> others;
  for (const auto& [p, r] : *rel) others.insert(p.first);
  for (const auto& c : others) {
    if (c == a || c == b) continue;
    const auto ac = rel->find({a, c});
    const auto cb = rel->find({c, b});
    if (ac == rel->end() || cb == rel->end()) continue;
    if (!compose(ac->second, cb->second).contains(candidate.relation)) {
      return false;
    }
  }
  return true;
}

double score_assignment(std::span<const Binding> bindings) {
  double s = 0.0;
  for (const auto& b : bindings) {
    if (counts_toward_score(b.relation)) s += b.score;
  }
  return s;
}

bool is_contradiction_free(std::span<const Binding> bindings) {
  const auto rel = relation_map(bindings);
  if (!rel) return false;
  std::set<Action> acts;
  for (const auto& [p, r] : *rel) acts.insert(p.first);
  const std::vector<Action> v(acts.begin(), acts.end());
  for (const auto& a : v) {
    for (const auto& b : v) {
      if (a == b) continue;
      const auto ab = rel->find({a, b});
      if (ab == rel->end()) continue;
      for (const auto& c : v) {
        if (c == a || c == b) continue;
        const auto ac = rel->find({a, c});
        const auto cb = rel->find({c, b});
        if (ac == rel->end() || cb == rel->end()) continue;
        if (!compose(ac->second, cb->second).contains(ab->second)) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// AssignmentProblem

AssignmentProblem::AssignmentProblem(std::vector<Action> actions,
                                     const RelationScoreTable& scores)
    : actions_(std::move(actions)) {
  std::sort(actions_.begin(), actions_.end());
  actions_.erase(std::unique(actions_.begin(), actions_.end()), actions_.end());
  const std::size_t n = actions_.size();
  pair_index_.assign(n * n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto id = static_cast<std::int32_t>(pairs_.size());
      pair_index_[i * n + j] = id;
      pair_index_[j * n + i] = id;
      pairs_.emplace_back(i, j);
    }
  }
  scores_.resize(pairs_.size() * kRelationCount);
  best_overlap_score_.assign(pairs_.size(), 0.0);
  allowed_.assign(pairs_.size(), RelationSet::all());
  for (PairId id = 0; id < pairs_.size(); ++id) {
    const ActionPair p = pair(id);
    for (auto r : kAllRelations) {
      const double s = scores.score(p, r);
      scores_[id * kRelationCount + index_of(r)] = s;
      if (counts_toward_score(r)) {
        best_overlap_score_[id] = std::max(best_overlap_score_[id], s);
      }
    }
  }
}

ActionPair AssignmentProblem::pair(PairId id) const {
  const auto [i, j] = pairs_[id];
  return {actions_[i], actions_[j]};
}

std::optional<PairId> AssignmentProblem::find_pair(std::size_t i,
                                                   std::size_t j) const {
  const std::size_t n = actions_.size();
  if (i >= n || j >= n || i == j) return std::nullopt;
  return static_cast<PairId>(pair_index_[i * n + j]);
}

void AssignmentProblem::restrict(PairId id, RelationSet allowed) {
  allowed_[id] = allowed;
  double best = 0.0;
  for (auto r : allowed.members()) {
    if (counts_toward_score(r)) best = std::max(best, score(id, r));
  }
  best_overlap_score_[id] = best;
}

PartialTaskAssignment AssignmentProblem::initial(
    std::span<const Binding> pre) const {
  PartialTaskAssignment t;
  t.relations.assign(pairs_.size(), -1);
  auto index = [&](const Action& a) -> std::size_t {
    const auto it = std::lower_bound(actions_.begin(), actions_.end(), a);
    if (it == actions_.end() || *it != a) {
      throw ValidationError("pre-assigned action '" + a.label() +
                            "' is not part of the problem");
    }
    return static_cast<std::size_t>(it - actions_.begin());
  };
  for (const auto& b : pre) {
    const std::size_t i = index(b.pair.first);
    const std::size_t j = index(b.pair.second);
    const auto id = find_pair(i, j);
    if (!id) {
      throw ValidationError("pre-assigned pair " + pair_label(b.pair) +
                            " relates an action to itself");
    }
    const AllenRelation r = i < j ? b.relation : inverse(b.relation);
    if (!allowed_[*id].contains(r)) {
      throw ValidationError("pre-assigned relation for " + pair_label(b.pair) +
                            " is not allowed for that pair");
    }
    auto& slot = t.relations[*id];
    if (slot >= 0 && slot != static_cast<std::int8_t>(index_of(r))) {
      throw ValidationError("pair " + pair_label(b.pair) +
                            " is pre-assigned twice with different relations");
    }
    slot = static_cast<std::int8_t>(index_of(r));
  }
  for (PairId id = 0; id < pairs_.size(); ++id) {
    if (t.relations[id] >= 0) {
      const auto r = static_cast<AllenRelation>(t.relations[id]);
      if (!is_feasible(t, id, r)) {
        throw ValidationError("pre-assigned relations are contradictory at " +
                              pair_label(pair(id)));
      }
    } else {
      t.unassigned.push_back(id);
    }
  }
  return t;
}

std::optional<AllenRelation> AssignmentProblem::relation(
    const PartialTaskAssignment& t, std::size_t i, std::size_t j) const {
  const auto id = pair_index_[i * actions_.size() + j];
  const auto v = t.relations[static_cast<std::size_t>(id)];
  if (v < 0) return std::nullopt;
  const auto r = static_cast<AllenRelation>(v);
  return i < j ? r : inverse(r);
}

bool AssignmentProblem::is_feasible(const PartialTaskAssignment& t, PairId id,
                                    AllenRelation r) const {
  if (!allowed_[id].contains(r)) return false;
  const auto [i, j] = pairs_[id];
  for (std::size_t k = 0; k < actions_.size(); ++k) {
    if (k == i || k == j) continue;
    const auto ik = relation(t, i, k);
    if (!ik) continue;
    const auto kj = relation(t, k, j);
    if (!kj) continue;
    // For atomic relations one composition check covers the whole triangle.
    if (!compose(*ik, *kj).contains(r)) return false;
  }
  return true;
}

RelationSet AssignmentProblem::feasible_relations(
    const PartialTaskAssignment& t, PairId id) const {
  RelationSet out;
  for (auto r : kAllRelations) {
    if (is_feasible(t, id, r)) out.insert(r);
  }
  return out;
}

std::vector<PartialTaskAssignment> AssignmentProblem::assign_next(
    const PartialTaskAssignment& t, PairOrder order) const {
  if (t.unassigned.empty()) return {};
  std::size_t pos = t.unassigned.size() - 1;
  RelationSet options;
  if (order == PairOrder::kMostConstrained) {
    int best = static_cast<int>(kRelationCount) + 1;
    for (std::size_t k = 0; k < t.unassigned.size(); ++k) {
      const RelationSet f = feasible_relations(t, t.unassigned[k]);
      if (f.size() < best) {
        best = f.size();
        pos = k;
        options = f;
        if (best == 0) break;
      }
    }
  } else {
    options = feasible_relations(t, t.unassigned[pos]);
  }
  const PairId id = t.unassigned[pos];

  std::vector<AllenRelation> rs = options.members();
  std::stable_sort(rs.begin(), rs.end(), [&](AllenRelation a, AllenRelation b) {
    return score(id, a) > score(id, b);
  });
  std::vector<PartialTaskAssignment> children;
  children.reserve(rs.size());
  for (auto r : rs) {
    PartialTaskAssignment c;
    c.unassigned.reserve(t.unassigned.size() - 1);
    for (std::size_t k = 0; k < t.unassigned.size(); ++k) {
      if (k != pos) c.unassigned.push_back(t.unassigned[k]);
    }
    c.relations = t.relations;
    c.relations[id] = static_cast<std::int8_t>(index_of(r));
    children.push_back(std::move(c));
  }
  return children;
}

TaskAssignment AssignmentProblem::complete(
    const PartialTaskAssignment& t) const {
  TaskAssignment out;
  for (PairId id = 0; id < pairs_.size(); ++id) {
    const auto r = static_cast<AllenRelation>(t.relations[id]);
    out.bindings.push_back({pair(id), r, score(id, r)});
  }
  out.score = score_of(t.relations);
  return out;
}

double AssignmentProblem::score_of(
    std::span<const std::int8_t> relations) const {
  double s = 0.0;
  for (PairId id = 0; id < relations.size(); ++id) {
    if (relations[id] < 0) continue;
    const auto r = static_cast<AllenRelation>(relations[id]);
    if (counts_toward_score(r)) s += score(id, r);
  }
  return s;
}

double AssignmentProblem::upper_bound(const PartialTaskAssignment& t) const {
  double s = score_of(t.relations);
  for (auto id : t.unassigned) s += best_overlap_score_[id];
  return s;
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct Found {
  double score;
  std::vector<std::int8_t> relations;
};

bool better(const Found& a, const Found& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.relations < b.relations;
}

}  // namespace

SearchOutcome search_assignments(const AssignmentProblem& problem,
                                 std::span<const Binding> pre,
                                 const SearchOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto seconds = [&] {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  SearchOutcome out;
  std::vector<Found> found;
  std::vector<PartialTaskAssignment> stack;
  stack.push_back(problem.initial(pre));
  const std::size_t every = std::max<std::size_t>(1, options.observe_every);
  double threshold = -std::numeric_limits<double>::infinity();

  auto trim = [&] {
    std::sort(found.begin(), found.end(), better);
    found.resize(options.top_k);
    threshold = found.back().score;
  };

  std::size_t tick = 0;
  while (!stack.empty()) {
    if (++tick % every == 0) {
      const double now = seconds();
      if (options.observer) {
        options.observer({now, stack.size(), out.solutions, out.expanded});
      }
      if (options.time_limit > 0.0 && now > options.time_limit) {
        out.timed_out = true;
        break;
      }
    }
    PartialTaskAssignment t = std::move(stack.back());
    stack.pop_back();
    if (t.unassigned.empty()) {
      ++out.solutions;
      if (options.collect) {
        found.push_back({problem.score_of(t.relations), std::move(t.relations)});
        if (options.top_k > 0 && found.size() >= 2 * options.top_k) trim();
      }
      continue;
    }
    ++out.expanded;
    auto children = problem.assign_next(t, options.order);
    // Highest-scoring child is explored first.
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      if (options.top_k > 0 && options.collect &&
          problem.upper_bound(*it) < threshold) {
        continue;
      }
      stack.push_back(std::move(*it));
    }
  }
  out.elapsed = seconds();
  if (options.observer) {
    options.observer({out.elapsed, stack.size(), out.solutions, out.expanded});
  }

  std::sort(found.begin(), found.end(), better);
  if (options.top_k > 0 && found.size() > options.top_k) {
    found.resize(options.top_k);
  }
  for (const auto& f : found) {
    PartialTaskAssignment t{{}, f.relations};
    out.assignments.push_back(problem.complete(t));
  }
  return out;
}

std::vector<TaskAssignment> find_assignments(const AssignmentProblem& problem,
                                             std::span<const Binding> pre,
                                             const SearchOptions& options) {
  auto outcome = search_assignments(problem, pre, options);
  if (outcome.timed_out) {
    throw TimeoutError("assignment search exceeded " +
                       std::to_string(options.time_limit) + " s after " +
                       std::to_string(outcome.solutions) + " solutions");
  }
  if (outcome.solutions == 0) {
    throw NoFeasibleAssignmentError(
        "no contradiction-free assignment exists for the given "
        "pre-assignments");
  }
  return std::move(outcome.assignments);
}

// ---------------------------------------------------------------------------
// Pipeline

Inference infer_assignments(const Dataset& d, const Assessment& a,
                            const InferenceOptions& options) {
  Inference out;
  out.partition = segment_subtasks(d, a, options.theta_pre);
  const auto hands = majority_hands(d);

  std::vector<std::future<SubtaskSolution>> jobs;
  for (const auto& group : out.partition.groups) {
    jobs.push_back(std::async(std::launch::async, [&, group] {
      SubtaskSolution s;
      s.actions = group;
      s.pre_assigned = pre_assign(a.scores, options.theta_pre, group);
      AssignmentProblem problem(group, a.scores);
      for (PairId id = 0; id < problem.pair_count(); ++id) {
        const auto p = problem.pair(id);
        const auto h1 = hands.find(p.first);
        const auto h2 = hands.find(p.second);
        if (h1 != hands.end() && h2 != hands.end() && h1->second == h2->second) {
          problem.restrict(id, kSequential);
        }
      }
      s.ranked = find_assignments(problem, s.pre_assigned, options.search);
      return s;
    }));
  }
  for (auto& j : jobs) out.subtasks.push_back(j.get());
  return out;
}

const ConstraintNode* ConstraintGraph::node(const Action& a) const {
  for (const auto& n : nodes) {
    if (n.action == a) return &n;
  }
  return nullptr;
}

ConstraintGraph build_constraint_graph(
    const Dataset& d, const std::map<ActionPair, TimingModel>& models,
    const SubtaskPartition& partition,
    const std::vector<TaskAssignment>& chosen,
    const std::map<Action, Hand>& hands, double margin) {
  if (chosen.size() != partition.groups.size()) {
    throw ValidationError("need one assignment per subtask");
  }
  ConstraintGraph g;
  g.partition = partition;
  g.assignments = chosen;
  for (std::size_t s = 0; s < partition.groups.size(); ++s) {
    for (const auto& act : partition.groups[s]) {
      ConstraintNode n;
      n.action = act;
      n.subtask = s;
      if (auto it = hands.find(act); it != hands.end()) n.hand = it->second;
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& demo : d.demonstrations) {
        if (const auto* x = find_action(demo, act)) {
          sum += x->length();
          ++count;
        }
      }
      n.mean_length = count ? sum / static_cast<double>(count) : 0.0;
      g.nodes.push_back(n);
    }
  }
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    for (const auto& b : chosen[s].bindings) {
      ConstraintEdge e;
      e.pair = canonical(b.pair);
      e.relation = e.pair == b.pair ? b.relation : inverse(b.relation);
      e.score = b.score;
      e.subtask = s;
      if (auto it = models.find(e.pair); it != models.end()) {
        e.target = conditioned_argmax(it->second, e.relation, margin);
      } else {
        // Never observed together: aim for typical lengths side by side.
        const double la = g.node(e.pair.first)->mean_length;
        const double lb = g.node(e.pair.second)->mean_length;
        e.target = region_project(Timing3{la / kSqrt2, lb / kSqrt2, 0.0},
                                  e.relation, margin);
      }
      g.edges.push_back(e);
    }
  }
  return g;
}

ConstraintGraph infer_constraints(const Dataset& d, const Assessment& a,
                                  const Inference& inference, std::size_t rank,
                                  double margin) {
  std::vector<TaskAssignment> chosen;
  std::vector<std::size_t> ranks;
  for (const auto& s : inference.subtasks) {
    if (s.ranked.empty()) {
      throw NoFeasibleAssignmentError("a subtask has no ranked assignment");
    }
    const std::size_t r = std::min(rank, s.ranked.size() - 1);
    chosen.push_back(s.ranked[r]);
    ranks.push_back(r);
  }
  auto g = build_constraint_graph(d, a.models, inference.partition, chosen,
                                  majority_hands(d), margin);
  g.ranks = std::move(ranks);
  return g;
}

}  // namespace tplan
