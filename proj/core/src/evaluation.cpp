#include "tplan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Core>

#include "tplan/error.hpp"
#include "tplan/rng.hpp"
#include "tplan/timing.hpp"

namespace tplan {

namespace {

std::map<Action, Interval> intervals(const std::vector<TimeEnrichedAction>& xs) {
  std::map<Action, Interval> out;
  for (const auto& x : xs) out[x.action] = x.interval();
  return out;
}

void require_same_actions(const std::map<Action, Interval>& a,
                          const std::map<Action, Interval>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      throw ActionSetMismatchError("action '" + ia->first.label() +
                                   "' appears on one side only");
    }
    if (ia == a.end() || ib->first < ia->first) {
      throw ActionSetMismatchError("action '" + ib->first.label() +
                                   "' appears on one side only");
    }
    ++ia;
    ++ib;
  }
}

double group_distance(const std::map<Action, Interval>& a,
                      const std::map<Action, Interval>& b,
                      const std::vector<Action>& group) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(2 * group.size()));
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto& x = a.at(group[i]);
    const auto& y = b.at(group[i]);
    v[static_cast<Eigen::Index>(2 * i)] = x.start - y.start;
    v[static_cast<Eigen::Index>(2 * i + 1)] = x.end - y.end;
  }
  return shift_minimized_norm(v);
}

double distance_all(const std::map<Action, Interval>& a,
                    const std::map<Action, Interval>& b) {
  require_same_actions(a, b);
  std::vector<Action> acts;
  for (const auto& [k, v] : a) acts.push_back(k);
  return group_distance(a, b, acts);
}

double distance_grouped(const std::map<Action, Interval>& a,
                        const std::map<Action, Interval>& b,
                        const SubtaskPartition& partition) {
  require_same_actions(a, b);
  std::size_t covered = 0;
  double sq = 0.0;
  for (const auto& g : partition.groups) {
    for (const auto& act : g) {
      if (!a.count(act)) {
        throw ActionSetMismatchError("partition names action '" + act.label() +
                                     "' missing from the sequences");
      }
    }
    covered += g.size();
    const double dg = group_distance(a, b, g);
    sq += dg * dg;
  }
  if (covered != a.size()) {
    throw ActionSetMismatchError("partition does not cover every action");
  }
  return std::sqrt(sq);
}

template <typename Dist>
const Demonstration& most_characteristic_by(std::span<const Demonstration> demos,
                                            Dist dist) {
  if (demos.empty()) throw EmptyDatasetError("no demonstrations to choose from");
  std::vector<std::map<Action, Interval>> iv;
  for (const auto& d : demos) iv.push_back(intervals(all_actions(d)));
  std::size_t best = 0;
  double best_total = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < demos.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < demos.size(); ++j) {
      if (i != j) total += dist(iv[i], iv[j]);
    }
    if (total < best_total ||
        (total == best_total && demos[i].id < demos[best].id)) {
      best_total = total;
      best = i;
    }
  }
  return demos[best];
}

}  // namespace

double plan_demo_distance(const TemporalPlan& p, const Demonstration& d) {
  return distance_all(intervals(all_actions(p)), intervals(all_actions(d)));
}

double plan_demo_distance(const Demonstration& a, const Demonstration& b) {
  return distance_all(intervals(all_actions(a)), intervals(all_actions(b)));
}

double plan_demo_distance(const TemporalPlan& p, const Demonstration& d,
                          const SubtaskPartition& partition) {
  return distance_grouped(intervals(all_actions(p)), intervals(all_actions(d)),
                          partition);
}

double plan_demo_distance(const Demonstration& a, const Demonstration& b,
                          const SubtaskPartition& partition) {
  return distance_grouped(intervals(all_actions(a)), intervals(all_actions(b)),
                          partition);
}

const Demonstration& most_characteristic(std::span<const Demonstration> demos) {
  return most_characteristic_by(demos, distance_all);
}

const Demonstration& most_characteristic(std::span<const Demonstration> demos,
                                         const SubtaskPartition& partition) {
  return most_characteristic_by(
      demos, [&](const auto& a, const auto& b) {
        return distance_grouped(a, b, partition);
      });
}

FixedTaskChoice choose_task(const Dataset& d, std::size_t rank,
                            const PlannerConfig& config) {
  const Assessment a = assess_all(d, config.eps, config.gmm);
  const Inference inf = infer_assignments(d, a, {config.theta_pre, config.search});
  FixedTaskChoice out;
  out.partition = inf.partition;
  for (const auto& s : inf.subtasks) {
    out.assignments.push_back(s.ranked[std::min(rank, s.ranked.size() - 1)]);
  }
  out.hands = majority_hands(d);
  return out;
}

EvalReport incremental_eval(const Dataset& d, const FixedTaskChoice& choice,
                            std::size_t trials, std::uint64_t seed,
                            const PlannerConfig& config) {
  validate_dataset(d);
  if (trials == 0) throw ValidationError("trials must be positive");
  const std::size_t n = d.demonstrations.size();

  std::vector<ActionPair> pairs;
  for (const auto& t : choice.assignments) {
    for (const auto& b : t.bindings) pairs.push_back(canonical(b.pair));
  }

  EvalReport report;
  report.trials = trials;
  report.seed = seed;
  report.definition =
      "distance = sqrt(sum over subtasks of min over a per-subtask time shift "
      "of the squared keypoint differences); each row reports the mean "
      "distance to the demonstrations known so far, including the baseline "
      "itself";

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = mix_seed(seed, trial);
    report.trial_seeds.push_back(trial_seed);
    Rng rng(trial_seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }

    Dataset known{d.task, {}};
    for (std::size_t k = 0; k < n; ++k) {
      known.demonstrations.push_back(d.demonstrations[order[k]]);

      std::vector<ActionPair> seen;
      for (const auto& p : pairs) {
        if (!collect_timings(known, p).empty()) seen.push_back(p);
      }
      const auto models = fit_timing_models(known, seen, config.gmm);
      const auto graph =
          build_constraint_graph(known, models, choice.partition,
                                 choice.assignments, choice.hands,
                                 config.parametrize.margin);
      const auto blocks = symbolic_blocks(graph, config.symbolic);
      const auto plan =
          parametrize(concatenate(blocks, 1), graph, config.parametrize);

      const auto& base =
          most_characteristic(known.demonstrations, choice.partition);
      double plan_sum = 0.0;
      double base_sum = 0.0;
      for (const auto& demo : known.demonstrations) {
        plan_sum += plan_demo_distance(plan.plan, demo, choice.partition);
        base_sum += plan_demo_distance(base, demo, choice.partition);
      }
      const double denom = static_cast<double>(known.demonstrations.size());
      report.rows.push_back(
          {trial, k + 1, plan_sum / denom, base_sum / denom, base.id});
    }
  }

  for (std::size_t k = 1; k <= n; ++k) {
    EvalSummary s;
    s.prefix = k;
    std::vector<double> pv;
    std::vector<double> bv;
    for (const auto& r : report.rows) {
      if (r.prefix == k) {
        pv.push_back(r.plan_distance);
        bv.push_back(r.baseline_distance);
      }
    }
    auto stats = [](const std::vector<double>& v, double& mean, double& var) {
      mean = std::accumulate(v.begin(), v.end(), 0.0) /
             static_cast<double>(v.size());
      var = 0.0;
      if (v.size() > 1) {
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
      }
    };
    stats(pv, s.plan_mean, s.plan_variance);
    stats(bv, s.baseline_mean, s.baseline_variance);
    report.summary.push_back(s);
  }
  return report;
}

BenchTrace bench_assignments(const AssignmentProblem& problem,
                             std::span<const Binding> pre,
                             double sample_interval, double time_limit,
                             PairOrder order) {
  if (!(sample_interval > 0.0)) {
    throw ValidationError("sample interval must be positive");
  }
  BenchTrace trace;
  trace.samples.push_back({0.0, 1, 0});
  double next = sample_interval;
  SearchOptions opts;
  opts.order = order;
  opts.collect = false;
  opts.time_limit = time_limit;
  opts.observe_every = 64;
  std::size_t remaining = 0;
  opts.observer = [&](const SearchProgress& p) {
    remaining = p.partials;
    if (p.elapsed >= next) {
      trace.samples.push_back({p.elapsed, p.partials, p.solutions});
      while (next <= p.elapsed) next += sample_interval;
    }
  };
  const auto outcome = search_assignments(problem, pre, opts);
  // The observer's last call reports the stack left behind.
  trace.samples.push_back({outcome.elapsed, remaining, outcome.solutions});
  trace.solutions = outcome.solutions;
  trace.elapsed = outcome.elapsed;
  trace.timed_out = outcome.timed_out;
  return trace;
}

}  // namespace tplan
