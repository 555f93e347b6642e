#include "tplan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "tplan/allen.hpp"
#include "tplan/error.hpp"
#include "tplan/rng.hpp"

namespace tplan {

namespace {

std::string pair_label(const ActionPair& p) {
  return "('" + p.first.label() + "', '" + p.second.label() + "')";
}

std::size_t subtask_count(const GroundTruthSpec& spec) {
  std::size_t n = 0;
  for (const auto& a : spec.actions) n = std::max(n, a.subtask + 1);
  return n;
}

const SynthAction& find_synth(const GroundTruthSpec& spec, const Action& a) {
  for (const auto& x : spec.actions) {
    if (x.action == a) return x;
  }
  throw ValidationError("spec names unknown action '" + a.label() + "'");
}

/// Timing point of (b, a) from that of (a, b).
Timing3 swap_pair(const Timing3& t) { return {t.lam_b, t.lam_a, -t.omega}; }

/// Mode relations inside subtasks, canonical orientation.
std::map<ActionPair, AllenRelation> mode_relations(const GroundTruthSpec& spec,
                                                   const SynthMode& mode) {
  std::map<ActionPair, AllenRelation> out;
  for (const auto& b : mode.relations) {
    const auto& a1 = find_synth(spec, b.pair.first);
    const auto& a2 = find_synth(spec, b.pair.second);
    if (a1.action == a2.action) {
      throw ValidationError("relation " + pair_label(b.pair) +
                            " relates an action to itself");
    }
    if (a1.subtask != a2.subtask) {
      throw ValidationError("relation " + pair_label(b.pair) +
                            " crosses subtasks; those pairs are always ordered");
    }
    const ActionPair p = canonical(b.pair);
    const AllenRelation r = p == b.pair ? b.relation : inverse(b.relation);
    auto [it, fresh] = out.emplace(p, r);
    if (!fresh && it->second != r) {
      throw ValidationError("relation " + pair_label(b.pair) +
                            " is given twice with different values");
    }
  }
  return out;
}

/// Adds N(0, sd) noise to each coordinate, redrawing until the point lies in
/// the margin-tightened region of r. Equality directions are snapped, so the
/// noise there is dropped rather than rejected.
Timing3 perturb_inside(const Timing3& t, AllenRelation r, double sd,
                       double margin, Rng& rng) {
  const auto constraints = region_constraints(r, margin);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Timing3 x = snap_to_region(
        {t.lam_a + sd * rng.normal(), t.lam_b + sd * rng.normal(),
         t.omega + sd * rng.normal()},
        r);
    bool inside = true;
    for (const auto& c : constraints) {
      if (!c.equality && c.g.dot(x.vector()) < c.h) inside = false;
    }
    if (inside) return x;
  }
  throw SpecInfeasibleError(std::string("noise keeps leaving the '") +
                            std::string(to_string(r)) + "' region");
}

struct PreparedMode {
  ConstraintGraph graph;
  SymbolicPlan symbolic;
};

PreparedMode prepare_mode(const GroundTruthSpec& spec, const SynthMode& mode) {
  const auto rel = mode_relations(spec, mode);
  const std::size_t subtasks = subtask_count(spec);

  PreparedMode out;
  auto& g = out.graph;
  g.partition.groups.resize(subtasks);
  for (const auto& a : spec.actions) {
    g.partition.groups[a.subtask].push_back(a.action);
    g.nodes.push_back({a.action, a.hand, a.subtask, spec.unit});
  }
  for (auto& group : g.partition.groups) {
    if (group.empty()) {
      throw ValidationError("subtask indices must be contiguous from 0");
    }
    std::sort(group.begin(), group.end());
  }
  g.assignments.resize(subtasks);
  g.ranks.assign(subtasks, 0);
  for (std::size_t s = 0; s < subtasks; ++s) {
    const auto& group = g.partition.groups[s];
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const ActionPair p{group[i], group[j]};
        const auto it = rel.find(p);
        if (it == rel.end()) {
          throw ValidationError("mode has no relation for " + pair_label(p));
        }
        g.assignments[s].bindings.push_back({p, it->second, 1.0});
      }
    }
    if (!is_contradiction_free(g.assignments[s].bindings)) {
      throw SpecInfeasibleError("relations of subtask " + std::to_string(s) +
                                " contradict each other");
    }
  }

  std::vector<SymbolicPlan> blocks;
  try {
    blocks = symbolic_blocks(g, {spec.unit, 5, 4});
  } catch (const NoSymbolicSolutionError& e) {
    throw SpecInfeasibleError(e.what());
  }
  out.symbolic = concatenate(blocks, 1);

  for (std::size_t s = 0; s < subtasks; ++s) {
    for (const auto& b : g.assignments[s].bindings) {
      ConstraintEdge e;
      e.pair = b.pair;
      e.relation = b.relation;
      e.score = 1.0;
      e.subtask = s;
      bool given = false;
      for (const auto& [p, t] : mode.targets) {
        if (p == b.pair) {
          e.target = t;
          given = true;
        } else if (reversed(p) == b.pair) {
          e.target = swap_pair(t);
          given = true;
        }
      }
      if (!given) {
        const auto& blk = blocks[s].plan;
        Interval ia{};
        Interval ib{};
        for (const auto& x : all_actions(blk)) {
          if (x.action == b.pair.first) ia = x.interval();
          if (x.action == b.pair.second) ib = x.interval();
        }
        e.target = embed(timing_of(ia, ib));
      }
      g.edges.push_back(e);
    }
  }
  return out;
}

}  // namespace

void validate_spec(const GroundTruthSpec& spec) {
  if (spec.actions.empty()) throw ValidationError("spec has no actions");
  if (spec.modes.empty()) throw ValidationError("spec has no modes");
  if (spec.demonstrations == 0) {
    throw ValidationError("spec asks for zero demonstrations");
  }
  if (!(spec.noise >= 0.0)) throw ValidationError("noise must be >= 0");
  for (const auto& [p, v] : spec.pair_noise) {
    if (!(v >= 0.0)) {
      throw ValidationError("pair noise for " + pair_label(p) + " must be >= 0");
    }
  }
  if (!(spec.unit > 0.0)) throw ValidationError("unit must be positive");
  if (!(spec.margin > 0.0)) throw ValidationError("margin must be positive");
  if (!(spec.min_length > 0.0)) {
    throw ValidationError("min_length must be positive");
  }
  if (!(spec.subtask_gap >= 0.0) || !(spec.start_jitter >= 0.0)) {
    throw ValidationError("subtask_gap and start_jitter must be >= 0");
  }
  std::set<Action> seen;
  for (const auto& a : spec.actions) {
    if (a.action.verb.empty() || a.action.object.empty()) {
      throw ValidationError("action verb and object must be non-empty");
    }
    if (!seen.insert(a.action).second) {
      throw ValidationError("action '" + a.action.label() + "' listed twice");
    }
  }
  double total = 0.0;
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    if (!(spec.modes[m].probability > 0.0)) {
      throw ValidationError("mode " + std::to_string(m) +
                            " needs a positive probability");
    }
    total += spec.modes[m].probability;
    prepare_mode(spec, spec.modes[m]);
  }
  if (!(total > 0.0)) throw ValidationError("mode probabilities sum to zero");
}

GeneratedDataset generate_with_modes(const GroundTruthSpec& spec) {
  validate_spec(spec);
  std::vector<PreparedMode> modes;
  double total = 0.0;
  for (const auto& m : spec.modes) {
    modes.push_back(prepare_mode(spec, m));
    total += m.probability;
  }

  ParametrizeOptions popts;
  popts.margin = spec.margin;
  popts.min_length = spec.min_length;
  popts.subtask_gap = spec.subtask_gap;

  Rng rng(spec.seed);
  GeneratedDataset out;
  out.dataset.task = spec.task;
  for (std::size_t i = 0; i < spec.demonstrations; ++i) {
    double u = rng.uniform() * total;
    std::size_t mi = 0;
    while (mi + 1 < spec.modes.size() && u >= spec.modes[mi].probability) {
      u -= spec.modes[mi].probability;
      ++mi;
    }
    const auto& mode = modes[mi];

    std::optional<ParametrizedPlan> plan;
    for (int attempt = 0; attempt < 100 && !plan; ++attempt) {
      ConstraintGraph g = mode.graph;
      for (auto& e : g.edges) {
        double sd = spec.noise;
        if (auto it = spec.pair_noise.find(e.pair); it != spec.pair_noise.end()) {
          sd = it->second;
        } else if (auto rt = spec.pair_noise.find(reversed(e.pair));
                   rt != spec.pair_noise.end()) {
          sd = rt->second;
        }
        e.target = perturb_inside(e.target, e.relation, sd, spec.margin, rng);
      }
      for (auto& n : g.nodes) {
        n.mean_length = std::max(spec.min_length,
                                 n.mean_length + spec.noise * rng.normal());
      }
      try {
        plan = parametrize(mode.symbolic, g, popts);
      } catch (const InfeasibleConstraintsError&) {
        plan.reset();
      }
    }
    if (!plan) {
      throw SpecInfeasibleError("could not realize mode " + std::to_string(mi) +
                                " after 100 draws");
    }

    const double shift =
        spec.start_jitter > 0.0 ? rng.uniform(0.0, spec.start_jitter) : 0.0;
    char id[32];
    std::snprintf(id, sizeof id, "demo_%03zu", i);
    Demonstration d{id, plan->plan.left, plan->plan.right};
    for (auto* seq : {&d.left, &d.right}) {
      for (auto& x : *seq) {
        x.start += shift;
        x.end += shift;
      }
    }
    out.dataset.demonstrations.push_back(std::move(d));
    out.modes.push_back(mi);
  }
  return out;
}

Dataset generate(const GroundTruthSpec& spec) {
  return generate_with_modes(spec).dataset;
}

std::map<ActionPair, AllenRelation> ground_truth_relations(
    const GroundTruthSpec& spec, std::size_t mode) {
  if (mode >= spec.modes.size()) throw ValidationError("no such mode");
  auto out = mode_relations(spec, spec.modes[mode]);
  for (const auto& a : spec.actions) {
    for (const auto& b : spec.actions) {
      if (a.subtask < b.subtask) {
        const ActionPair p{a.action, b.action};
        const ActionPair c = canonical(p);
        out[c] = c == p ? AllenRelation::kBefore : AllenRelation::kAfter;
      }
    }
  }
  return out;
}

}  // namespace tplan
