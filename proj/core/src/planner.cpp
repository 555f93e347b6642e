#include "tplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "tplan/allen.hpp"
#include "tplan/error.hpp"

namespace tplan {

namespace {

const TimeEnrichedAction* find_in(const TemporalPlan& p, const Action& a) {
  for (const auto* seq : {&p.left, &p.right}) {
    for (const auto& x : *seq) {
      if (x.action == a) return &x;
    }
  }
  return nullptr;
}

void sort_hands(TemporalPlan& p) {
  auto by_start = [](const TimeEnrichedAction& x, const TimeEnrichedAction& y) {
    if (x.start != y.start) return x.start < y.start;
    return x.action < y.action;
  };
  std::sort(p.left.begin(), p.left.end(), by_start);
  std::sort(p.right.begin(), p.right.end(), by_start);
}

bool sequential(AllenRelation r) {
  return r == AllenRelation::kBefore || r == AllenRelation::kAfter ||
         r == AllenRelation::kMeets || r == AllenRelation::kMetBy;
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

// Keypoint index of an action: start = 2i, end = 2i + 1.
std::pair<std::size_t, std::size_t> offset_keypoints(OffsetKind k,
                                                     std::size_t a,
                                                     std::size_t b) {
  // offset = second - first
  switch (k) {
    case OffsetKind::kStartStart:
      return {2 * a, 2 * b};
    case OffsetKind::kEndEnd:
      return {2 * a + 1, 2 * b + 1};
    case OffsetKind::kStartEnd:
      return {2 * a + 1, 2 * b};
    case OffsetKind::kEndStart:
      return {2 * a, 2 * b + 1};
  }
  return {0, 0};
}

}  // namespace

SymbolicPlan symbolic_plan(std::span<const Action> actions,
                           std::span<const Binding> assignment,
                           const std::map<Action, Hand>& hands,
                           const SymbolicOptions& options) {
  if (!(options.unit > 0.0)) throw ValidationError("unit must be positive");
  std::vector<Action> acts(actions.begin(), actions.end());
  std::sort(acts.begin(), acts.end());
  const std::size_t n = acts.size();
  auto index = [&](const Action& a) {
    const auto it = std::lower_bound(acts.begin(), acts.end(), a);
    if (it == acts.end() || *it != a) {
      throw ValidationError("assignment names unknown action '" + a.label() +
                            "'");
    }
    return static_cast<std::size_t>(it - acts.begin());
  };
  auto hand_of = [&](const Action& a) {
    const auto it = hands.find(a);
    return it == hands.end() ? Hand::kLeft : it->second;
  };

  // Keypoint precedence: strict edges plus equalities.
  std::vector<std::pair<std::size_t, std::size_t>> strict;
  UnionFind same(2 * n);
  for (std::size_t i = 0; i < n; ++i) strict.emplace_back(2 * i, 2 * i + 1);
  for (const auto& b : assignment) {
    const std::size_t i = index(b.pair.first);
    const std::size_t j = index(b.pair.second);
    if (hand_of(b.pair.first) == hand_of(b.pair.second) &&
        !sequential(b.relation)) {
      throw NoSymbolicSolutionError(
          "'" + b.pair.first.label() + "' and '" + b.pair.second.label() +
          "' share a hand but are assigned " +
          std::string(to_string(b.relation)));
    }
    for (const auto& p : relation_predicates(b.relation)) {
      const auto [from, to] = offset_keypoints(p.offset, i, j);
      switch (p.sense) {
        case Sense::kZero:
          same.unite(from, to);
          break;
        case Sense::kPositive:
          strict.emplace_back(from, to);
          break;
        case Sense::kNegative:
          strict.emplace_back(to, from);
          break;
      }
    }
  }

  // Longest-path levels over equality classes (Kahn's algorithm).
  const std::size_t m = 2 * n;
  std::vector<std::vector<std::size_t>> succ(m);
  std::vector<int> indegree(m, 0);
  for (auto [u, v] : strict) {
    const auto cu = same.find(u);
    const auto cv = same.find(v);
    if (cu == cv) {
      throw NoSymbolicSolutionError(
          "assignment forces a keypoint to precede itself");
    }
    succ[cu].push_back(cv);
    ++indegree[cv];
  }
  std::vector<int> level(m, 0);
  std::vector<std::size_t> ready;
  std::size_t classes = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (same.find(k) == k) {
      ++classes;
      if (indegree[k] == 0) ready.push_back(k);
    }
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto u = ready.back();
    ready.pop_back();
    ++visited;
    for (auto v : succ[u]) {
      level[v] = std::max(level[v], level[u] + 1);
      if (--indegree[v] == 0) ready.push_back(v);
    }
  }
  if (visited != classes) {
    throw NoSymbolicSolutionError("assignment orders keypoints cyclically");
  }

  SymbolicPlan out;
  out.unit = options.unit;
  out.actions = acts;
  out.plan.grid = options.unit;
  for (std::size_t i = 0; i < n; ++i) {
    const int s = level[same.find(2 * i)];
    const int e = level[same.find(2 * i + 1)];
    TimeEnrichedAction x{acts[i], s * options.unit, e * options.unit};
    (hand_of(acts[i]) == Hand::kLeft ? out.plan.left : out.plan.right)
        .push_back(x);
  }
  sort_hands(out.plan);
  return out;
}

SymbolicPlan concatenate(std::span<const SymbolicPlan> blocks, int gap_units) {
  SymbolicPlan out;
  if (blocks.empty()) return out;
  out.unit = blocks.front().unit;
  out.plan.grid = out.unit;
  double offset = 0.0;
  for (const auto& b : blocks) {
    double end = 0.0;
    for (const auto& x : all_actions(b.plan)) {
      end = std::max(end, x.end);
      TimeEnrichedAction y{x.action, x.start + offset, x.end + offset};
      const bool left = std::any_of(b.plan.left.begin(), b.plan.left.end(),
                                    [&](auto& l) { return l.action == x.action; });
      (left ? out.plan.left : out.plan.right).push_back(y);
    }
    out.actions.insert(out.actions.end(), b.actions.begin(), b.actions.end());
    offset += end + gap_units * out.unit;
  }
  sort_hands(out.plan);
  return out;
}

namespace {

/// min 1/2 z'Gz + c'z  s.t.  C z >= d, from a feasible z (primal active set).
struct QpResult {
  Eigen::VectorXd z;
  int iterations = 0;
  bool stalled = false;
};

QpResult active_set_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                       const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                       Eigen::VectorXd z, int max_iterations, double kkt_tol) {
  const auto nv = z.size();
  const auto nc = C.rows();
  std::vector<bool> in_w(static_cast<std::size_t>(nc), false);
  std::vector<Eigen::Index> w;
  QpResult out;
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const auto nw = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nv + nw, nv + nw);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + nw);
    K.topLeftCorner(nv, nv) = G;
    for (Eigen::Index k = 0; k < nw; ++k) {
      K.block(0, nv + k, nv, 1) = -C.row(w[k]).transpose();
      K.block(nv + k, 0, 1, nv) = C.row(w[k]);
    }
    rhs.head(nv) = -(G * z + c);
    const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    const Eigen::VectorXd p = sol.head(nv);
    const Eigen::VectorXd lambda = sol.tail(nw);

    if (p.norm() <= 1e-13 * (1.0 + z.norm())) {
      Eigen::Index worst = -1;
      double most_negative = -kkt_tol;
      for (Eigen::Index k = 0; k < nw; ++k) {
        if (lambda[k] < most_negative) {
          most_negative = lambda[k];
          worst = k;
        }
      }
      if (worst < 0) {
        out.z = z;
        return out;
      }
      in_w[static_cast<std::size_t>(w[worst])] = false;
      w.erase(w.begin() + worst);
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < nc; ++i) {
      if (in_w[static_cast<std::size_t>(i)]) continue;
      const double cp = C.row(i).dot(p);
      if (cp < 0.0) {
        const double a = (d[i] - C.row(i).dot(z)) / cp;
        if (a < alpha) {
          alpha = std::max(0.0, a);
          blocking = i;
        }
      }
    }
    z += alpha * p;
    if (blocking >= 0) {
      in_w[static_cast<std::size_t>(blocking)] = true;
      w.push_back(blocking);
    }
  }
  out.z = z;
  out.stalled = true;
  return out;
}

Timing3 embed_intervals(const Interval& a, const Interval& b) {
  return embed(timing_of(a, b));
}

}  // namespace

ParametrizedPlan parametrize(const SymbolicPlan& plan,
                             const ConstraintGraph& graph,
                             const ParametrizeOptions& options) {
  if (!(options.margin > 0.0)) throw ValidationError("margin must be positive");
  if (!(options.min_length > 0.0)) {
    throw ValidationError("min_length must be positive");
  }
  ParametrizedPlan out;
  double block_start = 0.0;
  double start_sq = 0.0;
  double final_sq = 0.0;

  for (std::size_t s = 0; s < graph.partition.groups.size(); ++s) {
    const auto& group = graph.partition.groups[s];
    const std::size_t n = group.size();

    // Keypoint classes in symbolic time order.
    std::vector<double> times(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto* x = find_in(plan.plan, group[i]);
      if (!x) {
        throw ValidationError("symbolic plan lacks action '" +
                              group[i].label() + "'");
      }
      times[2 * i] = x->start;
      times[2 * i + 1] = x->end;
    }
    std::vector<double> distinct(times);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    std::vector<Eigen::Index> cls(2 * n);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      cls[k] = std::lower_bound(distinct.begin(), distinct.end(), times[k]) -
               distinct.begin();
    }
    const auto m = static_cast<Eigen::Index>(distinct.size());
    const Eigen::Index nv = m - 1;  // class 0 pinned at 0

    auto index = [&](const Action& a) {
      return static_cast<std::size_t>(
          std::lower_bound(group.begin(), group.end(), a) - group.begin());
    };

    // Residual rows r = A y - tau over all classes (column 0 dropped later).
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> targets;
    std::vector<const ConstraintEdge*> edges;
    std::set<std::size_t> covered;
    for (const auto& e : graph.edges) {
      if (e.subtask != s) continue;
      edges.push_back(&e);
      const std::size_t a = index(e.pair.first);
      const std::size_t b = index(e.pair.second);
      covered.insert(a);
      covered.insert(b);
      Eigen::RowVectorXd la = Eigen::RowVectorXd::Zero(m);
      Eigen::RowVectorXd lb = Eigen::RowVectorXd::Zero(m);
      Eigen::RowVectorXd om = Eigen::RowVectorXd::Zero(m);
      la[cls[2 * a + 1]] += 1.0 / kSqrt2;
      la[cls[2 * a]] -= 1.0 / kSqrt2;
      lb[cls[2 * b + 1]] += 1.0 / kSqrt2;
      lb[cls[2 * b]] -= 1.0 / kSqrt2;
      om[cls[2 * b]] += 0.5;
      om[cls[2 * b + 1]] += 0.5;
      om[cls[2 * a]] -= 0.5;
      om[cls[2 * a + 1]] -= 0.5;
      rows.push_back(la);
      targets.push_back(e.target.lam_a);
      rows.push_back(lb);
      targets.push_back(e.target.lam_b);
      rows.push_back(om);
      targets.push_back(e.target.omega);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (covered.count(i)) continue;
      // Unrelated action: aim for its typical length.
      const auto* node = graph.node(group[i]);
      const double len = node ? node->mean_length : options.min_length;
      Eigen::RowVectorXd l = Eigen::RowVectorXd::Zero(m);
      l[cls[2 * i + 1]] += 1.0 / kSqrt2;
      l[cls[2 * i]] -= 1.0 / kSqrt2;
      rows.push_back(l);
      targets.push_back(len / kSqrt2);
    }

    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), nv);
    Eigen::VectorXd tau(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      A.row(static_cast<Eigen::Index>(r)) = rows[r].tail(nv);
      tau[static_cast<Eigen::Index>(r)] = targets[r];
    }

    // Ordering: consecutive class gaps >= margin, lengths >= min_length.
    std::vector<Eigen::RowVectorXd> crow;
    std::vector<double> cval;
    auto diff = [&](Eigen::Index lo, Eigen::Index hi, double bound) {
      Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(nv);
      if (hi > 0) g[hi - 1] += 1.0;
      if (lo > 0) g[lo - 1] -= 1.0;
      crow.push_back(g);
      cval.push_back(bound);
    };
    for (Eigen::Index k = 0; k + 1 < m; ++k) diff(k, k + 1, options.margin);
    for (std::size_t i = 0; i < n; ++i) {
      diff(cls[2 * i], cls[2 * i + 1], options.min_length);
    }
    Eigen::MatrixXd C(static_cast<Eigen::Index>(crow.size()), nv);
    Eigen::VectorXd dv(static_cast<Eigen::Index>(crow.size()));
    for (std::size_t r = 0; r < crow.size(); ++r) {
      C.row(static_cast<Eigen::Index>(r)) = crow[r];
      dv[static_cast<Eigen::Index>(r)] = cval[r];
    }

    const double step =
        std::max({plan.unit, options.margin, options.min_length});
    Eigen::VectorXd z0(nv);
    for (Eigen::Index k = 0; k < nv; ++k) {
      z0[k] = static_cast<double>(k + 1) * step;
    }

    Eigen::VectorXd z = z0;
    if (nv > 0) {
      const Eigen::MatrixXd G = A.transpose() * A;
      const Eigen::VectorXd c = -A.transpose() * tau;
      auto qp = active_set_qp(G, c, C, dv, z0, options.max_iterations,
                              options.kkt_tolerance);
      z = qp.z;
      out.stalled = out.stalled || qp.stalled;
      out.iterations += qp.iterations;
    }
    start_sq += (A * z0 - tau).squaredNorm();
    final_sq += (A * z - tau).squaredNorm();

    // Absolute times: pinned class 0 sits at block_start.
    std::vector<double> y(static_cast<std::size_t>(m), block_start);
    for (Eigen::Index k = 1; k < m; ++k) {
      y[static_cast<std::size_t>(k)] = block_start + z[k - 1];
    }
    double block_end = block_start;
    for (std::size_t i = 0; i < n; ++i) {
      TimeEnrichedAction x{group[i], y[static_cast<std::size_t>(cls[2 * i])],
                           y[static_cast<std::size_t>(cls[2 * i + 1])]};
      block_end = std::max(block_end, x.end);
      const auto* node = graph.node(group[i]);
      const Hand h = node ? node->hand : Hand::kLeft;
      (h == Hand::kLeft ? out.plan.left : out.plan.right).push_back(x);
      out.subtask_of[group[i]] = s;
    }
    block_start = block_end + options.subtask_gap;

    for (const auto* e : edges) {
      const auto* a = find_in(out.plan, e->pair.first);
      const auto* b = find_in(out.plan, e->pair.second);
      const AllenRelation got = classify_relation(a->interval(), b->interval());
      if (got != e->relation) {
        throw InfeasibleConstraintsError(
            "parametrized plan lost relation " +
            std::string(to_string(e->relation)) + " between '" +
            e->pair.first.label() + "' and '" + e->pair.second.label() + "'");
      }
      PairResidual r;
      r.pair = e->pair;
      r.relation = e->relation;
      r.target = e->target;
      r.achieved = embed_intervals(a->interval(), b->interval());
      r.residual = distance(r.target, r.achieved);
      out.residuals.push_back(r);
    }
  }
  sort_hands(out.plan);
  out.objective = std::sqrt(final_sq);
  out.start_objective = std::sqrt(start_sq);
  return out;
}

std::vector<SymbolicPlan> symbolic_blocks(const ConstraintGraph& graph,
                                          const SymbolicOptions& options) {
  std::map<Action, Hand> hands;
  for (const auto& n : graph.nodes) hands[n.action] = n.hand;
  std::vector<SymbolicPlan> out;
  for (std::size_t s = 0; s < graph.partition.groups.size(); ++s) {
    const auto& bindings = graph.assignments.at(s).bindings;
    out.push_back(
        symbolic_plan(graph.partition.groups[s], bindings, hands, options));
  }
  return out;
}

PipelineResult plan_pipeline(const Dataset& d, std::size_t rank,
                             const PlannerConfig& config) {
  PipelineResult r;
  r.assessment = assess_all(d, config.eps, config.gmm);
  r.inference =
      infer_assignments(d, r.assessment, {config.theta_pre, config.search});
  r.graph = infer_constraints(d, r.assessment, r.inference, rank,
                              config.parametrize.margin);
  r.blocks = symbolic_blocks(r.graph, config.symbolic);
  r.symbolic = concatenate(r.blocks, 1);
  r.plan = parametrize(r.symbolic, r.graph, config.parametrize);
  return r;
}

}  // namespace tplan
