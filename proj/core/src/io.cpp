#include "tplan/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "tplan/error.hpp"
#include "tplan/rng.hpp"

namespace tplan::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const char* type_name(const json& j) { return j.type_name(); }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    fail(path, std::string("expected an object, got ") + type_name(j));
  }
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(path + "." + key, "unknown key");
  }
}

const json& field(const json& j, const std::string& path, const char* key) {
  require_object(j, path);
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

const json* optional_field(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(path, std::string("expected a number, got ") + type_name(j));
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "number must be finite");
  return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) {
    fail(path, std::string("expected a string, got ") + type_name(j));
  }
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) {
    fail(path, std::string("expected an array, got ") + type_name(j));
  }
  return j;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number_field(const json& j, const std::string& path, const char* key) {
  return number(field(j, path, key), path + "." + key);
}

std::string string_field(const json& j, const std::string& path,
                         const char* key) {
  return string(field(j, path, key), path + "." + key);
}

Action action_fields(const json& j, const std::string& path) {
  Action a{string_field(j, path, "verb"), string_field(j, path, "object")};
  if (a.verb.empty()) fail(path + ".verb", "must be non-empty");
  if (a.object.empty()) fail(path + ".object", "must be non-empty");
  return a;
}

Action action_from(const json& j, const std::string& path) {
  check_keys(j, path, {"verb", "object"});
  return action_fields(j, path);
}

json action_json(const Action& a) {
  return {{"verb", a.verb}, {"object", a.object}};
}

AllenRelation relation_from(const json& j, const std::string& path) {
  const std::string name = string(j, path);
  const auto r = parse_relation(name);
  if (!r) fail(path, "unknown relation '" + name + "'");
  return *r;
}

Hand hand_from(const json& j, const std::string& path) {
  const std::string name = string(j, path);
  if (name == "left") return Hand::kLeft;
  if (name == "right") return Hand::kRight;
  fail(path, "hand must be 'left' or 'right'");
}

ActionSequence sequence_from(const json& j, const std::string& path) {
  ActionSequence out;
  const auto& arr = array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = at(path, i);
    check_keys(arr[i], p, {"verb", "object", "start", "end", "subtask"});
    TimeEnrichedAction a;
    a.action = action_fields(arr[i], p);
    a.start = number_field(arr[i], p, "start");
    a.end = number_field(arr[i], p, "end");
    out.push_back(a);
  }
  return out;
}

json sequence_json(const ActionSequence& seq) {
  json out = json::array();
  for (const auto& a : seq) out.push_back(to_json(a));
  return out;
}

json binding_json(const Binding& b) {
  return {{"a", action_json(b.pair.first)},
          {"b", action_json(b.pair.second)},
          {"relation", to_string(b.relation)},
          {"score", b.score}};
}

json scores_json(const RelationScores& s) {
  json out = json::object();
  for (auto r : kAllRelations) out[std::string(to_string(r))] = s[index_of(r)];
  return out;
}

json vector3(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

Eigen::Vector3d vector3_from(const json& j, const std::string& path) {
  const auto& arr = array(j, path);
  if (arr.size() != 3) fail(path, "expected 3 numbers");
  return {number(arr[0], at(path, 0)), number(arr[1], at(path, 1)),
          number(arr[2], at(path, 2))};
}

Timing3 timing_from(const json& j, const std::string& path) {
  return {number_field(j, path, "lam_a"), number_field(j, path, "lam_b"),
          number_field(j, path, "omega")};
}

ActionPair pair_from(const json& j, const std::string& path) {
  return {action_from(field(j, path, "a"), path + ".a"),
          action_from(field(j, path, "b"), path + ".b")};
}

std::string shortest(double v) { return json(v).dump(); }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ValidationError("cannot write '" + path.string() + "'");
  }
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte ? e.byte - 1 : 0,
                                                  text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(std::string(source) + ":" + std::to_string(line) +
                          ":" + std::to_string(col) + ": invalid JSON");
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Dataset

Dataset dataset_from_json(const json& j) {
  check_keys(j, "$", {"task", "demonstrations"});
  Dataset d;
  d.task = string_field(j, "$", "task");
  const auto& demos = array(field(j, "$", "demonstrations"), "$.demonstrations");
  for (std::size_t i = 0; i < demos.size(); ++i) {
    const std::string p = at("$.demonstrations", i);
    check_keys(demos[i], p, {"id", "left", "right"});
    Demonstration demo;
    demo.id = string_field(demos[i], p, "id");
    demo.left = sequence_from(field(demos[i], p, "left"), p + ".left");
    demo.right = sequence_from(field(demos[i], p, "right"), p + ".right");
    d.demonstrations.push_back(std::move(demo));
  }
  try {
    validate_dataset(d);
  } catch (const EmptyDatasetError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("$.") + e.what());
  }
  return d;
}

json to_json(const TimeEnrichedAction& a) {
  return {{"verb", a.action.verb},
          {"object", a.action.object},
          {"start", a.start},
          {"end", a.end}};
}

json to_json(const Demonstration& d) {
  return {{"id", d.id},
          {"left", sequence_json(d.left)},
          {"right", sequence_json(d.right)}};
}

json to_json(const Dataset& d) {
  json demos = json::array();
  for (const auto& demo : d.demonstrations) demos.push_back(to_json(demo));
  return {{"task", d.task}, {"demonstrations", demos}};
}

Dataset read_dataset(const std::filesystem::path& path) {
  return dataset_from_json(parse_json(read_file(path), path.string()));
}

json to_json(const Timing3& t) {
  return {{"lam_a", t.lam_a}, {"lam_b", t.lam_b}, {"omega", t.omega}};
}

// ---------------------------------------------------------------------------
// Timing models

json to_json(const TimingModel& m) {
  json comps = json::array();
  for (const auto& c : m.components) {
    json cov = json::array();
    for (int r = 0; r < 3; ++r) {
      cov.push_back({c.covariance(r, 0), c.covariance(r, 1), c.covariance(r, 2)});
    }
    comps.push_back(
        {{"weight", c.weight}, {"mean", vector3(c.mean)}, {"covariance", cov}});
  }
  const auto& f = m.fit_meta;
  return {
      {"pair", {action_json(m.pair.first), action_json(m.pair.second)}},
      {"n_points", m.n_points},
      {"components", comps},
      {"fit_meta",
       {{"k", f.k},
        {"seed", f.seed},
        {"log_likelihood", f.log_likelihood},
        {"bic", f.bic},
        {"iterations", f.iterations},
        {"covariance_floor", f.covariance_floor},
        {"degenerate", f.degenerate},
        {"log_likelihood_trace", f.log_likelihood_trace}}},
  };
}

TimingModel timing_model_from_json(const json& j) {
  check_keys(j, "$", {"pair", "n_points", "components", "fit_meta"});
  TimingModel m;
  const auto& pair = array(field(j, "$", "pair"), "$.pair");
  if (pair.size() != 2) fail("$.pair", "expected two actions");
  m.pair = {action_from(pair[0], "$.pair[0]"), action_from(pair[1], "$.pair[1]")};
  m.n_points = unsigned_int(field(j, "$", "n_points"), "$.n_points");
  const auto& comps = array(field(j, "$", "components"), "$.components");
  if (comps.empty()) fail("$.components", "need at least one component");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string p = at("$.components", i);
    check_keys(comps[i], p, {"weight", "mean", "covariance"});
    GaussianComponent c;
    c.weight = number_field(comps[i], p, "weight");
    c.mean = vector3_from(field(comps[i], p, "mean"), p + ".mean");
    const auto& cov = array(field(comps[i], p, "covariance"), p + ".covariance");
    if (cov.size() != 3) fail(p + ".covariance", "expected a 3x3 matrix");
    for (int r = 0; r < 3; ++r) {
      c.covariance.row(r) =
          vector3_from(cov[static_cast<std::size_t>(r)],
                       at(p + ".covariance", static_cast<std::size_t>(r)))
              .transpose();
    }
    m.components.push_back(c);
  }
  if (const auto* meta = optional_field(j, "fit_meta")) {
    const std::string p = "$.fit_meta";
    check_keys(*meta, p,
               {"k", "seed", "log_likelihood", "bic", "iterations",
                "covariance_floor", "degenerate", "log_likelihood_trace"});
    auto& f = m.fit_meta;
    if (const auto* v = optional_field(*meta, "k")) {
      f.k = static_cast<int>(unsigned_int(*v, p + ".k"));
    }
    if (const auto* v = optional_field(*meta, "seed")) {
      f.seed = unsigned_int(*v, p + ".seed");
    }
    if (const auto* v = optional_field(*meta, "log_likelihood")) {
      f.log_likelihood = number(*v, p + ".log_likelihood");
    }
    if (const auto* v = optional_field(*meta, "bic")) {
      f.bic = number(*v, p + ".bic");
    }
    if (const auto* v = optional_field(*meta, "iterations")) {
      f.iterations = static_cast<int>(unsigned_int(*v, p + ".iterations"));
    }
    if (const auto* v = optional_field(*meta, "covariance_floor")) {
      f.covariance_floor = number(*v, p + ".covariance_floor");
    }
    if (const auto* v = optional_field(*meta, "degenerate")) {
      if (!v->is_boolean()) fail(p + ".degenerate", "expected a boolean");
      f.degenerate = v->get<bool>();
    }
    if (const auto* v = optional_field(*meta, "log_likelihood_trace")) {
      const auto& arr = array(*v, p + ".log_likelihood_trace");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        f.log_likelihood_trace.push_back(
            number(arr[i], at(p + ".log_likelihood_trace", i)));
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Reports

json assessment_report(const Assessment& a) {
  json actions = json::array();
  for (const auto& act : a.actions) actions.push_back(action_json(act));
  json pairs = json::array();
  for (const auto& p : a.scores.pairs()) {
    json entry = {{"a", action_json(p.first)},
                  {"b", action_json(p.second)},
                  {"co_occurrences", a.co_occurrences.at(p)},
                  {"scores", scores_json(a.scores.scores(p))}};
    if (auto it = a.models.find(p); it != a.models.end()) {
      entry["model"] = to_json(it->second);
    }
    pairs.push_back(entry);
  }
  json never = json::array();
  for (const auto& p : a.never_co_occurring) {
    never.push_back({action_json(p.first), action_json(p.second)});
  }
  return {{"eps", a.eps},
          {"actions", actions},
          {"pairs", pairs},
          {"never_co_occurring", never}};
}

json assignments_report(const Inference& inf, std::optional<std::size_t> subtask,
                        std::size_t top) {
  if (subtask && *subtask >= inf.subtasks.size()) {
    throw ValidationError("subtask " + std::to_string(*subtask) +
                          " does not exist (there are " +
                          std::to_string(inf.subtasks.size()) + ")");
  }
  json subtasks = json::array();
  for (std::size_t s = 0; s < inf.subtasks.size(); ++s) {
    if (subtask && *subtask != s) continue;
    const auto& sol = inf.subtasks[s];
    json actions = json::array();
    for (const auto& a : sol.actions) actions.push_back(action_json(a));
    json pre = json::array();
    for (const auto& b : sol.pre_assigned) pre.push_back(binding_json(b));
    json ranked = json::array();
    for (std::size_t k = 0; k < sol.ranked.size() && (top == 0 || k < top);
         ++k) {
      json bindings = json::array();
      for (const auto& b : sol.ranked[k].bindings) {
        bindings.push_back(binding_json(b));
      }
      ranked.push_back({{"rank", k + 1},
                        {"score", sol.ranked[k].score},
                        {"bindings", bindings}});
    }
    subtasks.push_back({{"index", s},
                        {"actions", actions},
                        {"pre_assigned", pre},
                        {"ranked_count", sol.ranked.size()},
                        {"assignments", ranked}});
  }
  return {{"subtasks", subtasks}};
}

json plan_to_json(const ParametrizedPlan& p, const ConstraintGraph& g,
                  const std::string& id) {
  json subtasks = json::array();
  for (const auto& group : g.partition.groups) {
    json acts = json::array();
    for (const auto& a : group) acts.push_back(action_json(a));
    subtasks.push_back(acts);
  }
  json relations = json::array();
  for (const auto& r : p.residuals) {
    relations.push_back({{"a", action_json(r.pair.first)},
                         {"b", action_json(r.pair.second)},
                         {"relation", to_string(r.relation)},
                         {"target", to_json(r.target)},
                         {"achieved", to_json(r.achieved)},
                         {"residual", r.residual}});
  }
  json ranks = json::array();
  for (auto r : g.ranks) ranks.push_back(r + 1);
  return {{"id", id},
          {"left", sequence_json(p.plan.left)},
          {"right", sequence_json(p.plan.right)},
          {"provenance",
           {{"ranks", ranks},
            {"subtasks", subtasks},
            {"objective", p.objective},
            {"start_objective", p.start_objective},
            {"stalled", p.stalled},
            {"iterations", p.iterations},
            {"relations", relations}}}};
}

json plan_report(const PipelineResult& r, const std::string& task) {
  json out = plan_to_json(r.plan, r.graph, "plan");
  out["task"] = task;
  out["provenance"]["symbolic"] = {{"unit", r.symbolic.unit},
                                   {"left", sequence_json(r.symbolic.plan.left)},
                                   {"right", sequence_json(r.symbolic.plan.right)}};
  return out;
}

RenderInput render_input_from_json(const json& j, const std::string& demo_id) {
  require_object(j, "$");
  RenderInput out;
  if (j.contains("demonstrations")) {
    const Dataset d = dataset_from_json(j);
    const Demonstration* pick = &d.demonstrations.front();
    if (!demo_id.empty()) {
      pick = nullptr;
      for (const auto& demo : d.demonstrations) {
        if (demo.id == demo_id) pick = &demo;
      }
      if (!pick) fail("$.demonstrations", "no demonstration with id '" +
                                              demo_id + "'");
    }
    out.plan = {pick->left, pick->right, std::nullopt};
    out.title = d.task + " / " + pick->id;
    return out;
  }
  out.plan.left = sequence_from(field(j, "$", "left"), "$.left");
  out.plan.right = sequence_from(field(j, "$", "right"), "$.right");
  const auto violations = validate_plan(out.plan);
  if (!violations.empty()) fail("$", violations.front().message);
  if (const auto* id = optional_field(j, "id")) out.title = string(*id, "$.id");
  if (const auto* task = optional_field(j, "task")) {
    out.title = string(*task, "$.task") + " / " + out.title;
  }
  if (const auto* prov = optional_field(j, "provenance")) {
    if (const auto* subs = optional_field(*prov, "subtasks")) {
      const auto& arr = array(*subs, "$.provenance.subtasks");
      for (std::size_t s = 0; s < arr.size(); ++s) {
        const std::string p = at("$.provenance.subtasks", s);
        const auto& acts = array(arr[s], p);
        for (std::size_t k = 0; k < acts.size(); ++k) {
          out.subtask_of[action_from(acts[k], at(p, k))] = s;
        }
      }
    }
  }
  return out;
}

json eval_report_json(const EvalReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"trial", row.trial},
                    {"prefix", row.prefix},
                    {"plan_distance", row.plan_distance},
                    {"baseline_distance", row.baseline_distance},
                    {"baseline_id", row.baseline_id}});
  }
  json summary = json::array();
  for (const auto& s : r.summary) {
    summary.push_back({{"prefix", s.prefix},
                       {"plan_mean", s.plan_mean},
                       {"plan_variance", s.plan_variance},
                       {"baseline_mean", s.baseline_mean},
                       {"baseline_variance", s.baseline_variance}});
  }
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"definition", r.definition},
          {"trial_seeds", r.trial_seeds},
          {"summary", summary},
          {"rows", rows}};
}

std::string eval_report_csv(const EvalReport& r) {
  std::string out = "trial,prefix,plan_distance,baseline_distance,baseline_id\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.trial) + "," + std::to_string(row.prefix) + "," +
           shortest(row.plan_distance) + "," +
           shortest(row.baseline_distance) + "," + row.baseline_id + "\n";
  }
  return out;
}

std::string bench_trace_csv(const BenchTrace& t) {
  std::string out = "elapsed,partials,solutions\n";
  for (const auto& s : t.samples) {
    out += shortest(s.elapsed) + "," + std::to_string(s.partials) + "," +
           std::to_string(s.solutions) + "\n";
  }
  return out;
}

BenchInstance bench_instance_from_json(const json& j) {
  check_keys(j, "$", {"actions", "scores", "random_scores", "pre_assigned"});
  BenchInstance b;
  const auto& acts = array(field(j, "$", "actions"), "$.actions");
  std::set<Action> seen;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    b.actions.push_back(action_from(acts[i], at("$.actions", i)));
    if (!seen.insert(b.actions.back()).second) {
      fail(at("$.actions", i), "duplicate action");
    }
  }
  auto known = [&](const Action& a, const std::string& path) {
    if (!seen.count(a)) fail(path, "action '" + a.label() + "' is not listed");
  };

  const json* scores = optional_field(j, "scores");
  const json* random = optional_field(j, "random_scores");
  if ((scores == nullptr) == (random == nullptr)) {
    fail("$", "give exactly one of 'scores' and 'random_scores'");
  }
  if (scores) {
    const auto& arr = array(*scores, "$.scores");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = at("$.scores", i);
      check_keys(arr[i], p, {"a", "b", "scores"});
      const ActionPair pair = pair_from(arr[i], p);
      known(pair.first, p + ".a");
      known(pair.second, p + ".b");
      const auto& s = field(arr[i], p, "scores");
      require_object(s, p + ".scores");
      RelationScores rs{};
      for (const auto& [name, v] : s.items()) {
        const auto r = parse_relation(name);
        if (!r) fail(p + ".scores." + name, "unknown relation");
        rs[index_of(*r)] = number(v, p + ".scores." + name);
      }
      b.scores.set(pair, rs);
    }
  } else {
    check_keys(*random, "$.random_scores", {"seed"});
    Rng rng(unsigned_int(field(*random, "$.random_scores", "seed"),
                         "$.random_scores.seed"));
    std::vector<Action> sorted(seen.begin(), seen.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      for (std::size_t k = i + 1; k < sorted.size(); ++k) {
        RelationScores rs{};
        for (auto& v : rs) v = rng.uniform();
        b.scores.set({sorted[i], sorted[k]}, rs);
      }
    }
  }
  if (const auto* pre = optional_field(j, "pre_assigned")) {
    const auto& arr = array(*pre, "$.pre_assigned");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = at("$.pre_assigned", i);
      check_keys(arr[i], p, {"a", "b", "relation"});
      const ActionPair pair = pair_from(arr[i], p);
      known(pair.first, p + ".a");
      known(pair.second, p + ".b");
      const AllenRelation r = relation_from(field(arr[i], p, "relation"),
                                            p + ".relation");
      b.pre_assigned.push_back({pair, r, b.scores.score(pair, r)});
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Ground-truth specs

GroundTruthSpec spec_from_json(const json& j) {
  check_keys(j, "$",
             {"task", "actions", "modes", "demonstrations", "seed", "noise",
              "pair_noise", "unit", "subtask_gap", "start_jitter", "margin",
              "min_length"});
  GroundTruthSpec s;
  s.task = string_field(j, "$", "task");
  const auto& acts = array(field(j, "$", "actions"), "$.actions");
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const std::string p = at("$.actions", i);
    check_keys(acts[i], p, {"verb", "object", "hand", "subtask"});
    SynthAction a;
    a.action = action_fields(acts[i], p);
    a.hand = hand_from(field(acts[i], p, "hand"), p + ".hand");
    a.subtask = unsigned_int(field(acts[i], p, "subtask"), p + ".subtask");
    s.actions.push_back(a);
  }
  const auto& modes = array(field(j, "$", "modes"), "$.modes");
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const std::string p = at("$.modes", m);
    check_keys(modes[m], p, {"probability", "relations", "targets"});
    SynthMode mode;
    if (const auto* v = optional_field(modes[m], "probability")) {
      mode.probability = number(*v, p + ".probability");
    }
    const auto& rels = array(field(modes[m], p, "relations"), p + ".relations");
    for (std::size_t i = 0; i < rels.size(); ++i) {
      const std::string q = at(p + ".relations", i);
      check_keys(rels[i], q, {"a", "b", "relation"});
      mode.relations.push_back(
          {pair_from(rels[i], q),
           relation_from(field(rels[i], q, "relation"), q + ".relation"), 1.0});
    }
    if (const auto* t = optional_field(modes[m], "targets")) {
      const auto& arr = array(*t, p + ".targets");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string q = at(p + ".targets", i);
        check_keys(arr[i], q, {"a", "b", "lam_a", "lam_b", "omega"});
        mode.targets[pair_from(arr[i], q)] = timing_from(arr[i], q);
      }
    }
    s.modes.push_back(std::move(mode));
  }
  if (const auto* v = optional_field(j, "demonstrations")) {
    s.demonstrations = unsigned_int(*v, "$.demonstrations");
  }
  if (const auto* v = optional_field(j, "seed")) s.seed = unsigned_int(*v, "$.seed");
  if (const auto* v = optional_field(j, "noise")) s.noise = number(*v, "$.noise");
  if (const auto* v = optional_field(j, "pair_noise")) {
    const auto& arr = array(*v, "$.pair_noise");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string q = at("$.pair_noise", i);
      check_keys(arr[i], q, {"a", "b", "noise"});
      s.pair_noise[pair_from(arr[i], q)] = number_field(arr[i], q, "noise");
    }
  }
  if (const auto* v = optional_field(j, "unit")) s.unit = number(*v, "$.unit");
  if (const auto* v = optional_field(j, "subtask_gap")) {
    s.subtask_gap = number(*v, "$.subtask_gap");
  }
  if (const auto* v = optional_field(j, "start_jitter")) {
    s.start_jitter = number(*v, "$.start_jitter");
  }
  if (const auto* v = optional_field(j, "margin")) s.margin = number(*v, "$.margin");
  if (const auto* v = optional_field(j, "min_length")) {
    s.min_length = number(*v, "$.min_length");
  }
  return s;
}

json to_json(const GroundTruthSpec& s) {
  json actions = json::array();
  for (const auto& a : s.actions) {
    actions.push_back({{"verb", a.action.verb},
                       {"object", a.action.object},
                       {"hand", to_string(a.hand)},
                       {"subtask", a.subtask}});
  }
  json modes = json::array();
  for (const auto& m : s.modes) {
    json rels = json::array();
    for (const auto& b : m.relations) {
      rels.push_back({{"a", action_json(b.pair.first)},
                      {"b", action_json(b.pair.second)},
                      {"relation", to_string(b.relation)}});
    }
    json targets = json::array();
    for (const auto& [p, t] : m.targets) {
      targets.push_back({{"a", action_json(p.first)},
                         {"b", action_json(p.second)},
                         {"lam_a", t.lam_a},
                         {"lam_b", t.lam_b},
                         {"omega", t.omega}});
    }
    modes.push_back(
        {{"probability", m.probability}, {"relations", rels}, {"targets", targets}});
  }
  json pair_noise = json::array();
  for (const auto& [p, v] : s.pair_noise) {
    pair_noise.push_back(
        {{"a", action_json(p.first)}, {"b", action_json(p.second)}, {"noise", v}});
  }
  return {{"task", s.task},
          {"actions", actions},
          {"modes", modes},
          {"demonstrations", s.demonstrations},
          {"seed", s.seed},
          {"noise", s.noise},
          {"pair_noise", pair_noise},
          {"unit", s.unit},
          {"subtask_gap", s.subtask_gap},
          {"start_jitter", s.start_jitter},
          {"margin", s.margin},
          {"min_length", s.min_length}};
}

}  // namespace tplan::io
