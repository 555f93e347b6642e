#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tplan/assessment.hpp"
#include "tplan/config.hpp"
#include "tplan/evaluation.hpp"
#include "tplan/gmm.hpp"
#include "tplan/inference.hpp"
#include "tplan/model.hpp"
#include "tplan/planner.hpp"
#include "tplan/synth.hpp"

namespace tplan::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

/// Parses text into JSON; syntax errors become ValidationError with line and
/// column.
json parse_json(std::string_view text, std::string_view source = "<input>");

/// Pretty-printed, newline-terminated. Doubles use shortest round-trip form.
std::string dump(const json& j);

// Dataset: {"task", "demonstrations": [{"id", "left": [...], "right": [...]}]}
// Unknown keys, wrong types and broken invariants are rejected with the JSON
// path of the offending field.
Dataset dataset_from_json(const json& j);
json to_json(const Dataset& d);
Dataset read_dataset(const std::filesystem::path& path);

json to_json(const TimeEnrichedAction& a);
json to_json(const Demonstration& d);
json to_json(const Timing3& t);

json to_json(const TimingModel& m);
TimingModel timing_model_from_json(const json& j);

json assessment_report(const Assessment& a);

json assignments_report(const Inference& inf, std::optional<std::size_t> subtask,
                        std::size_t top);

/// Demonstration-shaped plan plus a provenance block.
json plan_report(const PipelineResult& r, const std::string& task);
json plan_to_json(const ParametrizedPlan& p, const ConstraintGraph& g,
                  const std::string& id);

/// Accepts a plan file, a single demonstration, or a dataset (choosing the
/// demonstration with `demo_id`, or the first one). Also returns the subtask
/// index per action when the file carries one.
struct RenderInput {
  TemporalPlan plan;
  std::map<Action, std::size_t> subtask_of;
  std::string title;
};
RenderInput render_input_from_json(const json& j, const std::string& demo_id);

json eval_report_json(const EvalReport& r);
std::string eval_report_csv(const EvalReport& r);

std::string bench_trace_csv(const BenchTrace& t);

/// Bench instance: {"actions": [{"verb","object"}], "scores": [...],
/// "pre_assigned": [...]} or {"random_scores": {"seed": n}}.
struct BenchInstance {
  std::vector<Action> actions;
  RelationScoreTable scores;
  std::vector<Binding> pre_assigned;
};
BenchInstance bench_instance_from_json(const json& j);

GroundTruthSpec spec_from_json(const json& j);
json to_json(const GroundTruthSpec& s);

}  // namespace tplan::io
