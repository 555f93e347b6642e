// tplan: learn temporal constraints from bimanual demonstrations and plan.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tplan/config.hpp"
#include "tplan/error.hpp"
#include "tplan/evaluation.hpp"
#include "tplan/io.hpp"
#include "tplan/planner.hpp"
#include "tplan/svg.hpp"
#include "tplan/synth.hpp"

namespace fs = std::filesystem;
using tplan::io::json;

namespace {

enum class Verbosity { kQuiet, kNormal, kVerbose };

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool verbose = false;

  Verbosity level() const {
    if (quiet) return Verbosity::kQuiet;
    return verbose ? Verbosity::kVerbose : Verbosity::kNormal;
  }
};

Globals globals;

void info(const std::string& msg) {
  if (globals.level() != Verbosity::kQuiet) std::cout << msg << "\n";
}

void debug(const std::string& msg) {
  if (globals.level() == Verbosity::kVerbose) std::cerr << "[tplan] " << msg << "\n";
}

tplan::Config load_config() {
  tplan::Config cfg;
  if (!globals.config_path.empty()) {
    const auto text = tplan::io::read_file(globals.config_path);
    cfg = tplan::apply_overrides(
        cfg, tplan::io::parse_json(text, globals.config_path));
  }
  if (globals.seed) cfg.seed = *globals.seed;
  tplan::validate(cfg);
  return cfg;
}

/// Every output gets a sibling "<output>.config.json" recording how it was made.
void write_with_config(const fs::path& out, const std::string& content,
                       const std::string& command, const fs::path& input,
                       const tplan::Config& cfg, json extra = json::object()) {
  tplan::io::write_file_atomic(out, content);
  json echo = {{"command", command},
               {"input", input.filename().string()},
               {"config", tplan::to_json(cfg)}};
  for (auto& [k, v] : extra.items()) echo[k] = v;
  fs::path side = out;
  side += ".config.json";
  tplan::io::write_file_atomic(side, tplan::io::dump(echo));
  debug("wrote " + out.string() + " and " + side.string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn temporal task constraints from bimanual demonstrations "
               "and produce timed two-hand plans"};
  app.require_subcommand(1);
  app.add_option("--config", globals.config_path,
                 "JSON file overriding configuration values")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", globals.seed, "Seed for all randomness");
  auto* quiet = app.add_flag("-q,--quiet", globals.quiet, "Only report errors");
  app.add_flag("-v,--verbose", globals.verbose, "Log progress to stderr")
      ->excludes(quiet);

  std::function<void()> run;
  std::string input;
  std::string output;

  auto* synth = app.add_subcommand("synth", "Generate a dataset from a spec");
  std::optional<std::size_t> demos;
  synth->add_option("spec", input, "Ground-truth spec JSON")->required();
  synth->add_option("-o,--output", output, "Dataset JSON to write")->required();
  synth->add_option("--demos", demos, "Override the number of demonstrations");
  synth->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      auto spec = tplan::io::spec_from_json(
          tplan::io::parse_json(tplan::io::read_file(input), input));
      if (globals.seed) spec.seed = *globals.seed;
      if (demos) spec.demonstrations = *demos;
      const auto data = tplan::generate(spec);
      write_with_config(output, tplan::io::dump(tplan::io::to_json(data)),
                        "synth", input, cfg, {{"spec_seed", spec.seed}});
      info("synth: " + std::to_string(data.demonstrations.size()) +
           " demonstrations -> " + output);
    };
  });

  auto* assess = app.add_subcommand("assess", "Score relations and fit timing models");
  assess->add_option("dataset", input, "Dataset JSON")->required();
  assess->add_option("-o,--output", output, "Report JSON to write")->required();
  assess->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      const auto data = tplan::io::read_dataset(input);
      const auto a = tplan::assess_all(data, cfg.eps, cfg.planner().gmm);
      write_with_config(output, tplan::io::dump(tplan::io::assessment_report(a)),
                        "assess", input, cfg);
      info("assess: " + std::to_string(a.scores.size()) + " pairs scored, " +
           std::to_string(a.never_co_occurring.size()) +
           " never co-occur -> " + output);
    };
  });

  auto* infer = app.add_subcommand("infer", "Rank contradiction-free assignments");
  std::optional<std::size_t> subtask;
  std::size_t top = 0;
  infer->add_option("dataset", input, "Dataset JSON")->required();
  infer->add_option("-o,--output", output, "Report JSON to write")->required();
  infer->add_option("--subtask", subtask, "Only report this subtask (0-based)");
  infer->add_option("--top", top, "Keep the k best assignments per subtask (0 = all)");
  infer->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      const auto pc = cfg.planner();
      const auto data = tplan::io::read_dataset(input);
      const auto a = tplan::assess_all(data, cfg.eps, pc.gmm);
      tplan::InferenceOptions opts{cfg.theta_pre, pc.search};
      opts.search.top_k = top;
      const auto inf = tplan::infer_assignments(data, a, opts);
      write_with_config(output,
                        tplan::io::dump(tplan::io::assignments_report(inf, subtask, top)),
                        "infer", input, cfg, {{"top", top}});
      std::string counts;
      for (const auto& s : inf.subtasks) {
        counts += (counts.empty() ? "" : ", ") + std::to_string(s.ranked.size());
      }
      info("infer: " + std::to_string(inf.subtasks.size()) +
           " subtasks, assignments per subtask [" + counts + "] -> " + output);
    };
  });

  auto* plan = app.add_subcommand("plan", "Build a timed two-hand plan");
  std::size_t rank = 1;
  std::string render_path;
  plan->add_option("dataset", input, "Dataset JSON")->required();
  plan->add_option("-o,--output", output, "Plan JSON to write")->required();
  plan->add_option("--rank", rank, "Assignment rank per subtask (1 = best)")
      ->check(CLI::PositiveNumber);
  plan->add_option("--render", render_path, "Also write an SVG Gantt chart");
  plan->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      const auto data = tplan::io::read_dataset(input);
      const auto r = tplan::plan_pipeline(data, rank - 1, cfg.planner());
      write_with_config(output, tplan::io::dump(tplan::io::plan_report(r, data.task)),
                        "plan", input, cfg, {{"rank", rank}});
      if (!render_path.empty()) {
        tplan::SvgOptions so;
        so.title = data.task + " / plan";
        write_with_config(render_path,
                          tplan::render_svg(r.plan.plan, r.plan.subtask_of, so),
                          "plan", input, cfg, {{"rank", rank}});
      }
      info("plan: " + std::to_string(r.graph.partition.groups.size()) +
           " subtasks, objective " + fmt(r.plan.objective) + " (start " +
           fmt(r.plan.start_objective) + ")" +
           (r.plan.stalled ? ", solver hit its iteration cap" : "") + " -> " +
           output);
    };
  });

  auto* eval = app.add_subcommand("eval", "Incremental-learning evaluation");
  std::size_t trials = 50;
  std::string csv_path;
  eval->add_option("dataset", input, "Dataset JSON")->required();
  eval->add_option("-o,--output", output, "Report JSON to write")->required();
  eval->add_option("--csv", csv_path, "Also write one CSV row per trial and prefix");
  eval->add_option("--trials", trials, "Number of random demonstration orders")
      ->check(CLI::PositiveNumber);
  eval->add_option("--rank", rank, "Assignment rank held fixed (1 = best)")
      ->check(CLI::PositiveNumber);
  eval->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      const auto pc = cfg.planner();
      const auto data = tplan::io::read_dataset(input);
      const auto choice = tplan::choose_task(data, rank - 1, pc);
      debug("task choice fixed; running " + std::to_string(trials) + " trials");
      const auto report = tplan::incremental_eval(data, choice, trials, cfg.seed, pc);
      const json extra = {{"trials", trials}, {"rank", rank}};
      write_with_config(output, tplan::io::dump(tplan::io::eval_report_json(report)),
                        "eval", input, cfg, extra);
      if (!csv_path.empty()) {
        write_with_config(csv_path, tplan::io::eval_report_csv(report), "eval",
                          input, cfg, extra);
      }
      std::size_t wins = 0;
      for (const auto& row : report.rows) {
        // Prefix 1 ties up to rounding, so allow 1e-9.
        if (row.plan_distance <= row.baseline_distance + 1e-9) ++wins;
      }
      info("eval: plan at or below baseline in " + std::to_string(wins) + "/" +
           std::to_string(report.rows.size()) + " cells -> " + output);
    };
  });

  auto* bench = app.add_subcommand("bench", "Time the exhaustive assignment search");
  double interval = 0.1;
  std::optional<double> time_limit;
  std::string order = "most-constrained";
  bench->add_option("instance", input, "Bench instance JSON")->required();
  bench->add_option("-o,--output", output, "Trace CSV to write")->required();
  bench->add_option("--interval", interval, "Sampling interval in seconds")
      ->check(CLI::PositiveNumber);
  bench->add_option("--time-limit", time_limit, "Wall limit in seconds (0 = none)");
  bench->add_option("--order", order, "Pair selection order")
      ->check(CLI::IsMember({"most-constrained", "in-order"}));
  bench->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      const auto inst = tplan::io::bench_instance_from_json(
          tplan::io::parse_json(tplan::io::read_file(input), input));
      const tplan::AssignmentProblem problem(inst.actions, inst.scores);
      const auto trace = tplan::bench_assignments(
          problem, inst.pre_assigned, interval, time_limit.value_or(cfg.time_limit),
          order == "in-order" ? tplan::PairOrder::kInOrder
                              : tplan::PairOrder::kMostConstrained);
      write_with_config(output, tplan::io::bench_trace_csv(trace), "bench", input,
                        cfg, {{"interval", interval}, {"order", order}});
      info("bench: " + std::to_string(trace.solutions) + " assignments in " +
           fmt(trace.elapsed) + " s -> " + output);
      if (trace.timed_out) {
        throw tplan::TimeoutError("bench stopped at the time limit; trace is partial");
      }
    };
  });

  auto* render = app.add_subcommand("render", "Draw a plan or demonstration as SVG");
  std::string demo_id;
  double px = 80.0;
  render->add_option("input", input, "Plan, demonstration or dataset JSON")->required();
  render->add_option("-o,--output", output, "SVG to write")->required();
  render->add_option("--demo", demo_id, "Demonstration id when the input is a dataset");
  render->add_option("--px-per-second", px, "Horizontal scale")
      ->check(CLI::PositiveNumber);
  render->callback([&] {
    run = [&] {
      const auto cfg = load_config();
      const auto ri = tplan::io::render_input_from_json(
          tplan::io::parse_json(tplan::io::read_file(input), input), demo_id);
      tplan::SvgOptions so;
      so.px_per_second = px;
      so.title = ri.title;
      write_with_config(output, tplan::render_svg(ri.plan, ri.subtask_of, so),
                        "render", input, cfg);
      info("render: -> " + output);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    run();
  } catch (const tplan::Error& e) {
    std::cerr << "tplan: " << e.what() << "\n";
    switch (e.kind()) {
      case tplan::ErrorKind::kValidation:
        return 2;
      case tplan::ErrorKind::kInfeasible:
        return 3;
      case tplan::ErrorKind::kTimeout:
        return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "tplan: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
