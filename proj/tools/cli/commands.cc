#include "cli/commands.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli/manifest.h"
#include "mcd/baselines_eval.h"
#include "mcd/credit_engine.h"
#include "mcd/error.h"
#include "mcd/event_log.h"
#include "mcd/model_learner.h"
#include "mcd/parallel.h"
#include "mcd/social_graph.h"
#include "mcd/solvers.h"
#include "mcd/synth_gen.h"

namespace mcd::cli {
namespace {

using Clock = std::chrono::steady_clock;

struct Context {
  std::vector<std::string> argv;
  unsigned threads = 1;
};

std::string fmt(double x, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  GenConfig config;
  std::string out_graph, out_log;
};

void run_gen(const Context& ctx, const GenArgs& a) {
  const auto start = Clock::now();
  const auto data = generate(a.config);
  write_graph_file(a.out_graph, data.graph);
  write_log_file(a.out_log, data.log);

  Manifest m("gen", ctx.argv);
  const auto& c = a.config;
  m.set("users", std::to_string(c.users));
  m.set("edges", std::to_string(c.edges));
  m.set("actions", std::to_string(c.actions));
  m.set("initiators", std::to_string(c.initiators_per_action));
  m.set("repeat_rate", c.repeat_rate);
  m.set("adopt", c.adoption_probability);
  m.set("reciprocity", c.reciprocity);
  m.set("mean_delay", c.mean_delay);
  m.set("seed", std::to_string(c.rng_seed));
  m.set("rng", SplitMix64::kAlgorithm);
  m.output(a.out_graph);
  m.output(a.out_log);
  m.write_all(std::chrono::duration<double>(Clock::now() - start).count());
  std::cout << "users " << data.graph.user_count() << "\nedges " << data.graph.edge_count()
            << "\nrecords " << data.log.size() << "\nactions " << data.log.actions().size()
            << '\n';
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string log;
  std::optional<std::size_t> top;
};

void run_stats(const StatsArgs& a) {
  const auto log = read_log_file(a.log);
  struct Row {
    ActionId action;
    std::size_t performers, performances;
    double rate;
  };
  std::vector<Row> rows;
  std::size_t over_ten = 0;
  for (ActionId act : log.actions()) {
    const auto records = log.action_records(act);
    std::vector<UserId> users;
    for (const auto& r : records) users.push_back(r.user);
    std::sort(users.begin(), users.end());
    const auto distinct = static_cast<std::size_t>(
        std::unique(users.begin(), users.end()) - users.begin());
    const double rate = repetition_rate(log, act);
    over_ten += rate > 0.1;
    rows.push_back({act, distinct, records.size(), rate});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& x, const Row& y) { return x.rate > y.rate; });
  if (a.top && *a.top < rows.size()) rows.resize(*a.top);

  std::cout << "records " << log.size() << "\nusers " << log.users().size() << "\nactions "
            << log.actions().size() << "\nactions_rate_over_0.1 " << over_ten << '\n';
  std::cout << "action\tperformers\tperformances\trepetition_rate\n";
  for (const auto& r : rows) {
    std::cout << r.action << '\t' << r.performers << '\t' << r.performances << '\t'
              << fmt(r.rate) << '\n';
  }
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
  std::string log, out_train, out_test;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

void run_split(const Context& ctx, const SplitArgs& a) {
  const auto start = Clock::now();
  const auto log = read_log_file(a.log);
  const auto split = split_by_action(log, a.test_fraction, a.seed);
  write_log_file(a.out_train, split.train);
  write_log_file(a.out_test, split.test);

  Manifest m("split", ctx.argv);
  m.input("log", a.log);
  m.set("test_fraction", a.test_fraction);
  m.set("seed", std::to_string(a.seed));
  m.set("rng", SplitMix64::kAlgorithm);
  m.output(a.out_train);
  m.output(a.out_test);
  m.write_all(std::chrono::duration<double>(Clock::now() - start).count());
  std::cout << "train_actions " << split.train.actions().size() << "\ntest_actions "
            << split.test.actions().size() << '\n';
}

// ---------------------------------------------------------------------------
// learn

struct LearnArgs {
  std::string graph, log, out;
};

void run_learn(const Context& ctx, const LearnArgs& a) {
  const auto start = Clock::now();
  const auto graph = read_graph_file(a.graph);
  const auto log = read_log_file(a.log);
  const auto params = learn(graph, log, ctx.threads);
  write_params_file(a.out, params);

  Manifest m("learn", ctx.argv);
  m.input("graph", a.graph);
  m.input("log", a.log);
  m.set("threads", std::to_string(ctx.threads));
  m.output(a.out);
  m.write_all(std::chrono::duration<double>(Clock::now() - start).count());
  std::cout << "tau_pairs " << params.tau.size() << "\ncount_pairs " << params.action_counts.size()
            << '\n';
}

// ---------------------------------------------------------------------------
// scan

struct ScanArgs {
  std::string graph, params, log;
  std::optional<std::string> dump;
};

void run_scan(const Context& ctx, const ScanArgs& a) {
  const auto start = Clock::now();
  const auto graph = read_graph_file(a.graph);
  const auto params = read_params_file(a.params);
  const auto log = read_log_file(a.log);
  const auto model = scan_log(graph, params, log, ctx.threads);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

  std::cout << "actions " << model->actions().size() << "\nperformers "
            << model->performer_count() << "\ncredit_entries " << model->entry_count()
            << "\npropagation_edges " << model->stats().edges << "\nmissing_tau "
            << model->stats().missing_tau << "\nfallback_tau " << fmt(model->stats().fallback_tau)
            << "\ntime_s " << fmt(elapsed) << '\n';
  if (a.dump) {
    auto out = open_out(*a.dump);
    write_credit_dump(out, *model);
    out.close();
    Manifest m("scan", ctx.argv);
    m.input("graph", a.graph);
    m.input("params", a.params);
    m.input("log", a.log);
    m.set("missing_tau", std::to_string(model->stats().missing_tau));
    m.output(*a.dump);
    m.write_all(elapsed);
  }
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string graph, params, log, mode = "stream", constraint, out;
  std::optional<std::string> weights;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> shuffle;
  std::uint64_t limit = kDefaultEnumerationLimit;
};

Constraint parse_constraint(const std::string& text, const std::optional<std::string>& weights) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw CLI::ValidationError("--constraint", "expected k=N or budget=B");
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  if (key == "k") {
    long long k = 0;
    try {
      k = std::stoll(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw CLI::ValidationError("--constraint", "k must be an integer");
    }
    if (k < 1) throw DomainError("k must be >= 1");
    return Constraint::cardinality(static_cast<std::size_t>(k));
  }
  if (key == "budget") {
    double b = 0.0;
    try {
      b = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw CLI::ValidationError("--constraint", "budget must be a number");
    }
    if (!weights) throw CLI::RequiredError("--weights (required with a budget constraint)");
    return Constraint::knapsack(read_weights_file(*weights, b));
  }
  throw CLI::ValidationError("--constraint", "expected k=N or budget=B");
}

void run_solve(const Context& ctx, const SolveArgs& a) {
  SolveConfig config;
  config.constraint = parse_constraint(a.constraint, a.weights);
  config.mode = a.mode == "stream" ? SolveMode::kStream
              : a.mode == "celf"   ? SolveMode::kCelf
                                   : SolveMode::kBrute;
  config.epsilon = a.epsilon;
  config.shuffle_seed = a.shuffle;
  config.threads = ctx.threads;
  config.enumeration_limit = a.limit;

  const auto start = Clock::now();
  const auto graph = read_graph_file(a.graph);
  const auto params = read_params_file(a.params);
  const auto log = read_log_file(a.log);
  const auto model = scan_log(graph, params, log, ctx.threads);
  const auto result = solve(model, config);
  write_result_file(a.out, result);

  Manifest m("solve", ctx.argv);
  m.input("graph", a.graph);
  m.input("params", a.params);
  m.input("log", a.log);
  if (a.weights) m.input("weights", *a.weights);
  m.set("mode", a.mode);
  m.set("constraint", a.constraint);
  m.set("epsilon", config.epsilon.value_or(default_epsilon(config.constraint)));
  m.set("shuffle", a.shuffle ? std::to_string(*a.shuffle) : std::string("none"));
  m.set("threads", std::to_string(ctx.threads));
  m.set("value", result.value);
  m.set("passes", std::to_string(result.passes));
  m.set("gain_evaluations", std::to_string(result.gain_evaluations));
  m.set("missing_tau", std::to_string(model->stats().missing_tau));
  m.set("solve_time_s", result.wall_time);
  m.output(a.out);
  m.write_all(std::chrono::duration<double>(Clock::now() - start).count());
  std::cout << "value " << fmt(result.value) << "\nseeds " << result.seeds.size() << "\npasses "
            << result.passes << "\ntime_s " << fmt(result.wall_time) << '\n';
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string graph, train, test, report;
  std::optional<std::string> params, plot;
  EvalConfig config;
  bool no_ic = false;
};

void run_evaluate(const Context& ctx, EvaluateArgs a) {
  const auto start = Clock::now();
  const auto graph = read_graph_file(a.graph);
  const auto train = read_log_file(a.train);
  const auto test = read_log_file(a.test);
  a.config.threads = ctx.threads;
  a.config.include_ic = !a.no_ic;
  const auto report = a.params
                          ? evaluate(graph, read_params_file(*a.params), train, test, a.config)
                          : evaluate(graph, train, test, a.config);
  {
    auto out = open_out(a.report);
    write_report(out, report);
  }
  Manifest m("evaluate", ctx.argv);
  m.input("graph", a.graph);
  m.input("train", a.train);
  m.input("test", a.test);
  if (a.params) m.input("params", *a.params);
  m.set("seed_size", std::to_string(a.config.seed_size));
  m.set("epsilon", a.config.epsilon);
  m.set("ic_prob", a.config.ic.edge_probability);
  m.set("ic_sims", std::to_string(a.config.ic.simulations));
  m.set("ic_seed", std::to_string(a.config.ic.rng_seed));
  m.set("rng", report.rng_algorithm);
  m.set("threads", std::to_string(ctx.threads));
  m.output(a.report);
  if (a.plot) {
    auto out = open_out(*a.plot);
    write_plot_series(out, report);
    out.close();
    m.output(*a.plot);
  }
  m.write_all(std::chrono::duration<double>(Clock::now() - start).count());
  std::cout << "actions " << report.per_action.size() << "\nmean_true " << fmt(report.mean_true())
            << "\nmean_mcd " << fmt(report.mean_mcd()) << "\nmean_cd " << fmt(report.mean_cd())
            << '\n';
  for (const auto& [k, v] : report.seed_values) std::cout << "value." << k << ' ' << fmt(v) << '\n';
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  GenConfig config{.users = 2000, .edges = 10000, .actions = 100, .repeat_rate = 0.3,
                   .adoption_probability = 0.15, .rng_seed = 7};
  std::vector<std::size_t> ks{10, 25, 50};
  double epsilon = 0.1;
  double test_fraction = 0.2;
  std::optional<std::string> out;
};

void run_bench(const Context& ctx, const BenchArgs& a) {
  const auto start = Clock::now();
  const auto data = generate(a.config);
  const auto split = split_by_action(data.log, a.test_fraction, a.config.rng_seed);
  const auto params = learn(data.graph, split.train, ctx.threads);
  const auto model = scan_log(data.graph, params, split.test, ctx.threads);
  const auto ground = default_ground(*model);

  std::string table = "k\tmode\tvalue\tpasses\tgain_evals\ttime_s\n";
  for (std::size_t k : a.ks) {
    if (k < 1) throw DomainError("k must be >= 1");
    const auto stream = stream_cardinality(ground, k, model, {.epsilon = a.epsilon, .on_visit = {}});
    const auto celf = celf_greedy(ground, Constraint::cardinality(k), model);
    for (const auto* r : {&stream, &celf}) {
      table += std::to_string(k) + '\t' + (r == &stream ? "stream" : "celf") + '\t' +
               fmt(r->value) + '\t' + std::to_string(r->passes) + '\t' +
               std::to_string(r->gain_evaluations) + '\t' + fmt(r->wall_time, "%.6g") + '\n';
    }
  }
  std::cout << "users " << data.graph.user_count() << " test_actions "
            << split.test.actions().size() << " ground " << ground.size() << " credit_entries "
            << model->entry_count() << '\n'
            << table;
  if (a.out) {
    {
      auto out = open_out(*a.out);
      out << table;
    }
    Manifest m("bench", ctx.argv);
    m.set("users", std::to_string(a.config.users));
    m.set("edges", std::to_string(a.config.edges));
    m.set("actions", std::to_string(a.config.actions));
    m.set("repeat_rate", a.config.repeat_rate);
    m.set("adopt", a.config.adoption_probability);
    m.set("seed", std::to_string(a.config.rng_seed));
    m.set("epsilon", a.epsilon);
    m.set("rng", SplitMix64::kAlgorithm);
    m.output(*a.out);
    m.write_all(std::chrono::duration<double>(Clock::now() - start).count());
  }
}

void add_gen_options(CLI::App* sub, GenConfig& c) {
  sub->add_option("--users", c.users, "Number of users")->capture_default_str();
  sub->add_option("--edges", c.edges, "Target follow-edge count")->capture_default_str();
  sub->add_option("--actions", c.actions, "Number of actions")->capture_default_str();
  sub->add_option("--initiators", c.initiators_per_action, "Initiators per action")
      ->capture_default_str();
  sub->add_option("--repeat-rate", c.repeat_rate, "Target repetition rate in [0,1)")
      ->capture_default_str();
  sub->add_option("--adopt", c.adoption_probability, "Adoption probability per performance")
      ->capture_default_str();
  sub->add_option("--reciprocity", c.reciprocity, "Chance a follow edge is reciprocated")
      ->capture_default_str();
  sub->add_option("--mean-delay", c.mean_delay, "Mean inter-event delay in seconds")
      ->capture_default_str();
  sub->add_option("--seed", c.rng_seed, "RNG seed")->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
  Context ctx;
  ctx.argv.assign(argv, argv + argc);
  ctx.threads = default_threads();

  CLI::App app{"Multi-action credit distribution: learning, scanning and seed selection", "mcd"};
  app.set_version_flag("--version", MCD_VERSION_STRING);
  app.add_option("--threads", ctx.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.require_subcommand(1);
  app.fallthrough();

  std::function<void()> action;

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic graph and event log");
  add_gen_options(gen_cmd, gen.config);
  gen_cmd->add_option("--out-graph", gen.out_graph)->required();
  gen_cmd->add_option("--out-log", gen.out_log)->required();
  gen_cmd->callback([&] { action = [&] { run_gen(ctx, gen); }; });

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Print per-action repetition rates");
  stats_cmd->add_option("--log", stats.log)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--top", stats.top, "Show only the N most repetitive actions");
  stats_cmd->callback([&] { action = [&] { run_stats(stats); }; });

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Split a log into train and test by action");
  split_cmd->add_option("--log", split.log)->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--test-fraction", split.test_fraction)->capture_default_str();
  split_cmd->add_option("--seed", split.seed)->required();
  split_cmd->add_option("--out-train", split.out_train)->required();
  split_cmd->add_option("--out-test", split.out_test)->required();
  split_cmd->callback([&] { action = [&] { run_split(ctx, split); }; });

  LearnArgs learn_args;
  auto* learn_cmd = app.add_subcommand("learn", "Learn delays and counts from a training log");
  learn_cmd->add_option("--graph", learn_args.graph)->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--log", learn_args.log)->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--out", learn_args.out)->required();
  learn_cmd->callback([&] { action = [&] { run_learn(ctx, learn_args); }; });

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Compute total credits for a log");
  scan_cmd->add_option("--graph", scan.graph)->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--params", scan.params)->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--log", scan.log)->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--dump", scan.dump, "Write `a v u credit` lines");
  scan_cmd->callback([&] { action = [&] { run_scan(ctx, scan); }; });

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Select a seed set");
  solve_cmd->add_option("--graph", solve_args.graph)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--params", solve_args.params)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--log", solve_args.log)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--mode", solve_args.mode)
      ->check(CLI::IsMember({"stream", "celf", "brute"}))
      ->capture_default_str();
  solve_cmd->add_option("--constraint", solve_args.constraint, "k=N or budget=B")->required();
  solve_cmd->add_option("--weights", solve_args.weights, "Lines `user weight`")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--epsilon", solve_args.epsilon,
                        "Streaming accuracy (default 0.1 cardinality, 0.05 knapsack)");
  solve_cmd->add_option("--shuffle", solve_args.shuffle, "Stream users in a seeded random order");
  solve_cmd->add_option("--limit", solve_args.limit, "Brute-force enumeration limit")
      ->capture_default_str();
  solve_cmd->add_option("--out", solve_args.out)->required();
  solve_cmd->callback([&] { action = [&] { run_solve(ctx, solve_args); }; });

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compare mCD, CD and IC on a test log");
  eval_cmd->add_option("--graph", eval.graph)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--params", eval.params, "mCD parameters (learned from --train if absent)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--train", eval.train)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", eval.test)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--seed-size", eval.config.seed_size)->capture_default_str();
  eval_cmd->add_option("--epsilon", eval.config.epsilon)->capture_default_str();
  eval_cmd->add_option("--ic-prob", eval.config.ic.edge_probability)->capture_default_str();
  eval_cmd->add_option("--ic-sims", eval.config.ic.simulations)->capture_default_str();
  eval_cmd->add_option("--ic-select-sims", eval.config.ic_selection_simulations,
                       "Replicas per gain evaluation when picking IC seeds")
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval.config.ic.rng_seed, "IC RNG seed")->capture_default_str();
  eval_cmd->add_flag("--no-ic", eval.no_ic, "Skip the IC baseline");
  eval_cmd->add_option("--report", eval.report)->required();
  eval_cmd->add_option("--plot", eval.plot, "CSV series for bar charts");
  eval_cmd->callback([&] { action = [&] { run_evaluate(ctx, eval); }; });

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Streaming vs CELF on a generated instance");
  add_gen_options(bench_cmd, bench.config);
  bench_cmd->add_option("--k", bench.ks, "Seed-set sizes")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--epsilon", bench.epsilon)->capture_default_str();
  bench_cmd->add_option("--test-fraction", bench.test_fraction)->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Also write the table here");
  bench_cmd->callback([&] { action = [&] { run_bench(ctx, bench); }; });

  try {
    app.parse(argc, argv);
    if (action) action();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cerr << "mcd: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const mcd::Error& e) {
    std::cerr << "mcd: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mcd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mcd::cli
