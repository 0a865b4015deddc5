#include "mcd/baselines_eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "mcd/error.h"
#include "mcd/parallel.h"

namespace mcd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double default_epsilon(const Constraint& constraint) {
  return constraint.kind() == Constraint::Kind::kCardinality ? 0.1 : 0.05;
}

SeedResult solve(const std::shared_ptr<const CreditModel>& model, const SolveConfig& config) {
  const double epsilon = config.epsilon.value_or(default_epsilon(config.constraint));
  const auto ground = config.shuffle_seed ? shuffled_ground(*model, *config.shuffle_seed)
                                          : default_ground(*model);
  Constraint constraint = config.constraint;
  if (constraint.kind() == Constraint::Kind::kKnapsack) {
    constraint = Constraint::knapsack(normalize_weights(constraint.weights()));
    for (UserId u : ground) constraint.weights().weight_of(u);
  }
  const bool cardinality = constraint.kind() == Constraint::Kind::kCardinality;

  switch (config.mode) {
    case SolveMode::kStream: {
      StreamOptions options;
      options.epsilon = epsilon;
      return cardinality ? stream_cardinality(ground, constraint.k(), model, options)
                         : stream_budgeted(ground, constraint.weights(), model, options);
    }
    case SolveMode::kCelf:
      if (cardinality && constraint.k() < 1) throw DomainError("k must be >= 1");
      return celf_greedy(ground, constraint, model);
    case SolveMode::kBrute:
      if (cardinality && constraint.k() < 1) throw DomainError("k must be >= 1");
      return brute_force(ground, constraint, *model, config.enumeration_limit);
  }
  throw DomainError("unknown solve mode");
}

PipelineResult run_pipeline(const SocialGraph& graph, const EventLog& train, const EventLog& test,
                            const SolveConfig& config) {
  PipelineResult out;
  out.params = learn(graph, train, config.threads);
  out.model = scan_log(graph, out.params, test, config.threads);
  out.result = solve(out.model, config);
  return out;
}

PipelineResult cd_baseline(const SocialGraph& graph, const EventLog& train, const EventLog& test,
                           const SolveConfig& config) {
  return run_pipeline(graph, dedupe_first_occurrence(train), dedupe_first_occurrence(test),
                      config);
}

// ---------------------------------------------------------------------------
// Independent Cascade

IcEstimate ic_estimate(const SocialGraph& graph, std::span<const UserId> seeds,
                       const IcConfig& config) {
  if (!(config.edge_probability >= 0.0 && config.edge_probability <= 1.0)) {
    throw DomainError("edge probability must lie in [0, 1]");
  }
  if (config.simulations < 1) throw DomainError("simulations must be >= 1");

  const auto& users = graph.users();
  std::unordered_map<UserId, std::uint32_t> index;
  index.reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) index.emplace(users[i], static_cast<std::uint32_t>(i));
  std::vector<std::uint32_t> seed_idx;
  for (UserId s : seeds) {
    auto it = index.find(s);
    if (it == index.end()) throw DomainError("seed " + std::to_string(s) + " is not in the graph");
    seed_idx.push_back(it->second);
  }
  std::vector<std::vector<std::uint32_t>> out(users.size());
  for (const auto& [v, u] : graph.edges()) out[index.at(v)].push_back(index.at(u));

  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (config.simulations + kBlock - 1) / kBlock;
  std::vector<std::uint32_t> sizes(config.simulations, 0);
  parallel_for(blocks, config.threads, [&](std::size_t block) {
    std::vector<std::uint32_t> stamp(users.size(), 0);
    std::vector<std::uint32_t> frontier;
    const std::size_t first = block * kBlock;
    const std::size_t last = std::min(first + kBlock, config.simulations);
    for (std::size_t r = first; r < last; ++r) {
      const auto mark = static_cast<std::uint32_t>(r - first + 1);
      SplitMix64 rng = SplitMix64::substream(config.rng_seed, r);
      frontier.clear();
      std::uint32_t active = 0;
      for (auto s : seed_idx) {
        if (stamp[s] == mark) continue;
        stamp[s] = mark;
        frontier.push_back(s);
        ++active;
      }
      for (std::size_t head = 0; head < frontier.size(); ++head) {
        for (auto u : out[frontier[head]]) {
          if (stamp[u] == mark) continue;
          if (rng.bernoulli(config.edge_probability)) {
            stamp[u] = mark;
            frontier.push_back(u);
            ++active;
          }
        }
      }
      sizes[r] = active;
    }
  });

  IcEstimate est;
  est.simulations = config.simulations;
  double sum = 0.0;
  for (auto s : sizes) sum += s;
  est.mean = sum / static_cast<double>(sizes.size());
  if (sizes.size() > 1) {
    double sq = 0.0;
    for (auto s : sizes) sq += (s - est.mean) * (s - est.mean);
    est.stddev = std::sqrt(sq / static_cast<double>(sizes.size() - 1));
  }
  return est;
}

double ic_spread(const SocialGraph& graph, std::span<const UserId> seeds, const IcConfig& config) {
  return ic_estimate(graph, seeds, config).mean;
}

std::vector<UserId> ic_greedy_seeds(const SocialGraph& graph, std::span<const UserId> ground,
                                    std::size_t k, const IcConfig& config) {
  struct Entry {
    double gain;
    UserId user;
    std::size_t round;
    bool operator<(const Entry& o) const {
      if (gain != o.gain) return gain < o.gain;
      return user > o.user;
    }
  };
  std::vector<UserId> seeds;
  double current = 0.0;
  std::priority_queue<Entry> heap;
  for (UserId x : ground) {
    if (!graph.has_user(x)) continue;
    const UserId single[] = {x};
    heap.push({ic_spread(graph, single, config), x, 0});
  }
  while (seeds.size() < k && !heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    if (top.round == seeds.size()) {
      seeds.push_back(top.user);
      current += top.gain;
      continue;
    }
    seeds.push_back(top.user);
    top.gain = ic_spread(graph, seeds, config) - current;
    seeds.pop_back();
    top.round = seeds.size();
    heap.push(top);
  }
  return seeds;
}

// ---------------------------------------------------------------------------
// Estimation accuracy

namespace {

double mean_of(const std::vector<ActionEstimate>& rows, double ActionEstimate::*field) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.*field;
  return sum / static_cast<double>(rows.size());
}

std::vector<UserId> initiators_of(const CreditModel::Action& act) {
  std::vector<UserId> out;
  for (std::size_t i = 0; i < act.size(); ++i) {
    if (act.parent_ptr[i] == act.parent_ptr[i + 1]) out.push_back(act.nodes[i]);
  }
  return out;
}

void sort_by_popularity(std::vector<ActionEstimate>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ActionEstimate& a, const ActionEstimate& b) {
    if (a.true_count != b.true_count) return a.true_count < b.true_count;
    return a.action < b.action;
  });
}

}  // namespace

double EvalReport::mean_true() const {
  if (per_action.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : per_action) sum += static_cast<double>(r.true_count);
  return sum / static_cast<double>(per_action.size());
}
double EvalReport::mean_mcd() const { return mean_of(per_action, &ActionEstimate::mcd_estimate); }
double EvalReport::mean_cd() const { return mean_of(per_action, &ActionEstimate::cd_estimate); }

EvalReport estimate_accuracy(const SocialGraph& graph, const LearnedParams& params,
                             const EventLog& test, std::size_t seed_size, double epsilon,
                             unsigned threads) {
  if (seed_size < 1) throw DomainError("seed size must be >= 1");
  EvalReport report;
  report.seed_size = seed_size;

  auto start = Clock::now();
  const auto model = scan_log(graph, params, test, threads);
  report.runtimes["mcd_scan"] = seconds_since(start);

  StreamOptions options;
  options.epsilon = epsilon;
  const auto seeds = stream_cardinality(default_ground(*model), seed_size, model, options);
  report.runtimes["mcd_stream"] = seeds.wall_time;
  report.mcd_seeds = seeds.seeds;
  report.seed_values["mcd_stream"] = seeds.value;

  for (const auto& act : model->actions()) {
    ActionEstimate row;
    row.action = act.id;
    row.true_count = act.size();
    row.mcd_estimate = action_estimate(*model, act.id, report.mcd_seeds);
    row.initiator_estimate = action_estimate(*model, act.id, initiators_of(act));
    report.per_action.push_back(row);
  }
  sort_by_popularity(report.per_action);
  return report;
}

EvalReport evaluate(const SocialGraph& graph, const EventLog& train, const EventLog& test,
                    const EvalConfig& config) {
  return evaluate(graph, learn(graph, train, config.threads), train, test, config);
}

EvalReport evaluate(const SocialGraph& graph, const LearnedParams& mcd_params,
                    const EventLog& train, const EventLog& test, const EvalConfig& config) {
  auto start = Clock::now();
  const auto cd_train = dedupe_first_occurrence(train);
  const auto cd_params = learn(graph, cd_train, config.threads);
  const double learn_time = seconds_since(start);

  EvalReport report = estimate_accuracy(graph, mcd_params, test, config.seed_size, config.epsilon,
                                        config.threads);
  report.runtimes["learn_cd"] = learn_time;

  start = Clock::now();
  const auto cd_test = dedupe_first_occurrence(test);
  const auto cd_model = scan_log(graph, cd_params, cd_test, config.threads);
  StreamOptions options;
  options.epsilon = config.epsilon;
  const auto cd_stream = stream_cardinality(default_ground(*cd_model), config.seed_size, cd_model,
                                            options);
  report.cd_seeds = cd_stream.seeds;
  report.runtimes["cd_scan_stream"] = seconds_since(start);
  for (auto& row : report.per_action) {
    row.cd_estimate = action_estimate(*cd_model, row.action, report.cd_seeds);
  }

  // Seed quality under the mCD objective, seeds picked by each model's CELF.
  const auto mcd_model = scan_log(graph, mcd_params, test, config.threads);
  const auto constraint = Constraint::cardinality(config.seed_size);
  const auto mcd_celf = celf_greedy(default_ground(*mcd_model), constraint, mcd_model);
  const auto cd_celf = celf_greedy(default_ground(*cd_model), constraint, cd_model);
  report.runtimes["mcd_celf"] = mcd_celf.wall_time;
  report.seed_values["mcd_celf"] = mcd_celf.value;
  report.seed_values["cd_celf"] = evaluate_sigma(*mcd_model, cd_celf.seeds);
  report.seed_values["cd_stream"] = evaluate_sigma(*mcd_model, report.cd_seeds);

  if (config.include_ic) {
    const SocialGraph full = graph.with_users(test.users());
    IcConfig selection = config.ic;
    selection.simulations = config.ic_selection_simulations;
    selection.threads = config.threads;
    start = Clock::now();
    const auto ic_seeds = ic_greedy_seeds(full, default_ground(*mcd_model), config.seed_size,
                                          selection);
    report.runtimes["ic_celf"] = seconds_since(start);
    report.seed_values["ic_celf"] = evaluate_sigma(*mcd_model, ic_seeds);
    IcConfig ic = config.ic;
    ic.threads = config.threads;
    report.seed_values["ic_spread_of_mcd_celf"] = ic_spread(full, mcd_celf.seeds, ic);
    report.seed_values["ic_spread_of_ic_celf"] = ic_spread(full, ic_seeds, ic);
  }
  return report;
}

void write_report(std::ostream& out, const EvalReport& report) {
  char buf[128];
  out << "action\ttrue_count\tmcd_estimate\tcd_estimate\n";
  for (const auto& r : report.per_action) {
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f", r.mcd_estimate, r.cd_estimate);
    out << r.action << '\t' << r.true_count << '\t' << buf << '\n';
  }
  out << "# summary\n";
  auto line = [&](const std::string& key, double value) {
    std::snprintf(buf, sizeof buf, "%.6f", value);
    out << key << '\t' << buf << '\n';
  };
  out << "seed_size\t" << report.seed_size << '\n';
  out << "actions\t" << report.per_action.size() << '\n';
  line("mean_true_count", report.mean_true());
  line("mean_mcd_estimate", report.mean_mcd());
  line("mean_cd_estimate", report.mean_cd());
  for (const auto& [key, value] : report.seed_values) line("value." + key, value);
  for (const auto& [key, value] : report.runtimes) line("time_s." + key, value);
  out << "rng\t" << report.rng_algorithm << '\n';
}

void write_plot_series(std::ostream& out, const EvalReport& report) {
  char buf[128];
  out << "rank,action,true_count,mcd_estimate,cd_estimate\n";
  std::size_t rank = 0;
  for (const auto& r : report.per_action) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.mcd_estimate, r.cd_estimate);
    out << rank++ << ',' << r.action << ',' << r.true_count << ',' << buf << '\n';
  }
}

}  // namespace mcd
