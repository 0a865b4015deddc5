#ifndef MCD_BASELINES_EVAL_H_
#define MCD_BASELINES_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcd/credit_engine.h"
#include "mcd/event_log.h"
#include "mcd/model_learner.h"
#include "mcd/random.h"
#include "mcd/social_graph.h"
#include "mcd/solvers.h"

namespace mcd {

// ---------------------------------------------------------------------------
// learn -> scan -> solve

enum class SolveMode { kStream, kCelf, kBrute };

struct SolveConfig {
  SolveMode mode = SolveMode::kStream;
  Constraint constraint = Constraint::cardinality(1);
  // Defaults to 0.1 (cardinality) or 0.05 (knapsack) when unset.
  std::optional<double> epsilon;
  // Ascending user ids when unset.
  std::optional<std::uint64_t> shuffle_seed;
  unsigned threads = 1;
  std::uint64_t enumeration_limit = kDefaultEnumerationLimit;
};

double default_epsilon(const Constraint& constraint);

// Runs the selected solver on a scanned model. Knapsack weights are
// normalized first; users of the model without a weight are an error.
SeedResult solve(const std::shared_ptr<const CreditModel>& model, const SolveConfig& config);

struct PipelineResult {
  LearnedParams params;
  std::shared_ptr<const CreditModel> model;
  SeedResult result;
};

PipelineResult run_pipeline(const SocialGraph& graph, const EventLog& train, const EventLog& test,
                            const SolveConfig& config);

// The same pipeline on first-occurrence-only logs: the conventional CD model.
PipelineResult cd_baseline(const SocialGraph& graph, const EventLog& train, const EventLog& test,
                           const SolveConfig& config);

// ---------------------------------------------------------------------------
// Independent Cascade

struct IcConfig {
  double edge_probability = 0.1;
  std::size_t simulations = 10000;
  std::uint64_t rng_seed = 0;
  unsigned threads = 1;
};

struct IcEstimate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation of one cascade's size
  std::size_t simulations = 0;
};

// Monte Carlo IC spread on the full social graph. Replica r draws from
// SplitMix64::substream(rng_seed, r), so results do not depend on the thread
// count. Throws DomainError for a seed outside the graph or an invalid config.
IcEstimate ic_estimate(const SocialGraph& graph, std::span<const UserId> seeds,
                       const IcConfig& config);
double ic_spread(const SocialGraph& graph, std::span<const UserId> seeds, const IcConfig& config);

// CELF over Monte Carlo IC spread, candidates restricted to `ground`.
std::vector<UserId> ic_greedy_seeds(const SocialGraph& graph, std::span<const UserId> ground,
                                    std::size_t k, const IcConfig& config);

// ---------------------------------------------------------------------------
// Estimation accuracy

struct ActionEstimate {
  ActionId action = 0;
  std::size_t true_count = 0;  // |V(a)|: distinct performers in the test log
  double mcd_estimate = 0.0;
  double cd_estimate = 0.0;
  double initiator_estimate = 0.0;  // sum_u Gamma_{I(a),u}(a), I(a) = initiators of a
};

struct EvalReport {
  std::vector<ActionEstimate> per_action;  // ascending true_count, then action
  std::map<std::string, double> seed_values;
  std::map<std::string, double> runtimes;
  std::vector<UserId> mcd_seeds;
  std::vector<UserId> cd_seeds;
  std::string rng_algorithm = SplitMix64::kAlgorithm;
  std::size_t seed_size = 0;

  double mean_true() const;
  double mean_mcd() const;
  double mean_cd() const;
};

// Selects seed_size seeds with the cardinality streaming solver on the mCD
// model of `test` and reports per-action estimates sum_u Gamma_{S,u}(a)
// against |V(a)|. cd_estimate is left at 0. Throws DomainError for
// seed_size < 1.
EvalReport estimate_accuracy(const SocialGraph& graph, const LearnedParams& params,
                             const EventLog& test, std::size_t seed_size, double epsilon = 0.1,
                             unsigned threads = 1);

struct EvalConfig {
  std::size_t seed_size = 50;
  double epsilon = 0.1;
  IcConfig ic;
  // Monte Carlo replicas per gain evaluation while selecting IC seeds.
  std::size_t ic_selection_simulations = 200;
  bool include_ic = true;
  unsigned threads = 1;
};

// Full harness: mCD and CD models learned from `train`, estimates on `test`,
// and the influence ability of mCD-, CD- and IC-selected seeds under the mCD
// model.
EvalReport evaluate(const SocialGraph& graph, const EventLog& train, const EventLog& test,
                    const EvalConfig& config);
// Same, with the mCD parameters supplied instead of learned from `train`.
EvalReport evaluate(const SocialGraph& graph, const LearnedParams& mcd_params,
                    const EventLog& train, const EventLog& test, const EvalConfig& config);

// Tab-separated `action true_count mcd_estimate cd_estimate` rows followed by
// a `# summary` block of `key<TAB>value` lines.
void write_report(std::ostream& out, const EvalReport& report);
// CSV series for bar charts, actions ordered by increasing popularity.
void write_plot_series(std::ostream& out, const EvalReport& report);

}  // namespace mcd

#endif  // MCD_BASELINES_EVAL_H_
