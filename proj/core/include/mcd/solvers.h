#ifndef MCD_SOLVERS_H_
#define MCD_SOLVERS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcd/credit_engine.h"
#include "mcd/types.h"

namespace mcd {

// Per-user selection costs g and budget b.
struct WeightVector {
  std::unordered_map<UserId, double> weights;
  double budget = 0.0;

  // Throws DomainError for a user without a weight.
  double weight_of(UserId u) const;
};

// Divides every weight and the budget by the smallest weight. Throws
// DomainError for an empty vector or a nonpositive weight or budget.
WeightVector normalize_weights(const WeightVector& w);

// Lines `user weight`. The budget is not part of the file.
WeightVector read_weights(std::istream& in, double budget);
WeightVector read_weights_file(const std::string& path, double budget);

class Constraint {
 public:
  enum class Kind { kCardinality, kKnapsack };

  static Constraint cardinality(std::size_t k);
  static Constraint knapsack(WeightVector w);

  Kind kind() const { return kind_; }
  std::size_t k() const { return k_; }
  const WeightVector& weights() const { return weights_; }

  // Sum of weights in the given order (seed count for cardinality).
  double cost(std::span<const UserId> seeds) const;
  bool feasible(std::span<const UserId> seeds) const;

 private:
  Kind kind_ = Kind::kCardinality;
  std::size_t k_ = 0;
  WeightVector weights_;
};

struct ThresholdDiagnostics {
  int exponent = 0;
  double threshold = 0.0;  // c (cardinality) or q (knapsack)
  std::size_t size = 0;
  double value = 0.0;
  double cost = 0.0;
  bool big_element = false;
};

struct SeedResult {
  std::vector<UserId> seeds;  // acceptance order
  double value = 0.0;         // sigma(seeds)
  std::size_t passes = 0;     // full scans over the ground set
  std::size_t element_visits = 0;
  std::size_t gain_evaluations = 0;
  double max_singleton = 0.0;  // final m of the streaming ladder
  std::vector<ThresholdDiagnostics> per_threshold;  // live ladder at end of pass
  double wall_time = 0.0;                           // seconds
};

struct StreamOptions {
  double epsilon = 0.1;
  // Called once per ground-set element as the pass reaches it.
  std::function<void(UserId)> on_visit;
};

// Users of the scanned log, ascending; the default ground set.
std::vector<UserId> default_ground(const CreditModel& model);
std::vector<UserId> shuffled_ground(const CreditModel& model, std::uint64_t seed);

// Single pass under |S| <= k. Thresholds c = (1+eps)^i with m <= c <= 2km,
// m the best singleton seen so far; x joins S_c when its gain is at least
// c/(2k). Returns the best S_c. Throws DomainError for k < 1 or eps outside
// (0, 1).
SeedResult stream_cardinality(std::span<const UserId> ground, std::size_t k,
                              std::shared_ptr<const CreditModel> model,
                              const StreamOptions& options = {});

// Single pass under g^T I_S <= b with normalized weights. Thresholds
// q = (1+3eps)^i with m/(1+3eps) <= q <= 2bm, m the best singleton gain per
// weight seen so far. A heavy user (g_x >= b/2) whose gain per weight reaches
// 2q/(3b) replaces S_q and closes that thread; otherwise x joins S_q when its
// gain is at least 2q g_x/(3b) and it fits.
SeedResult stream_budgeted(std::span<const UserId> ground, const WeightVector& weights,
                           std::shared_ptr<const CreditModel> model,
                           const StreamOptions& options = {.epsilon = 0.05, .on_visit = {}});

// Lazy greedy. For knapsack constraints runs the unit-cost and the
// cost-benefit variants and keeps the better. Ties go to the lower user id.
SeedResult celf_greedy(std::span<const UserId> ground, const Constraint& constraint,
                       std::shared_ptr<const CreditModel> model);

// Non-lazy greedy with the same ordering as celf_greedy.
SeedResult naive_greedy(std::span<const UserId> ground, const Constraint& constraint,
                        std::shared_ptr<const CreditModel> model);

inline constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t{1} << 22;

// Exact optimum by from-scratch evaluation of every feasible subset. Throws
// RefusalError when more than `limit` subsets would be evaluated.
SeedResult brute_force(std::span<const UserId> ground, const Constraint& constraint,
                       const CreditModel& model,
                       std::uint64_t limit = kDefaultEnumerationLimit);

// Result file: `value=`, `passes=`, `time_s=` headers then one seed per line.
void write_result(std::ostream& out, const SeedResult& result);
void write_result_file(const std::string& path, const SeedResult& result);

}  // namespace mcd

#endif  // MCD_SOLVERS_H_
