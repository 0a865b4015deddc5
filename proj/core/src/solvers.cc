#include "mcd/solvers.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>

#include "mcd/error.h"
#include "mcd/random.h"
#include "text_io.h"

namespace mcd {

double WeightVector::weight_of(UserId u) const {
  auto it = weights.find(u);
  if (it == weights.end()) throw DomainError("no weight for user " + std::to_string(u));
  return it->second;
}

WeightVector normalize_weights(const WeightVector& w) {
  if (w.weights.empty()) throw DomainError("weight vector is empty");
  if (!(w.budget > 0.0)) throw DomainError("budget must be positive");
  double g_min = std::numeric_limits<double>::infinity();
  for (const auto& [u, g] : w.weights) {
    if (!(g > 0.0)) throw DomainError("weight of user " + std::to_string(u) + " must be positive");
    g_min = std::min(g_min, g);
  }
  WeightVector out;
  out.budget = w.budget / g_min;
  out.weights.reserve(w.weights.size());
  for (const auto& [u, g] : w.weights) out.weights.emplace(u, g / g_min);
  return out;
}

WeightVector read_weights(std::istream& in, double budget) {
  WeightVector w;
  w.budget = budget;
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!internal::split_fields(line, fields)) continue;
    if (fields.size() != 2) throw ParseError(line_no, "expected 2 fields 'user weight'");
    const UserId u = internal::parse_unsigned(fields[0], line_no, "user");
    w.weights[u] = internal::parse_real(fields[1], line_no, "weight");
  }
  return w;
}

WeightVector read_weights_file(const std::string& path, double budget) {
  auto in = internal::open_input(path);
  return read_weights(in, budget);
}

Constraint Constraint::cardinality(std::size_t k) {
  Constraint c;
  c.kind_ = Kind::kCardinality;
  c.k_ = k;
  return c;
}

Constraint Constraint::knapsack(WeightVector w) {
  Constraint c;
  c.kind_ = Kind::kKnapsack;
  c.weights_ = std::move(w);
  return c;
}

double Constraint::cost(std::span<const UserId> seeds) const {
  if (kind_ == Kind::kCardinality) return static_cast<double>(seeds.size());
  double total = 0.0;
  for (UserId u : seeds) total += weights_.weight_of(u);
  return total;
}

bool Constraint::feasible(std::span<const UserId> seeds) const {
  if (kind_ == Kind::kCardinality) return seeds.size() <= k_;
  return cost(seeds) <= weights_.budget;
}

std::vector<UserId> default_ground(const CreditModel& model) { return model.users(); }

std::vector<UserId> shuffled_ground(const CreditModel& model, std::uint64_t seed) {
  auto ground = model.users();
  SplitMix64 rng(seed);
  shuffle(ground.begin(), ground.end(), rng);
  return ground;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

// Integer exponents i with lo <= base^i <= hi, as a closed range. Empty
// (first > last) when no power fits or lo is not positive.
std::pair<int, int> exponent_window(double base, double lo, double hi) {
  if (!(lo > 0.0) || hi < lo) return {1, 0};
  const double log_base = std::log(base);
  int first = static_cast<int>(std::ceil(std::log(lo) / log_base));
  while (std::pow(base, first - 1) >= lo) --first;
  while (std::pow(base, first) < lo) ++first;
  int last = static_cast<int>(std::floor(std::log(hi) / log_base));
  while (std::pow(base, last + 1) <= hi) ++last;
  while (std::pow(base, last) > hi) --last;
  return {first, last};
}

// Submodularity bounds any later gain of x by its gain against the empty
// set; skip the exact evaluation only when that bound is clearly short of the
// threshold so rounding can never flip an acceptance.
bool clearly_below(double bound, double threshold) {
  return bound < threshold - 1e-9 * std::max(1.0, threshold);
}

struct Thread {
  double threshold = 0.0;
  PathCreditState state;
  double cost = 0.0;
  bool big_element = false;
};

SeedResult finish(std::map<int, Thread>& live, double m, std::size_t visits,
                  std::size_t evaluations, Clock::time_point start) {
  SeedResult result;
  result.passes = 1;
  result.element_visits = visits;
  result.gain_evaluations = evaluations;
  result.max_singleton = m;
  const Thread* best = nullptr;
  double best_value = -1.0;
  for (const auto& [exponent, thread] : live) {
    ThresholdDiagnostics d;
    d.exponent = exponent;
    d.threshold = thread.threshold;
    d.size = thread.state.seeds().size();
    d.value = thread.state.sigma();
    d.cost = thread.cost;
    d.big_element = thread.big_element;
    result.per_threshold.push_back(d);
    if (d.value > best_value) {  // strict: lowest exponent wins ties
      best_value = d.value;
      best = &thread;
    }
  }
  if (best) {
    result.seeds = best->state.seeds();
    result.value = best_value;
  }
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace

SeedResult stream_cardinality(std::span<const UserId> ground, std::size_t k,
                              std::shared_ptr<const CreditModel> model,
                              const StreamOptions& options) {
  if (k < 1) throw DomainError("k must be >= 1");
  check_epsilon(options.epsilon);
  const auto start = Clock::now();
  const double base = 1.0 + options.epsilon;
  const double two_k = 2.0 * static_cast<double>(k);

  const PathCreditState pristine(model);
  std::map<int, Thread> live;
  double m = 0.0;
  std::size_t visits = 0, evaluations = 0;

  for (UserId x : ground) {
    ++visits;
    if (options.on_visit) options.on_visit(x);
    const double singleton = pristine.marginal_gain(x);
    ++evaluations;

    if (singleton > m) {
      m = singleton;
      const auto [first, last] = exponent_window(base, m, two_k * m);
      live.erase(live.begin(), live.lower_bound(first));
      for (int i = first; i <= last; ++i) {
        if (!live.count(i)) live.emplace(i, Thread{std::pow(base, i), pristine, 0.0, false});
      }
    }

    for (auto& [exponent, thread] : live) {
      if (thread.state.seeds().size() >= k) continue;
      const double threshold = thread.threshold / two_k;
      if (clearly_below(singleton, threshold)) continue;
      const double gain = thread.state.marginal_gain(x);
      ++evaluations;
      if (gain >= threshold) {
        thread.state.absorb(x);
        thread.cost += 1.0;
      }
    }
  }
  return finish(live, m, visits, evaluations, start);
}

SeedResult stream_budgeted(std::span<const UserId> ground, const WeightVector& weights,
                           std::shared_ptr<const CreditModel> model,
                           const StreamOptions& options) {
  check_epsilon(options.epsilon);
  const double b = weights.budget;
  if (!(b >= 1.0)) throw DomainError("budget must be >= 1 after weight normalization");
  const auto start = Clock::now();
  const double base = 1.0 + 3.0 * options.epsilon;

  const PathCreditState pristine(model);
  std::map<int, Thread> live;
  double m = 0.0;
  std::size_t visits = 0, evaluations = 0;

  for (UserId x : ground) {
    ++visits;
    if (options.on_visit) options.on_visit(x);
    const double g_x = weights.weight_of(x);
    if (!(g_x > 0.0)) throw DomainError("weight of user " + std::to_string(x) + " must be positive");
    const double singleton = pristine.marginal_gain(x);
    ++evaluations;
    const double per_weight = singleton / g_x;

    if (per_weight > m) {
      m = per_weight;
      const auto [first, last] = exponent_window(base, m / base, 2.0 * b * m);
      live.erase(live.begin(), live.lower_bound(first));
      for (int i = first; i <= last; ++i) {
        if (!live.count(i)) live.emplace(i, Thread{std::pow(base, i), pristine, 0.0, false});
      }
    }
    if (g_x > b) continue;  // never feasible

    for (auto& [exponent, thread] : live) {
      if (thread.big_element) continue;
      const double q = thread.threshold;
      if (g_x >= b / 2.0 && per_weight >= 2.0 * q / (3.0 * b)) {
        thread.state = pristine;
        thread.state.absorb(x);
        thread.cost = g_x;
        thread.big_element = true;
        continue;
      }
      if (thread.cost + g_x > b) continue;
      const double threshold = 2.0 * q * g_x / (3.0 * b);
      if (clearly_below(singleton, threshold)) continue;
      const double gain = thread.state.marginal_gain(x);
      ++evaluations;
      if (gain >= threshold) {
        thread.state.absorb(x);
        thread.cost += g_x;
      }
    }
  }
  return finish(live, m, visits, evaluations, start);
}

namespace {

struct Candidate {
  double key;  // gain or gain per weight
  double gain;
  UserId user;
  std::size_t round;  // |S| when `gain` was computed
};

struct CandidateLess {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.key != b.key) return a.key < b.key;
    return a.user > b.user;
  }
};

enum class Order { kGain, kGainPerWeight };

struct GreedyRun {
  CreditState state;
  double cost = 0.0;
  std::size_t evaluations = 0;
  std::size_t visits = 0;
};

double cost_of(const Constraint& c, UserId u) {
  return c.kind() == Constraint::Kind::kCardinality ? 1.0 : c.weights().weight_of(u);
}

double capacity(const Constraint& c) {
  return c.kind() == Constraint::Kind::kCardinality ? static_cast<double>(c.k())
                                                     : c.weights().budget;
}

double key_of(Order order, double gain, double cost) {
  return order == Order::kGain ? gain : gain / cost;
}

GreedyRun lazy_greedy(std::span<const UserId> ground, const Constraint& constraint,
                      const std::shared_ptr<const CreditModel>& model, Order order) {
  GreedyRun run{CreditState(model)};
  const double cap = capacity(constraint);
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess> heap;
  for (UserId x : ground) {
    ++run.visits;
    const double c = cost_of(constraint, x);
    if (c > cap) continue;
    const double gain = run.state.marginal_gain(x);
    ++run.evaluations;
    heap.push({key_of(order, gain, c), gain, x, 0});
  }
  while (!heap.empty()) {
    Candidate top = heap.top();
    heap.pop();
    const double c = cost_of(constraint, top.user);
    // Remaining capacity only shrinks, so a user that no longer fits never will.
    if (run.cost + c > cap) continue;
    const std::size_t round = run.state.seeds().size();
    if (top.round == round) {
      run.state.absorb(top.user);
      run.cost += c;
      continue;
    }
    top.gain = run.state.marginal_gain(top.user);
    ++run.evaluations;
    top.key = key_of(order, top.gain, c);
    top.round = round;
    heap.push(top);
  }
  return run;
}

GreedyRun plain_greedy(std::span<const UserId> ground, const Constraint& constraint,
                       const std::shared_ptr<const CreditModel>& model, Order order) {
  GreedyRun run{CreditState(model)};
  const double cap = capacity(constraint);
  std::vector<UserId> remaining(ground.begin(), ground.end());
  run.visits = remaining.size();
  CandidateLess less;
  while (true) {
    std::optional<Candidate> best;
    for (UserId x : remaining) {
      const double c = cost_of(constraint, x);
      if (run.cost + c > cap || run.state.contains(x)) continue;
      const double gain = run.state.marginal_gain(x);
      ++run.evaluations;
      Candidate cand{key_of(order, gain, c), gain, x, 0};
      if (!best || less(*best, cand)) best = cand;
    }
    if (!best) break;
    run.state.absorb(best->user);
    run.cost += cost_of(constraint, best->user);
  }
  return run;
}

using Runner = GreedyRun (*)(std::span<const UserId>, const Constraint&,
                             const std::shared_ptr<const CreditModel>&, Order);

SeedResult run_greedy(Runner runner, std::span<const UserId> ground, const Constraint& constraint,
                      const std::shared_ptr<const CreditModel>& model) {
  const auto start = Clock::now();
  SeedResult result;
  if (constraint.kind() == Constraint::Kind::kCardinality && constraint.k() == 0) {
    result.wall_time = seconds_since(start);
    return result;
  }
  if (constraint.kind() == Constraint::Kind::kKnapsack && !(constraint.weights().budget > 0.0)) {
    throw DomainError("budget must be positive");
  }
  std::vector<GreedyRun> runs;
  runs.push_back(runner(ground, constraint, model, Order::kGain));
  if (constraint.kind() == Constraint::Kind::kKnapsack) {
    runs.push_back(runner(ground, constraint, model, Order::kGainPerWeight));
  }
  const GreedyRun* best = nullptr;
  double best_value = -1.0;
  for (const auto& run : runs) {
    // One conceptual scan of the ground set per selection round.
    result.passes += std::max<std::size_t>(1, run.state.seeds().size());
    result.element_visits += run.visits;
    result.gain_evaluations += run.evaluations;
    const double value = run.state.sigma();
    if (value > best_value) {
      best_value = value;
      best = &run;
    }
  }
  result.seeds = best->state.seeds();
  result.value = best_value;
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace

SeedResult celf_greedy(std::span<const UserId> ground, const Constraint& constraint,
                       std::shared_ptr<const CreditModel> model) {
  return run_greedy(&lazy_greedy, ground, constraint, model);
}

SeedResult naive_greedy(std::span<const UserId> ground, const Constraint& constraint,
                        std::shared_ptr<const CreditModel> model) {
  return run_greedy(&plain_greedy, ground, constraint, model);
}

SeedResult brute_force(std::span<const UserId> ground, const Constraint& constraint,
                       const CreditModel& model, std::uint64_t limit) {
  const auto start = Clock::now();
  const std::size_t n = ground.size();
  const bool cardinality = constraint.kind() == Constraint::Kind::kCardinality;
  const std::size_t max_size = cardinality ? std::min(constraint.k(), n) : n;

  // Count subsets of size <= max_size, saturating at limit + 1.
  std::uint64_t count = 0;
  {
    std::uint64_t binom = 1;  // C(n, 0)
    for (std::size_t s = 0; s <= max_size; ++s) {
      count += binom;
      if (count > limit) throw RefusalError("brute force would enumerate more than " +
                                            std::to_string(limit) + " subsets");
      if (s < n) {
        // C(n, s+1) = C(n, s) * (n - s) / (s + 1), saturating past the limit.
        const std::uint64_t factor = n - s;
        if (binom > std::numeric_limits<std::uint64_t>::max() / factor) {
          binom = limit + 1;
        } else {
          binom = std::min<std::uint64_t>(binom * factor / (s + 1), limit + 1);
        }
      }
    }
  }

  SeedResult result;
  result.passes = 0;
  double best = -1.0;
  std::vector<UserId> subset;
  std::vector<std::size_t> idx;
  for (std::size_t s = 0; s <= max_size; ++s) {
    idx.resize(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
      subset.clear();
      for (auto i : idx) subset.push_back(ground[i]);
      if (constraint.feasible(subset)) {
        const double value = evaluate_sigma(model, subset);
        ++result.gain_evaluations;
        if (value > best) {
          best = value;
          result.seeds = subset;
        }
      }
      // Next combination in lexicographic order.
      std::size_t i = s;
      while (i > 0 && idx[i - 1] == n - s + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  result.value = std::max(best, 0.0);
  result.wall_time = seconds_since(start);
  return result;
}

void write_result(std::ostream& out, const SeedResult& result) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", result.value);
  out << "value=" << buf << '\n';
  out << "passes=" << result.passes << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", result.wall_time);
  out << "time_s=" << buf << '\n';
  for (UserId u : result.seeds) out << u << '\n';
}

void write_result_file(const std::string& path, const SeedResult& result) {
  auto out = internal::open_output(path);
  write_result(out, result);
}

}  // namespace mcd
