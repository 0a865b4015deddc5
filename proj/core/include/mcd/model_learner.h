#ifndef MCD_MODEL_LEARNER_H_
#define MCD_MODEL_LEARNER_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcd/event_log.h"
#include "mcd/social_graph.h"
#include "mcd/types.h"

namespace mcd {

// Parameters learned from a training log.
struct LearnedParams {
  // tau(v,u): average delay in seconds from v's performances to u's first
  // performance, averaged per action then across propagated actions.
  std::unordered_map<UserPair, double, UserPairHash> tau;
  // A_u(a), keyed (u, a).
  std::unordered_map<UserPair, std::size_t, UserPairHash> action_counts;
  // A_{v2u}: number of actions propagated along (v, u).
  std::unordered_map<UserPair, std::size_t, UserPairHash> a_v2u;

  std::optional<double> tau_of(UserId v, UserId u) const;
  // Mean of all learned tau values, or 1.0 when none were learned.
  double mean_tau() const;
};

// Delta t_{v,u}(a) = 1 / sum_i 1/d_i: the parallel-resistance combination of
// the delays. Throws DomainError for an empty set or a nonpositive delay.
double effective_delay(std::span<const double> delays);

// {t_1(u,a) - t : t in v_times, t < t_1(u,a)}, in the order of v_times.
std::vector<double> delays_before(std::span<const Timestamp> v_times, Timestamp u_first);

// All performance times of each node of `pg`, ascending; parallel to
// pg.nodes.
std::vector<std::vector<Timestamp>> performance_times(const EventLog& log,
                                                      const PropagationGraph& pg);

// Walks every action chronologically, discovers each user's parents among
// earlier first performers, and averages the per-action mean delays into tau.
// Actions are processed on up to `threads` workers; the result does not
// depend on the thread count.
LearnedParams learn(const SocialGraph& graph, const EventLog& train, unsigned threads = 1);

// Text format:
//   [tau]      lines `v u value`
//   [counts]   lines `u a count`
//   [v2u]      lines `v u count`
// Reals are printed with 17 significant digits; entries are sorted.
void write_params(std::ostream& out, const LearnedParams& params);
void write_params_file(const std::string& path, const LearnedParams& params);
LearnedParams read_params(std::istream& in);
LearnedParams read_params_file(const std::string& path);

}  // namespace mcd

#endif  // MCD_MODEL_LEARNER_H_
