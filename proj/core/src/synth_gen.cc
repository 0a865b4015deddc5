#include "mcd/synth_gen.h"

#include <cmath>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "mcd/error.h"
#include "mcd/random.h"

namespace mcd {

namespace {

void validate(const GenConfig& c) {
  if (c.users < 1) throw ConfigError("users must be positive");
  if (c.actions < 1) throw ConfigError("actions must be positive");
  if (c.initiators_per_action < 1) throw ConfigError("initiators per action must be positive");
  if (c.initiators_per_action > c.users) {
    throw ConfigError("initiators per action (" + std::to_string(c.initiators_per_action) +
                      ") exceed users (" + std::to_string(c.users) + ")");
  }
  const double max_edges = static_cast<double>(c.users) * static_cast<double>(c.users - 1);
  if (static_cast<double>(c.edges) > max_edges) {
    throw ConfigError("edge count exceeds users * (users - 1)");
  }
  if (!(c.repeat_rate >= 0.0 && c.repeat_rate < 1.0)) throw ConfigError("repeat rate must lie in [0, 1)");
  if (!(c.adoption_probability >= 0.0 && c.adoption_probability <= 1.0)) {
    throw ConfigError("adoption probability must lie in [0, 1]");
  }
  if (!(c.reciprocity >= 0.0 && c.reciprocity <= 1.0)) throw ConfigError("reciprocity must lie in [0, 1]");
  if (!(c.mean_delay > 0.0)) throw ConfigError("mean delay must be positive");
}

// Followers pick whom to follow from an urn holding every user once plus one
// ball per follower gained, so well-followed users attract more followers.
std::vector<UserPair> attach(const GenConfig& c, SplitMix64& rng) {
  std::vector<UserPair> edges;
  edges.reserve(c.edges);
  std::set<UserPair> seen;
  std::vector<UserId> urn;
  urn.reserve(c.users + 2 * c.edges);
  for (UserId u = 0; u < c.users; ++u) urn.push_back(u);

  auto add = [&](UserId v, UserId u) {
    if (edges.size() >= c.edges || v == u || !seen.insert({v, u}).second) return false;
    edges.emplace_back(v, u);
    urn.push_back(v);
    return true;
  };

  const std::size_t max_attempts = 100 * c.edges + 1000;
  std::size_t attempts = 0;
  while (edges.size() < c.edges) {
    if (++attempts > max_attempts) {
      throw ConfigError("could not place " + std::to_string(c.edges) + " distinct edges");
    }
    const UserId follower = rng.below(c.users);
    const UserId leader = urn[rng.below(urn.size())];
    if (!add(leader, follower)) continue;
    if (rng.bernoulli(c.reciprocity)) add(follower, leader);
  }
  return edges;
}

Timestamp next_delay(SplitMix64& rng, double mean) {
  return 1 + static_cast<Timestamp>(std::floor(rng.exponential(mean)));
}

void cascade(const GenConfig& c, const SocialGraph& graph, ActionId action, SplitMix64& rng,
             std::vector<EventRecord>& out) {
  enum Kind : int { kAdopt = 0, kPerform = 1 };
  using Event = std::tuple<Timestamp, std::uint64_t, int, UserId>;  // time, seq, kind, user
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  std::vector<bool> active(c.users, false);
  // Geometric repeats whose mean follows the action's running shortfall, so
  // small cascades still land near the target rate.
  const double extra_per_user = c.repeat_rate / (1.0 - c.repeat_rate);
  double performers = 0.0;
  double extra = 0.0;

  // Initiators: a uniformly random subset.
  std::vector<UserId> pool(c.users);
  for (UserId u = 0; u < c.users; ++u) pool[u] = u;
  for (std::size_t i = 0; i < c.initiators_per_action; ++i) {
    const auto j = i + rng.below(c.users - i);
    std::swap(pool[i], pool[j]);
    queue.emplace(0, seq++, kAdopt, pool[i]);
  }

  while (!queue.empty()) {
    const auto [time, order, kind, user] = queue.top();
    queue.pop();
    if (kind == kAdopt) {
      if (active[user]) continue;
      active[user] = true;
      Timestamp t = time;
      queue.emplace(t, seq++, kPerform, user);
      performers += 1.0;
      const double owed = performers * extra_per_user - extra;
      const double q = owed > 0.0 ? owed / (1.0 + owed) : 0.0;
      while (rng.bernoulli(q)) {
        t += next_delay(rng, c.mean_delay);
        queue.emplace(t, seq++, kPerform, user);
        extra += 1.0;
      }
      continue;
    }
    out.push_back({user, action, time});
    for (UserId follower : graph.out_neighbors(user)) {
      if (active[follower]) continue;
      if (rng.bernoulli(c.adoption_probability)) {
        queue.emplace(time + next_delay(rng, c.mean_delay), seq++, kAdopt, follower);
      }
    }
  }
}

}  // namespace

SyntheticData generate(const GenConfig& config) {
  validate(config);
  SplitMix64 graph_rng = SplitMix64::substream(config.rng_seed, 0);
  std::vector<UserId> all(config.users);
  for (UserId u = 0; u < config.users; ++u) all[u] = u;
  SocialGraph graph(attach(config, graph_rng), all);

  std::vector<EventRecord> records;
  for (ActionId a = 0; a < config.actions; ++a) {
    SplitMix64 rng = SplitMix64::substream(config.rng_seed, a + 1);
    cascade(config, graph, a, rng, records);
  }
  return SyntheticData{std::move(graph), EventLog(std::move(records))};
}

}  // namespace mcd
