#ifndef MCD_SYNTH_GEN_H_
#define MCD_SYNTH_GEN_H_

#include <cstddef>
#include <cstdint>

#include "mcd/event_log.h"
#include "mcd/social_graph.h"

namespace mcd {

struct GenConfig {
  std::size_t users = 200;
  std::size_t edges = 1000;  // target follow-edge count
  std::size_t actions = 20;
  std::size_t initiators_per_action = 2;
  // Target repetition rate in [0, 1). Each adopter repeats a geometric number
  // of times, with the mean set by how far the action lags the target.
  double repeat_rate = 0.0;
  // Chance that one performance by v makes a not-yet-active follower u adopt.
  double adoption_probability = 0.1;
  // Chance that a new follow edge is reciprocated.
  double reciprocity = 0.3;
  double mean_delay = 60.0;  // seconds, exponential
  std::uint64_t rng_seed = 1;
};

struct SyntheticData {
  SocialGraph graph;
  EventLog log;
};

// Preferential-attachment follow graph plus one timestamped cascade per
// action. Initiators act at time 0; every performance of an active user
// gives each inactive follower an adoption chance at a strictly later time;
// repeats are geometric. Identical configs give identical output. Throws
// ConfigError for unsatisfiable configs.
SyntheticData generate(const GenConfig& config);

}  // namespace mcd

#endif  // MCD_SYNTH_GEN_H_
