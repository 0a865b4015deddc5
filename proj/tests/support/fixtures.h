#ifndef MCD_TESTS_SUPPORT_FIXTURES_H_
#define MCD_TESTS_SUPPORT_FIXTURES_H_

#include <memory>
#include <sstream>
#include <string>

#include "mcd/credit_engine.h"
#include "mcd/event_log.h"
#include "mcd/model_learner.h"
#include "mcd/social_graph.h"
#include "oracle.h"

namespace mcd::testing {

inline EventLog log_from(const std::string& text) {
  std::istringstream in(text);
  return parse_log(in);
}

inline SocialGraph graph_from(const std::string& text) {
  std::istringstream in(text);
  return load_graph(in);
}

inline SocialGraph graph_of(const RawInstance& inst) { return SocialGraph(inst.edges); }
inline EventLog log_of(const RawInstance& inst) { return EventLog(inst.records); }

// learn and scan on the same log.
inline std::shared_ptr<const CreditModel> model_of(const RawInstance& inst) {
  const auto graph = graph_of(inst);
  const auto log = log_of(inst);
  return scan_log(graph, learn(graph, log), log);
}

}  // namespace mcd::testing

#endif  // MCD_TESTS_SUPPORT_FIXTURES_H_
