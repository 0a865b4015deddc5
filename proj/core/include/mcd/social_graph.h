#ifndef MCD_SOCIAL_GRAPH_H_
#define MCD_SOCIAL_GRAPH_H_

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcd/event_log.h"
#include "mcd/types.h"

namespace mcd {

// Static directed follow graph. An edge (v, u) means v can influence u.
class SocialGraph {
 public:
  SocialGraph() = default;
  // Deduplicates edges; throws DomainError on a self-loop.
  explicit SocialGraph(std::vector<UserPair> edges, std::vector<UserId> isolated = {});

  std::size_t user_count() const { return users_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  // Sorted ascending.
  const std::vector<UserId>& users() const { return users_; }
  // Sorted by (v, u).
  const std::vector<UserPair>& edges() const { return edges_; }

  bool has_user(UserId u) const { return index_.count(u) != 0; }
  bool has_edge(UserId v, UserId u) const;

  // Predecessors / successors, ascending. Empty for unknown users.
  std::span<const UserId> in_neighbors(UserId u) const;
  std::span<const UserId> out_neighbors(UserId v) const;

  // Copy extended with isolated users (no-op for users already present).
  SocialGraph with_users(std::span<const UserId> users) const;

 private:
  std::vector<UserPair> edges_;
  std::vector<UserId> users_;
  std::unordered_map<UserId, std::size_t> index_;
  std::vector<std::vector<UserId>> in_;
  std::vector<std::vector<UserId>> out_;
};

SocialGraph load_graph(std::istream& in);
SocialGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const SocialGraph& graph);
void write_graph_file(const std::string& path, const SocialGraph& graph);

// Per-action DAG G(a): nodes are users with A_u(a) >= 1, listed by
// ascending (t_1, user); edge (v, u) exists iff (v, u) is a social edge and
// t_1(v,a) < t_1(u,a).
struct PropagationGraph {
  ActionId action = 0;
  std::vector<UserId> nodes;
  std::vector<Timestamp> first_times;  // parallel to nodes
  // parents[i]: indices into `nodes` of the direct influencers of nodes[i],
  // ascending. Every parent index is < i.
  std::vector<std::vector<std::uint32_t>> parents;

  std::size_t edge_count() const;
  std::vector<UserPair> edges() const;
  // Nodes with no parents.
  std::vector<UserId> initiators() const;
};

// Throws DomainError if the action is absent from the log.
PropagationGraph propagation_graph(const SocialGraph& graph, const EventLog& log, ActionId a);

}  // namespace mcd

#endif  // MCD_SOCIAL_GRAPH_H_
