#include "mcd/social_graph.h"

#include <algorithm>
#include <ostream>
#include <set>

#include "mcd/error.h"
#include "text_io.h"

namespace mcd {

SocialGraph::SocialGraph(std::vector<UserPair> edges, std::vector<UserId> isolated)
    : edges_(std::move(edges)) {
  for (const auto& [v, u] : edges_) {
    if (v == u) throw DomainError("self-loop on user " + std::to_string(v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  std::set<UserId> users(isolated.begin(), isolated.end());
  for (const auto& [v, u] : edges_) {
    users.insert(v);
    users.insert(u);
  }
  users_.assign(users.begin(), users.end());
  index_.reserve(users_.size());
  for (std::size_t i = 0; i < users_.size(); ++i) index_.emplace(users_[i], i);

  in_.resize(users_.size());
  out_.resize(users_.size());
  for (const auto& [v, u] : edges_) {
    out_[index_.at(v)].push_back(u);
    in_[index_.at(u)].push_back(v);
  }
  for (auto& list : in_) std::sort(list.begin(), list.end());
}

bool SocialGraph::has_edge(UserId v, UserId u) const {
  return std::binary_search(edges_.begin(), edges_.end(), UserPair{v, u});
}

std::span<const UserId> SocialGraph::in_neighbors(UserId u) const {
  auto it = index_.find(u);
  if (it == index_.end()) return {};
  return in_[it->second];
}

std::span<const UserId> SocialGraph::out_neighbors(UserId v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return {};
  return out_[it->second];
}

SocialGraph SocialGraph::with_users(std::span<const UserId> users) const {
  std::vector<UserId> isolated(users_.begin(), users_.end());
  isolated.insert(isolated.end(), users.begin(), users.end());
  return SocialGraph(edges_, std::move(isolated));
}

SocialGraph load_graph(std::istream& in) {
  std::vector<UserPair> edges;
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!internal::split_fields(line, fields)) continue;
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected 2 fields 'v u', got " + std::to_string(fields.size()));
    }
    const UserId v = internal::parse_unsigned(fields[0], line_no, "source");
    const UserId u = internal::parse_unsigned(fields[1], line_no, "target");
    if (v == u) throw DomainError("line " + std::to_string(line_no) + ": self-loop on user " +
                                  std::to_string(v));
    edges.emplace_back(v, u);
  }
  return SocialGraph(std::move(edges));
}

SocialGraph read_graph_file(const std::string& path) {
  auto in = internal::open_input(path);
  return load_graph(in);
}

void write_graph(std::ostream& out, const SocialGraph& graph) {
  for (const auto& [v, u] : graph.edges()) out << v << ' ' << u << '\n';
}

void write_graph_file(const std::string& path, const SocialGraph& graph) {
  auto out = internal::open_output(path);
  write_graph(out, graph);
}

std::size_t PropagationGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : parents) n += p.size();
  return n;
}

std::vector<UserPair> PropagationGraph::edges() const {
  std::vector<UserPair> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (auto p : parents[i]) out.emplace_back(nodes[p], nodes[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<UserId> PropagationGraph::initiators() const {
  std::vector<UserId> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (parents[i].empty()) out.push_back(nodes[i]);
  }
  return out;
}

PropagationGraph propagation_graph(const SocialGraph& graph, const EventLog& log, ActionId a) {
  PropagationGraph pg;
  pg.action = a;
  std::unordered_map<UserId, std::uint32_t> local;
  // Records are ordered by (time, user), so first occurrences arrive in
  // (t_1, user) order.
  for (const auto& r : log.action_records(a)) {
    if (local.count(r.user)) continue;
    local.emplace(r.user, static_cast<std::uint32_t>(pg.nodes.size()));
    pg.nodes.push_back(r.user);
    pg.first_times.push_back(r.time);
  }
  pg.parents.resize(pg.nodes.size());
  for (std::size_t i = 0; i < pg.nodes.size(); ++i) {
    for (UserId v : graph.in_neighbors(pg.nodes[i])) {
      auto it = local.find(v);
      if (it == local.end()) continue;
      if (pg.first_times[it->second] < pg.first_times[i]) pg.parents[i].push_back(it->second);
    }
    std::sort(pg.parents[i].begin(), pg.parents[i].end());
  }
  return pg;
}

}  // namespace mcd
