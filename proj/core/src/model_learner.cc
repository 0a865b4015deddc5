#include "mcd/model_learner.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "mcd/error.h"
#include "mcd/parallel.h"
#include "text_io.h"

namespace mcd {

std::optional<double> LearnedParams::tau_of(UserId v, UserId u) const {
  auto it = tau.find(UserPair{v, u});
  if (it == tau.end()) return std::nullopt;
  return it->second;
}

double LearnedParams::mean_tau() const {
  if (tau.empty()) return 1.0;
  // Sum in key order so the result is independent of hash iteration order.
  std::map<UserPair, double> ordered(tau.begin(), tau.end());
  double sum = 0.0;
  for (const auto& [pair, value] : ordered) sum += value;
  return sum / static_cast<double>(ordered.size());
}

double effective_delay(std::span<const double> delays) {
  if (delays.empty()) throw DomainError("effective delay of an empty delay set");
  double inverse_sum = 0.0;
  for (double d : delays) {
    if (!(d > 0.0)) throw DomainError("delays must be positive");
    inverse_sum += 1.0 / d;
  }
  return 1.0 / inverse_sum;
}

std::vector<double> delays_before(std::span<const Timestamp> v_times, Timestamp u_first) {
  std::vector<double> out;
  for (Timestamp t : v_times) {
    if (t < u_first) out.push_back(static_cast<double>(u_first - t));
  }
  return out;
}

std::vector<std::vector<Timestamp>> performance_times(const EventLog& log,
                                                      const PropagationGraph& pg) {
  std::unordered_map<UserId, std::size_t> local;
  local.reserve(pg.nodes.size());
  for (std::size_t i = 0; i < pg.nodes.size(); ++i) local.emplace(pg.nodes[i], i);
  std::vector<std::vector<Timestamp>> times(pg.nodes.size());
  for (const auto& r : log.action_records(pg.action)) times[local.at(r.user)].push_back(r.time);
  return times;
}

namespace {

struct PairMean {
  UserPair pair;
  double mean_delay;
};

std::vector<PairMean> action_pair_means(const SocialGraph& graph, const EventLog& log,
                                        ActionId a) {
  const PropagationGraph pg = propagation_graph(graph, log, a);
  const auto times = performance_times(log, pg);
  std::vector<PairMean> out;
  for (std::size_t i = 0; i < pg.nodes.size(); ++i) {
    for (auto p : pg.parents[i]) {
      const auto delays = delays_before(times[p], pg.first_times[i]);
      double sum = 0.0;
      for (double d : delays) sum += d;
      out.push_back({UserPair{pg.nodes[p], pg.nodes[i]}, sum / static_cast<double>(delays.size())});
    }
  }
  return out;
}

}  // namespace

LearnedParams learn(const SocialGraph& graph, const EventLog& train, unsigned threads) {
  LearnedParams params;
  for (const auto& r : train.records()) ++params.action_counts[UserPair{r.user, r.action}];

  const auto& actions = train.actions();
  std::vector<std::vector<PairMean>> per_action(actions.size());
  parallel_for(actions.size(), threads, [&](std::size_t i) {
    per_action[i] = action_pair_means(graph, train, actions[i]);
  });

  // Merge in action order: floating-point sums are then thread-count
  // independent.
  std::unordered_map<UserPair, double, UserPairHash> sums;
  for (const auto& means : per_action) {
    for (const auto& [pair, mean] : means) {
      sums[pair] += mean;
      ++params.a_v2u[pair];
    }
  }
  params.tau.reserve(sums.size());
  for (const auto& [pair, sum] : sums) {
    params.tau.emplace(pair, sum / static_cast<double>(params.a_v2u.at(pair)));
  }
  return params;
}

namespace {

template <typename Map>
auto sorted_entries(const Map& m) {
  std::vector<std::pair<typename Map::key_type, typename Map::mapped_type>> out(m.begin(), m.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace

void write_params(std::ostream& out, const LearnedParams& params) {
  char buf[64];
  out << "[tau]\n";
  for (const auto& [pair, value] : sorted_entries(params.tau)) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << pair.first << ' ' << pair.second << ' ' << buf << '\n';
  }
  out << "[counts]\n";
  for (const auto& [pair, count] : sorted_entries(params.action_counts)) {
    out << pair.first << ' ' << pair.second << ' ' << count << '\n';
  }
  out << "[v2u]\n";
  for (const auto& [pair, count] : sorted_entries(params.a_v2u)) {
    out << pair.first << ' ' << pair.second << ' ' << count << '\n';
  }
}

void write_params_file(const std::string& path, const LearnedParams& params) {
  auto out = internal::open_output(path);
  write_params(out, params);
}

LearnedParams read_params(std::istream& in) {
  enum class Section { kNone, kTau, kCounts, kV2u } section = Section::kNone;
  LearnedParams params;
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!internal::split_fields(line, fields)) continue;
    if (fields.size() == 1) {
      if (fields[0] == "[tau]") section = Section::kTau;
      else if (fields[0] == "[counts]") section = Section::kCounts;
      else if (fields[0] == "[v2u]") section = Section::kV2u;
      else throw ParseError(line_no, "unknown section '" + std::string(fields[0]) + "'");
      continue;
    }
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields");
    if (section == Section::kNone) throw ParseError(line_no, "entry outside of a section");
    const UserPair key{internal::parse_unsigned(fields[0], line_no, "id"),
                       internal::parse_unsigned(fields[1], line_no, "id")};
    switch (section) {
      case Section::kTau: {
        const double value = internal::parse_real(fields[2], line_no, "tau");
        if (!(value > 0.0)) throw ParseError(line_no, "tau must be positive");
        params.tau[key] = value;
        break;
      }
      case Section::kCounts:
        params.action_counts[key] = internal::parse_unsigned(fields[2], line_no, "count");
        break;
      case Section::kV2u:
        params.a_v2u[key] = internal::parse_unsigned(fields[2], line_no, "count");
        break;
      case Section::kNone:
        break;
    }
  }
  return params;
}

LearnedParams read_params_file(const std::string& path) {
  auto in = internal::open_input(path);
  return read_params(in);
}

}  // namespace mcd
