#include "mcd/event_log.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <tuple>

#include "mcd/error.h"
#include "mcd/random.h"
#include "text_io.h"

namespace mcd {

bool record_less(const EventRecord& a, const EventRecord& b) {
  return std::tie(a.action, a.time, a.user) < std::tie(b.action, b.time, b.user);
}

EventLog::EventLog(std::vector<EventRecord> records) : records_(std::move(records)) {
  for (const auto& r : records_) {
    if (r.time < 0) {
      throw DomainError("negative timestamp " + std::to_string(r.time) + " for user " +
                        std::to_string(r.user));
    }
  }
  std::sort(records_.begin(), records_.end(), record_less);
  records_.erase(std::unique(records_.begin(), records_.end()), records_.end());

  std::set<UserId> users;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    users.insert(r.user);
    auto [it, inserted] = ranges_.try_emplace(r.action, i, i + 1);
    if (!inserted) it->second.second = i + 1;

    auto [pit, fresh] = pairs_.try_emplace(UserPair{r.user, r.action});
    if (fresh) {
      pit->second.first = r.time;  // chronological within an action
      ++distinct_[r.user];
    }
    ++pit->second.count;
  }
  users_.assign(users.begin(), users.end());
  actions_.reserve(ranges_.size());
  for (const auto& [a, range] : ranges_) actions_.push_back(a);
}

std::span<const EventRecord> EventLog::action_records(ActionId a) const {
  auto it = ranges_.find(a);
  if (it == ranges_.end()) throw DomainError("unknown action " + std::to_string(a));
  return std::span<const EventRecord>(records_).subspan(it->second.first,
                                                        it->second.second - it->second.first);
}

std::size_t EventLog::performance_count(UserId u, ActionId a) const {
  auto it = pairs_.find(UserPair{u, a});
  return it == pairs_.end() ? 0 : it->second.count;
}

std::optional<Timestamp> EventLog::first_time(UserId u, ActionId a) const {
  auto it = pairs_.find(UserPair{u, a});
  if (it == pairs_.end()) return std::nullopt;
  return it->second.first;
}

std::size_t EventLog::distinct_actions(UserId u) const {
  auto it = distinct_.find(u);
  return it == distinct_.end() ? 0 : it->second;
}

EventLog parse_log(std::istream& in) {
  std::vector<EventRecord> records;
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!internal::split_fields(line, fields)) continue;
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 fields 'user action time', got " +
                                    std::to_string(fields.size()));
    }
    EventRecord r;
    r.user = internal::parse_unsigned(fields[0], line_no, "user");
    r.action = internal::parse_unsigned(fields[1], line_no, "action");
    r.time = internal::parse_signed(fields[2], line_no, "time");
    if (r.time < 0) throw ParseError(line_no, "negative time " + std::to_string(r.time));
    records.push_back(r);
  }
  return EventLog(std::move(records));
}

EventLog read_log_file(const std::string& path) {
  auto in = internal::open_input(path);
  return parse_log(in);
}

void write_log(std::ostream& out, const EventLog& log) {
  for (const auto& r : log.records()) out << r.user << ' ' << r.action << ' ' << r.time << '\n';
}

void write_log_file(const std::string& path, const EventLog& log) {
  auto out = internal::open_output(path);
  write_log(out, log);
}

double repetition_rate(const EventLog& log, ActionId a) {
  const auto records = log.action_records(a);
  std::set<UserId> performers;
  for (const auto& r : records) performers.insert(r.user);
  return 1.0 - static_cast<double>(performers.size()) / static_cast<double>(records.size());
}

LogSplit split_by_action(const EventLog& log, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DomainError("test fraction must lie in (0, 1)");
  }
  const auto& actions = log.actions();
  if (actions.size() < 2) {
    throw DomainError("split needs at least 2 distinct actions, log has " +
                      std::to_string(actions.size()));
  }
  const auto n = static_cast<std::int64_t>(actions.size());
  auto n_test = static_cast<std::int64_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::int64_t>(n_test, 1, n - 1);

  std::vector<ActionId> order(actions.begin(), actions.end());
  SplitMix64 rng(seed);
  shuffle(order.begin(), order.end(), rng);
  std::set<ActionId> test_actions(order.begin(), order.begin() + n_test);

  std::vector<EventRecord> train, test;
  for (const auto& r : log.records()) {
    (test_actions.count(r.action) ? test : train).push_back(r);
  }
  return LogSplit{EventLog(std::move(train)), EventLog(std::move(test))};
}

EventLog dedupe_first_occurrence(const EventLog& log) {
  std::vector<EventRecord> kept;
  kept.reserve(log.size());
  for (const auto& r : log.records()) {
    if (log.first_time(r.user, r.action) == r.time) {
      // Equal-time duplicates were already collapsed, so exactly one record
      // per pair matches t_1.
      kept.push_back(r);
    }
  }
  return EventLog(std::move(kept));
}

}  // namespace mcd
