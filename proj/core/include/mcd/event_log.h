#ifndef MCD_EVENT_LOG_H_
#define MCD_EVENT_LOG_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcd/types.h"

namespace mcd {

struct EventRecord {
  UserId user = 0;
  ActionId action = 0;
  Timestamp time = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Canonical record order: (action, time, user).
bool record_less(const EventRecord& a, const EventRecord& b);

// Immutable multi-action event log. Records are deduplicated on the full
// (user, action, time) triple and sorted by (action, time, user).
class EventLog {
 public:
  EventLog() = default;
  // Throws DomainError on a negative timestamp.
  explicit EventLog(std::vector<EventRecord> records);

  std::span<const EventRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Sorted ascending.
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ActionId>& actions() const { return actions_; }

  bool has_action(ActionId a) const { return ranges_.count(a) != 0; }

  // Records of one action in chronological order. Throws DomainError for an
  // unknown action.
  std::span<const EventRecord> action_records(ActionId a) const;

  // A_u(a): number of times u performed a.
  std::size_t performance_count(UserId u, ActionId a) const;
  // t_1(u,a), if u performed a at all.
  std::optional<Timestamp> first_time(UserId u, ActionId a) const;
  // |A_u|: distinct actions performed by u.
  std::size_t distinct_actions(UserId u) const;

 private:
  struct PairStats {
    std::size_t count = 0;
    Timestamp first = 0;
  };

  std::vector<EventRecord> records_;
  std::vector<UserId> users_;
  std::vector<ActionId> actions_;
  std::map<ActionId, std::pair<std::size_t, std::size_t>> ranges_;
  std::unordered_map<UserPair, PairStats, UserPairHash> pairs_;  // key (u, a)
  std::unordered_map<UserId, std::size_t> distinct_;
};

// Parses `user action time` lines; blank lines and '#' comments are skipped.
// Throws ParseError naming the offending line.
EventLog parse_log(std::istream& in);
EventLog read_log_file(const std::string& path);
void write_log(std::ostream& out, const EventLog& log);
void write_log_file(const std::string& path, const EventLog& log);

// 1 - (distinct performers of a) / (performances of a).
double repetition_rate(const EventLog& log, ActionId a);

struct LogSplit {
  EventLog train;
  EventLog test;
};

// Partitions actions (not records) between train and test. The test side
// receives round(test_fraction * |actions|) actions, clamped so each side
// keeps at least one. Throws DomainError for fewer than two actions or a
// fraction outside (0, 1).
LogSplit split_by_action(const EventLog& log, double test_fraction, std::uint64_t seed);

// Keeps only the first performance of each (user, action) pair.
EventLog dedupe_first_occurrence(const EventLog& log);

}  // namespace mcd

#endif  // MCD_EVENT_LOG_H_
