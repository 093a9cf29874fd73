#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stdfg {

// Identity of one trace file: command id, host and launcher-process id.
struct CaseId {
  std::string cid;
  std::string host;
  std::int64_t rid = 0;

  auto operator<=>(const CaseId&) const = default;
  bool operator==(const CaseId&) const = default;

  // "cid:host:rid", the string case selectors match against.
  std::string key() const;
  // "cid_host_rid", the trace-file and bundle-file stem.
  std::string stem() const;
};

// One parsed system call.
struct Event {
  std::string cid;
  std::string host;
  std::int64_t rid = 0;
  std::int64_t pid = 0;
  std::string call;
  std::int64_t start = 0;  // µs since midnight of the file's first day
  std::int64_t dur = 0;    // µs
  std::string fp;
  std::optional<std::int64_t> size;
  std::int64_t seq = 0;  // source line ordinal, unique within a case

  bool operator==(const Event&) const = default;
};

struct Case {
  CaseId id;
  std::vector<Event> events;  // sorted by (start, seq)
  std::string source;         // originating trace file name, if known

  bool operator==(const Case&) const = default;
};

// A set of cases with unique ids, kept sorted by CaseId so iteration order is
// deterministic. Immutable once handed to the analysis stages.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Case> cases);

  // Throws DuplicateCase if the id is already present.
  void add(Case c);

  const std::vector<Case>& cases() const { return cases_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  std::size_t event_count() const;
  const Case* find(const CaseId& id) const;

  bool operator==(const EventLog&) const = default;

 private:
  std::vector<Case> cases_;
};

// Union of two logs; throws DuplicateCase when the case ids overlap.
EventLog unite(const EventLog& a, const EventLog& b);

// Keeps only events whose file path contains `substring`. Cases that lose all
// their events stay in the log as empty cases.
EventLog filter_events(const EventLog& log, std::string_view substring);

EventLog select_cases(const EventLog& log,
                      const std::function<bool(const CaseId&)>& predicate);

// Orders events by (start, seq).
bool event_before(const Event& a, const Event& b);

}  // namespace stdfg
