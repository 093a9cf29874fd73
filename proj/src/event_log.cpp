#include "stdfg/event_log.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "stdfg/error.hpp"

namespace stdfg {

std::string CaseId::key() const { return fmt::format("{}:{}:{}", cid, host, rid); }

std::string CaseId::stem() const { return fmt::format("{}_{}_{}", cid, host, rid); }

bool event_before(const Event& a, const Event& b) {
  if (a.start != b.start) return a.start < b.start;
  return a.seq < b.seq;
}

EventLog::EventLog(std::vector<Case> cases) {
  for (auto& c : cases) add(std::move(c));
}

void EventLog::add(Case c) {
  auto it = std::lower_bound(cases_.begin(), cases_.end(), c.id,
                             [](const Case& lhs, const CaseId& id) { return lhs.id < id; });
  if (it != cases_.end() && it->id == c.id)
    throw DuplicateCase(fmt::format("duplicate case {}", c.id.key()));
  cases_.insert(it, std::move(c));
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto& c : cases_) n += c.events.size();
  return n;
}

const Case* EventLog::find(const CaseId& id) const {
  auto it = std::lower_bound(cases_.begin(), cases_.end(), id,
                             [](const Case& lhs, const CaseId& key) { return lhs.id < key; });
  if (it == cases_.end() || it->id != id) return nullptr;
  return &*it;
}

EventLog unite(const EventLog& a, const EventLog& b) {
  EventLog out = a;
  for (const auto& c : b.cases()) out.add(c);
  return out;
}

EventLog filter_events(const EventLog& log, std::string_view substring) {
  EventLog out;
  for (const auto& c : log.cases()) {
    Case kept{c.id, {}, c.source};
    std::copy_if(c.events.begin(), c.events.end(), std::back_inserter(kept.events),
                 [&](const Event& e) { return e.fp.find(substring) != std::string::npos; });
    out.add(std::move(kept));
  }
  return out;
}

EventLog select_cases(const EventLog& log,
                      const std::function<bool(const CaseId&)>& predicate) {
  EventLog out;
  for (const auto& c : log.cases())
    if (predicate(c.id)) out.add(c);
  return out;
}

}  // namespace stdfg
