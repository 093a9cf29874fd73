#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stdfg/event_log.hpp"

namespace stdfg {

enum class SentinelStyle { Glyph, Ascii };

// An activity label, or one of the two trace sentinels. Ordering puts START
// first and END last with regular labels sorted lexicographically between.
struct Activity {
  enum class Kind : std::uint8_t { Start, Regular, End };

  Kind kind = Kind::Regular;
  std::string label;

  static Activity start() { return {Kind::Start, {}}; }
  static Activity end() { return {Kind::End, {}}; }
  static Activity of(std::string label) { return {Kind::Regular, std::move(label)}; }

  bool is_sentinel() const { return kind != Kind::Regular; }
  std::string display(SentinelStyle style = SentinelStyle::Glyph) const;

  auto operator<=>(const Activity&) const = default;
  bool operator==(const Activity&) const = default;
};

struct Substitution {
  std::string prefix;  // absolute path
  std::string token;   // e.g. "$SCRATCH"

  bool operator==(const Substitution&) const = default;
};

// Declarative partial mapping from events to activities "<call>:<path>".
struct MappingSpec {
  std::optional<std::string> path_filter;
  int depth = 2;
  std::vector<Substitution> substitutions;
  std::optional<std::set<std::string>> include_calls;

  bool operator==(const MappingSpec&) const = default;

  // Throws InvalidMappingSpec.
  void validate() const;
  // Canonical JSON text; two specs map identically iff their fingerprints match.
  std::string fingerprint() const;
  std::string to_json() const;
  static MappingSpec from_json(std::string_view text);
  // Throws MissingMappingSpec if the file cannot be read.
  static MappingSpec load(const std::filesystem::path& path);
};

// Applies the first matching substitution, then keeps at most `depth`
// directory levels. Paths that are neither absolute nor substituted pass
// through unchanged.
std::string abstract_path(const MappingSpec& spec, std::string_view fp);

std::optional<Activity> apply_mapping(const MappingSpec& spec, const Event& e);

using ActivityTrace = std::vector<Activity>;

// START, mapped activities in event order, END.
ActivityTrace trace_of(const MappingSpec& spec, const Case& c);

// What an ActivityLog (and everything built from it) was derived from.
struct Provenance {
  std::string mapping;          // MappingSpec fingerprint; empty for an empty value
  std::set<std::string> cases;  // CaseId keys

  bool operator==(const Provenance&) const = default;

  // Union of case sets; throws SpecMismatch when both carry different mappings.
  static Provenance combine(const Provenance& a, const Provenance& b);
};

Provenance provenance_of(const MappingSpec& spec, const EventLog& log);

// Multiset of traces.
class ActivityLog {
 public:
  ActivityLog() = default;
  explicit ActivityLog(Provenance provenance) : provenance_(std::move(provenance)) {}

  void add(ActivityTrace trace, std::uint64_t multiplicity = 1);

  const std::map<ActivityTrace, std::uint64_t>& traces() const { return traces_; }
  const Provenance& provenance() const { return provenance_; }
  std::uint64_t total_multiplicity() const;
  bool empty() const { return traces_.empty(); }

  // Multiset sum.
  friend ActivityLog operator+(const ActivityLog& a, const ActivityLog& b);
  bool operator==(const ActivityLog&) const = default;

 private:
  Provenance provenance_;
  std::map<ActivityTrace, std::uint64_t> traces_;
};

ActivityLog build_activity_log(const MappingSpec& spec, const EventLog& log);

}  // namespace stdfg
