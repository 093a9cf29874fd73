#include "stdfg/mapping.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "stdfg/error.hpp"

namespace stdfg {
using ordered_json = nlohmann::ordered_json;

std::string Activity::display(SentinelStyle style) const {
  switch (kind) {
    case Kind::Start: return style == SentinelStyle::Glyph ? "•" : "START";
    case Kind::End: return style == SentinelStyle::Glyph ? "■" : "END";
    case Kind::Regular: break;
  }
  return label;
}

void MappingSpec::validate() const {
  if (depth < 1) throw InvalidMappingSpec(fmt::format("depth must be >= 1, got {}", depth));
  for (const auto& s : substitutions) {
    if (s.prefix.empty() || s.prefix.front() != '/')
      throw InvalidMappingSpec(fmt::format("substitution prefix '{}' is not absolute", s.prefix));
  }
}

std::string MappingSpec::to_json() const {
  ordered_json doc;
  doc["path_filter"] = path_filter ? ordered_json(*path_filter) : ordered_json(nullptr);
  doc["depth"] = depth;
  doc["substitutions"] = ordered_json::array();
  for (const auto& s : substitutions)
    doc["substitutions"].push_back({{"prefix", s.prefix}, {"token", s.token}});
  doc["include_calls"] = include_calls ? ordered_json(*include_calls) : ordered_json(nullptr);
  return doc.dump();
}

std::string MappingSpec::fingerprint() const { return to_json(); }

MappingSpec MappingSpec::from_json(std::string_view text) {
  MappingSpec spec;
  try {
    auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw InvalidMappingSpec("mapping spec must be a JSON object");
    if (doc.contains("path_filter") && !doc["path_filter"].is_null())
      spec.path_filter = doc["path_filter"].get<std::string>();
    if (doc.contains("depth")) spec.depth = doc["depth"].get<int>();
    if (doc.contains("substitutions")) {
      for (const auto& s : doc["substitutions"])
        spec.substitutions.push_back({s.at("prefix").get<std::string>(), s.at("token").get<std::string>()});
    }
    if (doc.contains("include_calls") && !doc["include_calls"].is_null())
      spec.include_calls = doc["include_calls"].get<std::set<std::string>>();
  } catch (const nlohmann::json::exception& err) {
    throw InvalidMappingSpec(fmt::format("bad mapping spec: {}", err.what()));
  }
  spec.validate();
  return spec;
}

MappingSpec MappingSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingMappingSpec(fmt::format("cannot read mapping spec '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string abstract_path(const MappingSpec& spec, std::string_view fp) {
  std::string path(fp);
  bool substituted = false;
  for (const auto& s : spec.substitutions) {
    std::string_view view(fp);
    if (view.starts_with(s.prefix) &&
        (view.size() == s.prefix.size() || view[s.prefix.size()] == '/' || s.prefix.back() == '/')) {
      path = s.token + std::string(view.substr(s.prefix.size()));
      substituted = true;
      break;
    }
  }
  const bool absolute = !path.empty() && path.front() == '/';
  if (!absolute && !substituted) return path;

  std::string out = absolute ? "/" : "";
  int kept = 0;
  std::size_t pos = 0;
  while (pos <= path.size() && kept < spec.depth) {
    auto next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    if (next > pos) {
      if (kept > 0) out += '/';
      out.append(path, pos, next - pos);
      ++kept;
    }
    pos = next + 1;
  }
  return out;
}

std::optional<Activity> apply_mapping(const MappingSpec& spec, const Event& e) {
  if (spec.path_filter && e.fp.find(*spec.path_filter) == std::string::npos) return std::nullopt;
  if (spec.include_calls && !spec.include_calls->contains(e.call)) return std::nullopt;
  return Activity::of(e.call + ":" + abstract_path(spec, e.fp));
}

ActivityTrace trace_of(const MappingSpec& spec, const Case& c) {
  ActivityTrace trace;
  trace.reserve(c.events.size() + 2);
  trace.push_back(Activity::start());
  for (const auto& e : c.events)
    if (auto a = apply_mapping(spec, e)) trace.push_back(std::move(*a));
  trace.push_back(Activity::end());
  return trace;
}

Provenance Provenance::combine(const Provenance& a, const Provenance& b) {
  if (!a.mapping.empty() && !b.mapping.empty() && a.mapping != b.mapping)
    throw SpecMismatch("cannot combine results derived from different mapping specs");
  Provenance out{a.mapping.empty() ? b.mapping : a.mapping, a.cases};
  out.cases.insert(b.cases.begin(), b.cases.end());
  return out;
}

Provenance provenance_of(const MappingSpec& spec, const EventLog& log) {
  Provenance p{spec.fingerprint(), {}};
  for (const auto& c : log.cases()) p.cases.insert(c.id.key());
  return p;
}

void ActivityLog::add(ActivityTrace trace, std::uint64_t multiplicity) {
  if (multiplicity == 0) return;
  traces_[std::move(trace)] += multiplicity;
}

std::uint64_t ActivityLog::total_multiplicity() const {
  std::uint64_t n = 0;
  for (const auto& [_, m] : traces_) n += m;
  return n;
}

ActivityLog operator+(const ActivityLog& a, const ActivityLog& b) {
  ActivityLog out(Provenance::combine(a.provenance_, b.provenance_));
  out.traces_ = a.traces_;
  for (const auto& [t, m] : b.traces_) out.traces_[t] += m;
  return out;
}

ActivityLog build_activity_log(const MappingSpec& spec, const EventLog& log) {
  ActivityLog out(provenance_of(spec, log));
  for (const auto& c : log.cases()) out.add(trace_of(spec, c));
  return out;
}

}  // namespace stdfg
