#include "stdfg/bundle.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "stdfg/error.hpp"

namespace stdfg {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kHeader = "seq,pid,call,start_us,dur_us,fp,size";
constexpr std::string_view kManifest = "manifest.json";

std::string case_file(const CaseId& id) { return fmt::format("cases/{}.csv", id.stem()); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw IoFailure(fmt::format("write failed for '{}'", path.string()));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptBundle(fmt::format("missing file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::int64_t parse_int(const std::string& field, const fs::path& file, std::size_t row) {
  std::int64_t value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
    throw CorruptBundle(fmt::format("{}: row {}: '{}' is not an integer", file.string(), row, field));
  return value;
}

std::string render_case(const Case& c) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& e : c.events) {
    out += fmt::format("{},{},{},{},{},{},{}\n", e.seq, e.pid, csv::quote(e.call), e.start, e.dur,
                       csv::quote(e.fp), e.size ? std::to_string(*e.size) : std::string{});
  }
  return out;
}

}  // namespace

namespace csv {

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw CorruptBundle("unterminated quoted CSV field");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace csv

void write_bundle(const EventLog& log, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "cases", ec);
  if (ec) throw IoFailure(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  auto manifest = ordered_json::array();
  for (const auto& c : log.cases()) {
    const auto file = case_file(c.id);
    write_text(dir / file, render_case(c));
    manifest.push_back(ordered_json{{"cid", c.id.cid},
                                    {"host", c.id.host},
                                    {"rid", c.id.rid},
                                    {"file", file},
                                    {"event_count", c.events.size()},
                                    {"source", c.source}});
  }
  write_text(dir / kManifest, manifest.dump(2) + "\n");
}

EventLog read_bundle(const fs::path& dir) {
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(read_text(dir / kManifest));
  } catch (const nlohmann::json::exception& err) {
    throw CorruptBundle(fmt::format("{}: bad manifest: {}", dir.string(), err.what()));
  }
  if (!manifest.is_array()) throw CorruptBundle("manifest must be a JSON array");

  EventLog log;
  for (const auto& entry : manifest) {
    Case c;
    std::string file;
    std::size_t expected = 0;
    try {
      c.id = {entry.at("cid").get<std::string>(), entry.at("host").get<std::string>(),
              entry.at("rid").get<std::int64_t>()};
      file = entry.at("file").get<std::string>();
      expected = entry.at("event_count").get<std::size_t>();
      c.source = entry.value("source", std::string{});
    } catch (const nlohmann::json::exception& err) {
      throw CorruptBundle(fmt::format("bad manifest entry: {}", err.what()));
    }
    if (file != case_file(c.id))
      throw CorruptBundle(fmt::format("manifest entry {} names file '{}'", c.id.key(), file));

    const auto path = dir / file;
    auto rows = csv::parse(read_text(path));
    if (rows.empty() || fmt::format("{}", fmt::join(rows.front(), ",")) != kHeader)
      throw CorruptBundle(fmt::format("{}: bad header", path.string()));
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != 7)
        throw CorruptBundle(fmt::format("{}: row {} has {} fields", path.string(), r, row.size()));
      Event e;
      e.cid = c.id.cid;
      e.host = c.id.host;
      e.rid = c.id.rid;
      e.seq = parse_int(row[0], path, r);
      e.pid = parse_int(row[1], path, r);
      e.call = row[2];
      e.start = parse_int(row[3], path, r);
      e.dur = parse_int(row[4], path, r);
      e.fp = row[5];
      if (!row[6].empty()) e.size = parse_int(row[6], path, r);
      if (e.dur < 0 || (e.size && *e.size < 0))
        throw CorruptBundle(fmt::format("{}: row {}: negative dur or size", path.string(), r));
      if (!c.events.empty() && !event_before(c.events.back(), e))
        throw CorruptBundle(fmt::format("{}: row {} out of (start_us, seq) order", path.string(), r));
      c.events.push_back(std::move(e));
    }
    if (c.events.size() != expected)
      throw CorruptBundle(fmt::format("{}: manifest says {} events, file has {}", path.string(),
                                      expected, c.events.size()));
    try {
      log.add(std::move(c));
    } catch (const DuplicateCase& err) {
      throw CorruptBundle(err.what());
    }
  }
  return log;
}

}  // namespace stdfg
