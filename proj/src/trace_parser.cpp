#include "stdfg/trace_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "stdfg/error.hpp"

namespace stdfg {
namespace {

constexpr std::int64_t kMicrosPerSecond = 1'000'000;
constexpr std::int64_t kMicrosPerDay = 24LL * 3600 * kMicrosPerSecond;
constexpr std::int64_t kRolloverThreshold = kMicrosPerDay / 2;
constexpr std::string_view kUnknownPath = "(unknown)";

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> to_int(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Reads "<secs>.<fraction>" into µs; fraction is right-padded to 6 digits.
std::optional<std::int64_t> seconds_to_micros(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto whole = s.substr(0, dot);
  auto frac = s.substr(dot + 1);
  if (!all_digits(whole) || !all_digits(frac) || frac.size() > 6) return std::nullopt;
  std::string padded(frac);
  padded.resize(6, '0');
  auto secs = to_int<std::int64_t>(whole);
  auto micros = to_int<std::int64_t>(padded);
  if (!secs || !micros) return std::nullopt;
  return *secs * kMicrosPerSecond + *micros;
}

// "HH:MM:SS.ffffff"
std::optional<std::int64_t> parse_wallclock(std::string_view s) {
  if (s.size() < 10 || s[2] != ':' || s[5] != ':') return std::nullopt;
  auto hh = s.substr(0, 2), mm = s.substr(3, 2);
  if (!all_digits(hh) || !all_digits(mm)) return std::nullopt;
  auto secs = seconds_to_micros(s.substr(6));
  if (!secs) return std::nullopt;
  auto h = *to_int<std::int64_t>(hh);
  auto m = *to_int<std::int64_t>(mm);
  if (h > 23 || m > 59 || *secs >= 60 * kMicrosPerSecond) return std::nullopt;
  return (h * 3600 + m * 60) * kMicrosPerSecond + *secs;
}

std::string_view take_token(std::string_view& s) {
  s = trim(s);
  auto end = s.find_first_of(" \t");
  auto tok = s.substr(0, end);
  s = end == std::string_view::npos ? std::string_view{} : s.substr(end);
  return tok;
}

bool is_path_call(std::string_view call) {
  return call == "open" || call == "openat" || call == "openat2" || call == "creat";
}

// `N</path>` at the start of the argument list.
std::optional<std::string> fd_annotation(std::string_view args) {
  std::size_t i = 0;
  while (i < args.size() && is_digit(args[i])) ++i;
  if (i == 0 || i >= args.size() || args[i] != '<') return std::nullopt;
  auto body = args.substr(i + 1);
  std::size_t close = std::string_view::npos;
  for (auto terminator : {">,", ">)", "> "}) {
    auto pos = body.find(terminator);
    if (pos != std::string_view::npos) close = std::min(close, pos);
  }
  if (close == std::string_view::npos) close = body.find('>');
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(body.substr(0, close));
}

std::optional<std::string> first_quoted(std::string_view args) {
  auto open = args.find('"');
  if (open == std::string_view::npos) return std::nullopt;
  std::string out;
  for (std::size_t i = open + 1; i < args.size(); ++i) {
    char c = args[i];
    if (c == '"') return out;
    if (c == '\\' && i + 1 < args.size()) {
      char n = args[++i];
      switch (n) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: out += n; break;
      }
      continue;
    }
    out += c;
  }
  return std::nullopt;
}

// Splits "... = RET <D.DDDDDD>" off the end of a record body.
struct ReturnSection {
  std::string_view head;
  std::optional<std::int64_t> retval;
  std::optional<std::int64_t> dur;
  bool has_equals = false;
};

ReturnSection split_return(std::string_view body) {
  ReturnSection out{body, std::nullopt, std::nullopt, false};
  auto tail = trim(body);
  if (!tail.empty() && tail.back() == '>') {
    auto lt = tail.rfind('<');
    if (lt != std::string_view::npos) {
      out.dur = seconds_to_micros(tail.substr(lt + 1, tail.size() - lt - 2));
      if (out.dur) tail = trim(tail.substr(0, lt));
    }
  }
  auto eq = tail.rfind(" = ");
  if (eq == std::string_view::npos) {
    out.head = tail;
    return out;
  }
  out.has_equals = true;
  out.head = tail.substr(0, eq);
  auto ret = trim(tail.substr(eq + 3));
  auto end = ret.find_first_of(" <");
  out.retval = to_int<std::int64_t>(ret.substr(0, end));
  return out;
}

}  // namespace

FileNameMeta parse_filename(std::string_view name) {
  auto slash = name.find_last_of('/');
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
  const std::string original(name);
  constexpr std::string_view ext = ".st";
  if (name.size() <= ext.size() || name.substr(name.size() - ext.size()) != ext)
    throw MalformedName(fmt::format("'{}': expected <cid>_<host>_<rid>.st", original));
  name.remove_suffix(ext.size());
  auto last = name.rfind('_');
  if (last == std::string_view::npos || last == 0)
    throw MalformedName(fmt::format("'{}': expected <cid>_<host>_<rid>.st", original));
  auto second = name.rfind('_', last - 1);
  if (second == std::string_view::npos)
    throw MalformedName(fmt::format("'{}': expected <cid>_<host>_<rid>.st", original));
  FileNameMeta meta;
  meta.cid = std::string(name.substr(0, second));
  meta.host = std::string(name.substr(second + 1, last - second - 1));
  auto rid_text = name.substr(last + 1);
  if (!all_digits(rid_text))
    throw MalformedName(fmt::format("'{}': rid '{}' is not a decimal integer", original, rid_text));
  auto rid = to_int<std::int64_t>(rid_text);
  if (!rid || *rid <= 0)
    throw MalformedName(fmt::format("'{}': rid must be a positive integer", original));
  meta.rid = *rid;
  if (meta.cid.empty() || meta.host.empty() || meta.cid.find('_') != std::string::npos)
    throw MalformedName(fmt::format("'{}': cid and host must be non-empty without '_'", original));
  return meta;
}

const CallSet& default_traced_calls() {
  static const CallSet calls{"read",   "write", "pread64", "pwrite64",
                             "readv",  "writev", "openat", "lseek"};
  return calls;
}

bool is_transfer_call(std::string_view call) {
  static const CallSet calls{"read",   "write",   "pread64",  "pwrite64", "readv",
                             "writev", "preadv",  "pwritev",  "preadv2",  "pwritev2"};
  return calls.contains(call);
}

RawRecord parse_line(std::string_view line, const CallSet& traced) {
  RawRecord rec;
  auto rest = trim(line);
  if (rest.empty()) return rec;

  // "[pid N] " or "N "
  if (rest.starts_with("[pid")) {
    auto close = rest.find(']');
    auto inner = close == std::string_view::npos ? std::string_view{} : trim(rest.substr(4, close - 4));
    auto pid = all_digits(inner) ? to_int<std::int64_t>(inner) : std::nullopt;
    if (!pid) throw MissingPid(fmt::format("bad pid prefix in '{}'", line));
    rec.pid = *pid;
    rest = rest.substr(close + 1);
  } else {
    auto copy = rest;
    auto tok = take_token(copy);
    auto pid = all_digits(tok) ? to_int<std::int64_t>(tok) : std::nullopt;
    if (!pid || copy.empty())
      throw MissingPid(fmt::format("no pid prefix (trace recorded without -f?): '{}'", line));
    rec.pid = *pid;
    rest = copy;
  }

  if (line.find("ERESTARTSYS") != std::string_view::npos) return rec;
  rest = trim(rest);
  if (rest.starts_with("---") || rest.starts_with("+++")) return rec;

  auto copy = rest;
  auto stamp = take_token(copy);
  auto wallclock = parse_wallclock(stamp);
  if (!wallclock) {
    throw MalformedLine(fmt::format("missing HH:MM:SS.ffffff timestamp: '{}'", line));
  }
  rec.wallclock = *wallclock;
  rest = trim(copy);
  if (rest.starts_with("---") || rest.starts_with("+++")) return rec;

  if (rest.starts_with("<...")) {
    auto marker = rest.find(" resumed>");
    if (marker == std::string_view::npos)
      throw MalformedLine(fmt::format("unterminated resumed marker: '{}'", line));
    rec.callname = std::string(trim(rest.substr(4, marker - 4)));
    if (!traced.contains(rec.callname)) return rec;
    auto ret = split_return(rest.substr(marker + 9));
    if (!ret.has_equals || !ret.dur)
      throw MalformedLine(fmt::format("resumed record without return section: '{}'", line));
    rec.args_tail = std::string(trim(ret.head));
    rec.retval = ret.retval;
    rec.dur = ret.dur;
    rec.kind = RecordKind::Resumed;
    return rec;
  }

  auto paren = rest.find('(');
  if (paren == std::string_view::npos || paren == 0)
    throw MalformedLine(fmt::format("no system call found: '{}'", line));
  rec.callname = std::string(rest.substr(0, paren));
  if (!traced.contains(rec.callname)) return rec;
  auto args = rest.substr(paren + 1);
  rec.fd_path = fd_annotation(args);
  if (is_path_call(rec.callname)) rec.quoted_path = first_quoted(args);

  if (auto trimmed = trim(args); trimmed.ends_with("<unfinished ...>")) {
    trimmed.remove_suffix(std::string_view("<unfinished ...>").size());
    rec.args_tail = std::string(trim(trimmed));
    rec.kind = RecordKind::Unfinished;
    return rec;
  }

  auto ret = split_return(args);
  if (!ret.has_equals || !ret.dur)
    throw MalformedLine(fmt::format("missing return section '= RET <DUR>': '{}'", line));
  rec.args_tail = std::string(trim(ret.head));
  rec.retval = ret.retval;
  rec.dur = ret.dur;
  rec.kind = RecordKind::Complete;
  return rec;
}

std::vector<RawRecord> merge_unfinished_resumed(const std::vector<RawRecord>& records,
                                                std::vector<Warning>& warnings) {
  // Output slots; an Unfinished record reserves its slot until resumed.
  std::vector<std::optional<RawRecord>> slots;
  slots.reserve(records.size());
  std::map<std::pair<std::int64_t, std::string>, std::deque<std::size_t>> pending;

  for (const auto& rec : records) {
    switch (rec.kind) {
      case RecordKind::Skip:
        break;
      case RecordKind::Complete:
        slots.emplace_back(rec);
        break;
      case RecordKind::Unfinished:
        pending[{rec.pid, rec.callname}].push_back(slots.size());
        slots.emplace_back(rec);
        break;
      case RecordKind::Resumed: {
        auto it = pending.find({rec.pid, rec.callname});
        if (it == pending.end() || it->second.empty()) {
          warnings.push_back({rec.line_no, fmt::format("orphan resumed {} (pid {}) dropped",
                                                       rec.callname, rec.pid)});
          break;
        }
        auto& merged = *slots[it->second.front()];
        it->second.pop_front();
        merged.kind = RecordKind::Complete;
        merged.dur = rec.dur;
        merged.retval = rec.retval;
        break;
      }
    }
  }

  std::vector<RawRecord> out;
  out.reserve(slots.size());
  for (auto& slot : slots) {
    if (slot->kind == RecordKind::Unfinished) {
      warnings.push_back({slot->line_no, fmt::format("orphan unfinished {} (pid {}) dropped",
                                                     slot->callname, slot->pid)});
      continue;
    }
    out.push_back(std::move(*slot));
  }
  std::sort(warnings.begin(), warnings.end(),
            [](const Warning& a, const Warning& b) { return a.line_no < b.line_no; });
  return out;
}

ParsedCase parse_trace_file(const FileNameMeta& meta, const std::vector<std::string>& lines,
                            const CallSet& traced) {
  std::vector<RawRecord> records;
  records.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line_no = static_cast<std::int64_t>(i + 1);
    try {
      auto rec = parse_line(lines[i], traced);
      rec.line_no = line_no;
      records.push_back(std::move(rec));
    } catch (const MissingPid& err) {
      throw MissingPid(fmt::format("line {}: {}", line_no, err.what()));
    } catch (const MalformedLine& err) {
      throw MalformedLine(fmt::format("line {}: {}", line_no, err.what()));
    }
  }

  ParsedCase out;
  out.value.id = meta.case_id();
  auto merged = merge_unfinished_resumed(records, out.warnings);

  std::int64_t offset = 0;
  std::optional<std::int64_t> previous;
  for (const auto& rec : merged) {
    std::int64_t start = rec.wallclock + offset;
    if (previous && start < *previous - kRolloverThreshold) {
      offset += kMicrosPerDay;
      start += kMicrosPerDay;
    }
    previous = start;

    Event e;
    e.cid = meta.cid;
    e.host = meta.host;
    e.rid = meta.rid;
    e.pid = rec.pid;
    e.call = rec.callname;
    e.start = start;
    e.dur = std::max<std::int64_t>(0, rec.dur.value_or(0));
    if (rec.fd_path)
      e.fp = *rec.fd_path;
    else if (rec.quoted_path)
      e.fp = *rec.quoted_path;
    else
      e.fp = std::string(kUnknownPath);
    if (is_transfer_call(e.call) && rec.retval && *rec.retval >= 0) e.size = rec.retval;
    e.seq = rec.line_no;
    out.value.events.push_back(std::move(e));
  }
  std::stable_sort(out.value.events.begin(), out.value.events.end(), event_before);
  return out;
}

ParsedCase parse_trace_path(const std::string& path, const CallSet& traced) {
  auto meta = parse_filename(std::filesystem::path(path).filename().string());
  std::ifstream in(path);
  if (!in) throw IoFailure(fmt::format("cannot open trace file '{}'", path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  try {
    return parse_trace_file(meta, lines, traced);
  } catch (const MissingPid& err) {
    throw MissingPid(fmt::format("{}: {}", path, err.what()));
  } catch (const MalformedLine& err) {
    throw MalformedLine(fmt::format("{}: {}", path, err.what()));
  }
}

std::string format_wallclock(std::int64_t us) {
  us %= kMicrosPerDay;
  const auto secs = us / kMicrosPerSecond;
  return fmt::format("{:02}:{:02}:{:02}.{:06}", secs / 3600, (secs / 60) % 60, secs % 60,
                     us % kMicrosPerSecond);
}

std::string render_line(const Event& e) {
  std::string quoted;
  for (char c : e.fp) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c;
  }
  const bool unknown = e.fp == kUnknownPath;
  std::string args;
  if (is_path_call(e.call))
    args = fmt::format("AT_FDCWD, \"{}\", O_RDONLY", quoted);
  else if (unknown)
    args = "3, \"\"..., 4096";
  else
    args = fmt::format("3<{}>, \"\"..., 4096", e.fp);

  std::string ret;
  if (e.size)
    ret = std::to_string(*e.size);
  else if (is_transfer_call(e.call))
    ret = "-1 EIO (Input/output error)";
  else
    ret = "0";
  return fmt::format("{} {} {}({}) = {} <{}.{:06}>", e.pid, format_wallclock(e.start), e.call,
                     args, ret, e.dur / kMicrosPerSecond, e.dur % kMicrosPerSecond);
}

}  // namespace stdfg
