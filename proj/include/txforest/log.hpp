#pragma once

#include <cassert>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "txforest/contents.hpp"
#include "txforest/path.hpp"

namespace txf {

// One filesystem interaction. Reads carry the contents observed (absent when
// the path was unmapped, as fetch_opt may legitimately read a hole). Writes
// carry both the previous and the new contents at the path.
struct LogEntry {
  enum class Kind { Read, WriteFile, WriteDir };

  Kind kind;
  std::optional<Contents> before;  // Read: observed; writes: overwritten value
  std::optional<Contents> after;   // writes only
  Path path;

  bool is_read() const { return kind == Kind::Read; }
  bool is_write() const { return kind != Kind::Read; }

  std::string to_string() const;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

using Log = std::vector<LogEntry>;

inline LogEntry read_entry(std::optional<Contents> seen, Path p) {
  return LogEntry{LogEntry::Kind::Read, std::move(seen), std::nullopt,
                  std::move(p)};
}

inline LogEntry write_file_entry(Contents before, Contents after, Path p) {
  assert(after.is_file());
  return LogEntry{LogEntry::Kind::WriteFile, std::move(before),
                  std::move(after), std::move(p)};
}

inline LogEntry write_dir_entry(std::optional<Contents> before, Contents after,
                                Path p) {
  assert(after.is_dir());
  return LogEntry{LogEntry::Kind::WriteDir, std::move(before),
                  std::move(after), std::move(p)};
}

inline void append_log(Log& dst, const Log& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

inline Log writes_only(const Log& log) {
  Log out;
  for (const auto& e : log)
    if (e.is_write()) out.push_back(e);
  return out;
}

inline std::set<Path> log_paths(const Log& log) {
  std::set<Path> out;
  for (const auto& e : log) out.insert(e.path);
  return out;
}

}  // namespace txf
