#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "txforest/contents.hpp"
#include "txforest/log.hpp"
#include "txforest/path.hpp"
#include "txforest/result.hpp"

namespace txf {

// The filesystem model: a finite map from paths to contents. Values are
// immutable; every mutator returns a fresh state, so states can be shared
// freely across threads.
class FileStoreState {
 public:
  using Map = std::map<Path, Contents>;

  FileStoreState() = default;
  explicit FileStoreState(Map entries) : entries_(std::move(entries)) {}

  static FileStoreState empty_root() {
    Map m;
    m.emplace(root_path(), Contents::empty_dir());
    return FileStoreState(std::move(m));
  }

  bool contains(const Path& p) const { return entries_.count(p) > 0; }

  std::optional<Contents> get(const Path& p) const {
    auto it = entries_.find(p);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  FileStoreState with(const Path& p, Contents c) const {
    Map m = entries_;
    m.insert_or_assign(p, std::move(c));
    return FileStoreState(std::move(m));
  }

  FileStoreState without(const Path& p) const {
    Map m = entries_;
    m.erase(p);
    return FileStoreState(std::move(m));
  }

  const Map& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  friend bool operator==(const FileStoreState&, const FileStoreState&) = default;

 private:
  Map entries_;
};

// Both well-formedness clauses: the root is a directory, and a non-root path
// is mapped exactly when its parent is a directory listing it.
bool is_well_formed(const FileStoreState& fs);

// Restores well-formedness after a raw map update: mapped directories gain
// their missing children as empty files, descendants of files and sub-paths
// not listed by their parent are deleted. Idempotent. A missing root is
// created as an empty directory.
FileStoreState close_fs(const FileStoreState& fs);

// Ensures fs[p] is a directory containing u, creating ancestors as needed.
// No-op (and empty log) when the child is already present.
std::pair<FileStoreState, Log> add_node(const FileStoreState& fs,
                                        const Path& p, const std::string& u);

// Stores a file at p (creating it via add_node on the parent first).
// The root cannot be a file.
Result<std::pair<FileStoreState, Log>> make_file(const FileStoreState& fs,
                                                 const Path& p,
                                                 const std::string& text);

// Stores a directory with exactly the given children at p; children that
// disappear are pruned and new ones appear as empty files (via close_fs).
std::pair<FileStoreState, Log> make_dir(const FileStoreState& fs,
                                        const Path& p,
                                        const std::set<std::string>& children);

// Snapshot text format, one line per mapped path, sorted by path:
//   <path>\tF\t<base64 text>
//   <path>\tD\t<comma-joined sorted children>
std::string to_snapshot_text(const FileStoreState& fs);
Result<FileStoreState> from_snapshot_text(const std::string& text);

namespace detail {
std::string base64_encode(const std::string& data);
std::optional<std::string> base64_decode(const std::string& data);
}  // namespace detail

}  // namespace txf
