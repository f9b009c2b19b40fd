#include "txforest/filestore.hpp"

#include <sstream>
#include <vector>

namespace txf {

bool is_well_formed(const FileStoreState& fs) {
  auto root = fs.get(root_path());
  if (!root || !root->is_dir()) return false;
  for (const auto& [p, c] : fs.entries()) {
    if (!p.is_root()) {
      auto parent = fs.get(*p.parent());
      if (!parent || !parent->is_dir() || !parent->has_child(p.name()))
        return false;
    }
    if (c.is_dir()) {
      for (const auto& s : c.children())
        if (!fs.contains(p / s)) return false;
    }
  }
  return true;
}

namespace {

// Deletes every mapped strict descendant of p.
FileStoreState::Map& erase_strict_descendants(FileStoreState::Map& m,
                                              const Path& p) {
  for (auto it = m.lower_bound(p); it != m.end();) {
    if (!p.is_prefix_of(it->first)) break;
    if (it->first != p)
      it = m.erase(it);
    else
      ++it;
  }
  return m;
}

void close_at(FileStoreState::Map& m, const Path& p) {
  auto it = m.find(p);
  if (it == m.end()) {
    // An unmapped node becomes an empty file; stale descendants of the
    // hole go with it.
    erase_strict_descendants(m, p);
    m.emplace(p, Contents::empty_file());
    return;
  }
  if (it->second.is_file()) {
    erase_strict_descendants(m, p);
    return;
  }
  const std::set<std::string> children = it->second.children();
  for (const auto& s : children) close_at(m, p / s);
  // Prune mapped descendants of p that are not below any declared child.
  std::vector<Path> orphans;
  for (auto jt = m.lower_bound(p); jt != m.end(); ++jt) {
    if (!p.is_prefix_of(jt->first)) break;
    if (jt->first == p) continue;
    bool under_child = false;
    for (const auto& s : children) {
      if ((p / s).is_prefix_of(jt->first)) {
        under_child = true;
        break;
      }
    }
    if (!under_child) orphans.push_back(jt->first);
  }
  for (const auto& q : orphans) m.erase(q);
}

}  // namespace

FileStoreState close_fs(const FileStoreState& fs) {
  FileStoreState::Map m = fs.entries();
  auto it = m.find(root_path());
  // The root must exist and be a directory for any state to be well-formed.
  if (it == m.end() || it->second.is_file())
    m.insert_or_assign(root_path(), Contents::empty_dir());
  close_at(m, root_path());
  return FileStoreState(std::move(m));
}

std::pair<FileStoreState, Log> add_node(const FileStoreState& fs,
                                        const Path& p, const std::string& u) {
  auto cur = fs.get(p);
  if (!cur) {
    FileStoreState base = fs;
    Log log;
    if (!p.is_root()) {
      auto [fs1, log1] = add_node(fs, *p.parent(), p.name());
      base = std::move(fs1);
      log = std::move(log1);
    }
    std::optional<Contents> old = base.get(p);
    Contents neu = Contents::dir({u});
    log.push_back(write_dir_entry(old, neu, p));
    return {close_fs(base.with(p, neu)), std::move(log)};
  }
  if (cur->is_file()) {
    Contents neu = Contents::dir({u});
    Log log{write_dir_entry(*cur, neu, p)};
    return {close_fs(fs.with(p, neu)), std::move(log)};
  }
  if (!cur->has_child(u)) {
    std::set<std::string> grown = cur->children();
    grown.insert(u);
    Contents neu = Contents::dir(std::move(grown));
    Log log{write_dir_entry(*cur, neu, p)};
    return {close_fs(fs.with(p, neu)), std::move(log)};
  }
  return {fs, Log{}};
}

Result<std::pair<FileStoreState, Log>> make_file(const FileStoreState& fs,
                                                 const Path& p,
                                                 const std::string& text) {
  if (p.is_root())
    return undefined("ModelViolation", "the root cannot be a file");
  auto [fs1, log] = add_node(fs, *p.parent(), p.name());
  Contents neu = Contents::file(text);
  // add_node guarantees p is mapped here on well-formed inputs; a hole can
  // still occur on ill-formed partial maps, so fall back to an empty file.
  Contents old = fs1.get(p).value_or(Contents::empty_file());
  log.push_back(write_file_entry(old, neu, p));
  return std::make_pair(close_fs(fs1.with(p, neu)), std::move(log));
}

std::pair<FileStoreState, Log> make_dir(const FileStoreState& fs,
                                        const Path& p,
                                        const std::set<std::string>& children) {
  FileStoreState base = fs;
  Log log;
  if (!p.is_root()) {
    auto [fs1, log1] = add_node(fs, *p.parent(), p.name());
    base = std::move(fs1);
    log = std::move(log1);
  }
  std::optional<Contents> old = base.get(p);
  Contents neu = Contents::dir(children);
  log.push_back(write_dir_entry(old, neu, p));
  return {close_fs(base.with(p, neu)), std::move(log)};
}

namespace detail {

static const char* kB64 =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::string& data) {
  std::string out;
  size_t i = 0;
  while (i + 2 < data.size()) {
    unsigned v = (unsigned char)data[i] << 16 | (unsigned char)data[i + 1] << 8 |
                 (unsigned char)data[i + 2];
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
    i += 3;
  }
  if (i + 1 == data.size()) {
    unsigned v = (unsigned char)data[i] << 16;
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == data.size()) {
    unsigned v = (unsigned char)data[i] << 16 | (unsigned char)data[i + 1] << 8;
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::optional<std::string> base64_decode(const std::string& data) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (data.size() % 4 != 0) return std::nullopt;
  std::string out;
  for (size_t i = 0; i < data.size(); i += 4) {
    int pad = 0;
    unsigned v = 0;
    for (int j = 0; j < 4; ++j) {
      char c = data[i + j];
      if (c == '=') {
        if (i + 4 != data.size() || j < 2) return std::nullopt;
        ++pad;
        v <<= 6;
      } else {
        int d = val(c);
        if (d < 0 || pad > 0) return std::nullopt;
        v = v << 6 | (unsigned)d;
      }
    }
    out += (char)(v >> 16);
    if (pad < 2) out += (char)((v >> 8) & 0xff);
    if (pad < 1) out += (char)(v & 0xff);
  }
  return out;
}

}  // namespace detail

std::string to_snapshot_text(const FileStoreState& fs) {
  std::string out;
  for (const auto& [p, c] : fs.entries()) {
    out += p.to_string();
    if (c.is_file()) {
      out += "\tF\t";
      out += detail::base64_encode(c.text());
    } else {
      out += "\tD\t";
      bool first = true;
      for (const auto& s : c.children()) {
        if (!first) out += ',';
        first = false;
        out += s;
      }
    }
    out += '\n';
  }
  return out;
}

Result<FileStoreState> from_snapshot_text(const std::string& text) {
  FileStoreState::Map m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      return undefined("SnapshotParse",
                       "line " + std::to_string(lineno) + ": expected 3 fields");
    auto p = Path::parse(line.substr(0, t1));
    if (!p)
      return undefined("SnapshotParse",
                       "line " + std::to_string(lineno) + ": bad path");
    std::string kind = line.substr(t1 + 1, t2 - t1 - 1);
    std::string payload = line.substr(t2 + 1);
    if (kind == "F") {
      auto decoded = detail::base64_decode(payload);
      if (!decoded)
        return undefined("SnapshotParse",
                         "line " + std::to_string(lineno) + ": bad base64");
      m.insert_or_assign(*p, Contents::file(*decoded));
    } else if (kind == "D") {
      std::set<std::string> children;
      std::string cur;
      for (char c : payload + ",") {
        if (c == ',') {
          if (!cur.empty()) children.insert(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      m.insert_or_assign(*p, Contents::dir(std::move(children)));
    } else {
      return undefined("SnapshotParse",
                       "line " + std::to_string(lineno) + ": bad kind");
    }
  }
  return FileStoreState(std::move(m));
}

std::string Contents::to_string() const {
  if (is_file()) return "File \"" + text_ + "\"";
  std::string out = "Dir {";
  bool first = true;
  for (const auto& s : children_) {
    if (!first) out += ", ";
    first = false;
    out += s;
  }
  return out + "}";
}

std::string LogEntry::to_string() const {
  auto show = [](const std::optional<Contents>& c) {
    return c ? c->to_string() : std::string("absent");
  };
  switch (kind) {
    case Kind::Read:
      return "Read(" + show(before) + ", " + path.to_string() + ")";
    case Kind::WriteFile:
      return "WriteFile(" + show(before) + ", " + show(after) + ", " +
             path.to_string() + ")";
    case Kind::WriteDir:
      return "WriteDir(" + show(before) + ", " + show(after) + ", " +
             path.to_string() + ")";
  }
  return "?";
}

}  // namespace txf
