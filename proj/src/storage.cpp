#include "txforest/storage.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "txforest/txn.hpp"

namespace fs = std::filesystem;

namespace txf {

Result<bool> MemoryStorage::apply(const Log& log) {
  fs_ = merge(fs_, log);
  return true;
}

std::string PosixStorage::host_path(const Path& p) const {
  std::string out = root_;
  for (const auto& c : p.components()) {
    out += '/';
    out += c;
  }
  return out;
}

std::optional<Contents> PosixStorage::read(const Path& p) {
  std::error_code ec;
  fs::path hp = host_path(p);
  auto st = fs::symlink_status(hp, ec);
  if (ec || !fs::exists(st)) return std::nullopt;
  if (fs::is_directory(st)) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(hp, ec))
      names.insert(e.path().filename().string());
    return Contents::dir(std::move(names));
  }
  if (fs::is_regular_file(st)) {
    std::ifstream in(hp, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return Contents::file(buf.str());
  }
  return std::nullopt;
}

Result<FileStoreState> PosixStorage::snapshot() {
  FileStoreState::Map m;
  std::error_code ec;
  if (!fs::is_directory(root_, ec))
    return undefined("StructuralError", root_ + " is not a directory");

  std::function<Result<bool>(const Path&, const fs::path&)> walk =
      [&](const Path& p, const fs::path& hp) -> Result<bool> {
    auto st = fs::symlink_status(hp);
    if (fs::is_symlink(st))
      return undefined("StructuralError", hp.string() + " is a symlink");
    if (fs::is_directory(st)) {
      std::set<std::string> names;
      for (const auto& e : fs::directory_iterator(hp))
        names.insert(e.path().filename().string());
      m.insert_or_assign(p, Contents::dir(names));
      for (const auto& name : names) {
        TXF_TRY(sub, walk(p / name, hp / name));
        (void)sub;
      }
      return true;
    }
    if (fs::is_regular_file(st)) {
      std::ifstream in(hp, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      m.insert_or_assign(p, Contents::file(buf.str()));
      return true;
    }
    return undefined("StructuralError",
                     hp.string() + " is neither a file nor a directory");
  };

  TXF_TRY(done, walk(root_path(), fs::path(root_)));
  (void)done;
  return FileStoreState(std::move(m));
}

Result<bool> PosixStorage::apply(const Log& log) {
  TXF_TRY(disk, snapshot());
  FileStoreState target = merge(disk, log);

  // Deletions first, children before parents.
  std::vector<Path> gone;
  for (const auto& [p, c] : disk.entries())
    if (!target.contains(p)) gone.push_back(p);
  for (auto it = gone.rbegin(); it != gone.rend(); ++it) {
    std::error_code ec;
    fs::remove_all(host_path(*it), ec);
    if (ec) return undefined("IoError", host_path(*it) + ": " + ec.message());
  }

  for (const auto& [p, c] : target.entries()) {
    fs::path hp = host_path(p);
    std::error_code ec;
    auto old = disk.get(p);
    if (old && *old == c) continue;
    if (old && old->kind() != c.kind()) {
      fs::remove_all(hp, ec);
      if (ec) return undefined("IoError", hp.string() + ": " + ec.message());
    }
    if (c.is_dir()) {
      fs::create_directories(hp, ec);
      if (ec) return undefined("IoError", hp.string() + ": " + ec.message());
    } else {
      std::ofstream out(hp, std::ios::binary | std::ios::trunc);
      if (!out) return undefined("IoError", "cannot write " + hp.string());
      out << c.text();
    }
  }
  return true;
}

}  // namespace txf
