#pragma once

#include <memory>
#include <string>

#include "txforest/filestore.hpp"

namespace txf {

// Bridge between the filestore model and a backing store. Implementations
// must produce well-formed snapshots; applying a write-only log is
// idempotent with respect to each entry's final value.
class StorageAdapter {
 public:
  virtual ~StorageAdapter() = default;

  virtual std::optional<Contents> read(const Path& p) = 0;
  virtual Result<bool> apply(const Log& log) = 0;
  virtual Result<FileStoreState> snapshot() = 0;
};

class MemoryStorage : public StorageAdapter {
 public:
  MemoryStorage() : fs_(FileStoreState::empty_root()) {}
  explicit MemoryStorage(FileStoreState fs) : fs_(std::move(fs)) {}

  std::optional<Contents> read(const Path& p) override { return fs_.get(p); }
  Result<bool> apply(const Log& log) override;
  Result<FileStoreState> snapshot() override { return fs_; }

 private:
  FileStoreState fs_;
};

// Maps the model onto a POSIX directory: Dir <-> directory, File <-> regular
// file. Symlinks and special files are structural errors. Writes are applied
// by merging the log into the on-disk snapshot and materializing the diff.
class PosixStorage : public StorageAdapter {
 public:
  explicit PosixStorage(std::string root_dir) : root_(std::move(root_dir)) {}

  std::optional<Contents> read(const Path& p) override;
  Result<bool> apply(const Log& log) override;
  Result<FileStoreState> snapshot() override;

 private:
  std::string host_path(const Path& p) const;
  std::string root_;
};

}  // namespace txf
