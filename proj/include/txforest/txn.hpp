#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "txforest/consistency.hpp"
#include "txforest/engine.hpp"
#include "txforest/storage.hpp"

namespace txf {

using Timestamp = uint64_t;

struct TimestampedEntry {
  Timestamp ts;
  LogEntry entry;
};
using GlobalLog = std::vector<TimestampedEntry>;

// One transaction's running thread: its private snapshot, navigation state,
// traversed path set and the remaining command.
struct Thread {
  Env env;
  FileStoreState fs;
  Path path;
  PathSet pathset;
  Zipper zipper;
  CmdPtr remaining;
};

struct TxState {
  CmdPtr full;  // the command the transaction re-runs on restart
  Timestamp start;
  Log log;
};

struct Transaction {
  Thread thread;
  TxState state;
};

Transaction initial_transaction(const SpecPtr& spec, const Path& path,
                                const CmdPtr& cmd, const FileStoreState& fs,
                                Timestamp start);

// The appendix `initial` predicate: the zipper is a bare root.
bool is_initial(const Transaction& t);
bool is_done(const Transaction& t);

// Resets a transaction against the current global filesystem: fresh
// navigation state via goto_root, empty log and path set, the full command.
Transaction restart(const FileStoreState& gfs, const Transaction& t,
                    Timestamp fresh);

// ---- conflict detection and merge -----------------------------------------

std::set<Path> extract_paths(const Log& log);

// Reads never conflict; a write at p conflicts with p' iff the two paths are
// prefix-related (either is an ancestor-or-equal of the other).
bool conflict_path(const Path& p, const LogEntry& entry);

// True iff no global entry at or after `start` conflicts with any path the
// transaction touched.
bool check_log(const GlobalLog& glog, Timestamp start, const Log& log);

FileStoreState update_one(const FileStoreState& fs, const LogEntry& e);
FileStoreState merge(const FileStoreState& fs, const Log& log);

// ---- operational global semantics (driven by the harness) -----------------

struct PooledTxn {
  int id;
  Transaction txn;
  bool stuck = false;
  std::string stuck_reason;
};

struct GlobalState {
  FileStoreState fs;
  GlobalLog glog;
  std::vector<PooledTxn> pool;
  Timestamp next_ts = 1;

  Timestamp fresh_ts() { return next_ts++; }
  const PooledTxn* find(int id) const;
};

struct Decision {
  enum class Kind { LocalStep, TryCommit };
  int txn_id;
  Kind kind;
};

struct StepEvent {
  enum class Kind { LocalStepped, Committed, Restarted, BecameStuck, NoOp };
  Kind kind;
  int txn_id;
  std::string note;
};

// One small step of the local semantics. IMP commands step conventionally;
// a Forest command runs denotationally as a single atomic step.
Result<std::pair<Thread, Log>> step_local(const Engine& eng, const Thread& th);

// One step of the global operational semantics, as picked by the scheduler:
// a local step, or a commit attempt that merges on success and restarts the
// transaction on conflict. Commit on an unfinished transaction is a no-op
// with a diagnostic.
StepEvent step(const Engine& eng, GlobalState& gs, const Decision& d);

// ---- log canonization (test oracle) ----------------------------------------

struct CanonEntry {
  enum class Kind { Read, PathWrite };
  Kind kind;
  std::optional<Contents> contents;  // Read only
  Path path;

  friend bool operator==(const CanonEntry&, const CanonEntry&) = default;
};
using CanonLog = std::vector<CanonEntry>;

// Keeps the first read per path unless shadowed by an earlier write to a
// prefix; rewrites writes to path-write markers, expanding dir-to-dir writes
// into their changed children.
CanonLog canonize(const Log& log);

// Every read retained by canonize matches fs.
bool compat(const FileStoreState& fs, const Log& log);

// ---- runtime store for concurrent host-function transactions ---------------

// The shared global state behind run_txn/loop_txn and the shell sessions.
// Snapshots are immutable copies; validation, merge and the global-log
// append happen under one mutex, so there is a single committer at a time.
class GlobalStore {
 public:
  explicit GlobalStore(FileStoreState initial);
  // Snapshots the adapter at construction and applies committed writes back.
  explicit GlobalStore(std::shared_ptr<StorageAdapter> backing);

  std::pair<FileStoreState, Timestamp> begin();
  bool try_commit(Timestamp start, const Log& log);

  FileStoreState snapshot() const;
  GlobalLog global_log() const;
  uint64_t commit_count() const;
  uint64_t conflict_count() const;

 private:
  mutable std::mutex mu_;
  FileStoreState fs_;
  GlobalLog glog_;
  Timestamp next_ts_ = 1;
  std::shared_ptr<StorageAdapter> backing_;
  uint64_t commits_ = 0;
  uint64_t conflicts_ = 0;
};

// A live transaction handle: local contexts plus the accumulated log. The
// §2 zipper programs are host functions driving one of these.
class TxnCtx {
 public:
  TxnCtx(Engine eng, const SpecPtr& spec, const Path& path,
         FileStoreState snapshot);

  Result<bool> nav(Navigation n);
  Result<bool> down() { return nav(Navigation::Down); }
  Result<bool> up() { return nav(Navigation::Up); }
  Result<bool> out() { return nav(Navigation::Out); }
  Result<bool> next() { return nav(Navigation::Next); }
  Result<bool> prev() { return nav(Navigation::Prev); }
  Result<bool> into_pair() { return nav(Navigation::IntoPair); }
  Result<bool> into_comp() { return nav(Navigation::IntoComp); }
  Result<bool> into_opt() { return nav(Navigation::IntoOpt); }

  Result<Value> fetch();
  Result<std::string> fetch_file();
  Result<std::set<std::string>> fetch_dir();

  Result<bool> store_file(const std::string& text);
  Result<bool> store_dir(const std::set<std::string>& children);
  Result<bool> create_path();

  Result<bool> run_command(const Command& c);
  Result<Value> eval(const Expr& e);

  Result<ConsistencyResult> verify();

  Result<bool> goto_label(const std::string& name);
  Result<bool> goto_name(const std::string& name);

  using Visitor = std::function<Result<Value>(TxnCtx& child, const Value& acc)>;
  Result<Value> fold_comp(Value init, const Visitor& f);
  Result<bool> map_comp(const Visitor& f);

  // Marks a path as already traversed. The program denotation starts from an
  // empty path set; interactive sessions seed their start path so a completed
  // traversal verifies as total.
  void seed_pathset(const Path& p) { gctx_.pathset.insert(p); }

  const Engine& engine() const { return eng_; }
  const LocalContext& lctx() const { return lctx_; }
  const GlobalContext& gctx() const { return gctx_; }
  const Log& log() const { return log_; }
  const FileStoreState& fs() const { return gctx_.fs; }

 private:
  TxnCtx(Engine eng, LocalContext lctx, GlobalContext gctx);

  Engine eng_;
  LocalContext lctx_;
  GlobalContext gctx_;
  Log log_;
};

// Result of a transaction attempt, mirroring the txError channel: conflicts
// are retryable, operational errors are not.
struct TxOutcome {
  enum class Status { Ok, Conflict, OpError, RetriesExhausted };
  Status status;
  Value value;
  std::string message;

  bool ok() const { return status == Status::Ok; }

  static TxOutcome success(Value v) {
    return TxOutcome{Status::Ok, std::move(v), ""};
  }
  static TxOutcome conflict() {
    return TxOutcome{Status::Conflict, Value{}, "transaction conflict"};
  }
  static TxOutcome op_error(std::string msg) {
    return TxOutcome{Status::OpError, Value{}, std::move(msg)};
  }
  static TxOutcome exhausted(int tries) {
    return TxOutcome{Status::RetriesExhausted, Value{},
                     "no conflict-free run in " + std::to_string(tries) +
                         " attempts"};
  }
};

using TxBody = std::function<Result<Value>(TxnCtx&)>;

// One attempt: snapshot, run the body, commit. An undefined outcome inside
// the body surfaces as OpError without attempting to commit; a commit-time
// conflict surfaces as Conflict.
TxOutcome run_txn(GlobalStore& store, const Engine& eng, const SpecPtr& spec,
                  const Path& path, const TxBody& f);

// Retries conflicts until success, an OpError, or the retry bound
// (TXF_MAX_RETRIES, default 64) is exhausted.
TxOutcome loop_txn(GlobalStore& store, const Engine& eng, const SpecPtr& spec,
                   const Path& path, const TxBody& f, int max_retries = -1);

int loop_txn_default_retries();

}  // namespace txf
