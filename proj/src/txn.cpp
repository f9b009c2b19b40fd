#include "txforest/txn.hpp"

#include <cstdlib>

namespace txf {

Transaction initial_transaction(const SpecPtr& spec, const Path& path,
                                const CmdPtr& cmd, const FileStoreState& fs,
                                Timestamp start) {
  Thread th{Env{}, fs, path, PathSet{}, Zipper::root(spec), cmd};
  return Transaction{std::move(th), TxState{cmd, start, Log{}}};
}

bool is_initial(const Transaction& t) { return !t.thread.zipper.has_parent(); }

bool is_done(const Transaction& t) { return t.thread.remaining->is_skip(); }

Transaction restart(const FileStoreState& gfs, const Transaction& t,
                    Timestamp fresh) {
  auto [p0, z0] = goto_root(t.thread.path, t.thread.zipper);
  Thread th{Env{}, gfs, p0, PathSet{}, z0, t.state.full};
  return Transaction{std::move(th), TxState{t.state.full, fresh, Log{}}};
}

std::set<Path> extract_paths(const Log& log) { return log_paths(log); }

bool conflict_path(const Path& p, const LogEntry& entry) {
  if (entry.is_read()) return false;
  return p.prefix_related(entry.path);
}

bool check_log(const GlobalLog& glog, Timestamp start, const Log& log) {
  std::set<Path> touched = extract_paths(log);
  for (const auto& p : touched) {
    for (const auto& [ts, entry] : glog) {
      if (ts < start) continue;
      if (conflict_path(p, entry)) return false;
    }
  }
  return true;
}

FileStoreState update_one(const FileStoreState& fs, const LogEntry& e) {
  if (e.is_read()) return fs;
  return close_fs(fs.with(e.path, *e.after));
}

FileStoreState merge(const FileStoreState& fs, const Log& log) {
  FileStoreState out = fs;
  for (const auto& e : log) out = update_one(out, e);
  return out;
}

// ---- local small-step -------------------------------------------------------

namespace {

struct StepOut {
  LocalContext lctx;
  GlobalContext gctx;
  CmdPtr remaining;
  Log log;
};

Result<StepOut> step_once(const Engine& eng, const LocalContext& lctx,
                          const GlobalContext& gctx, const CmdPtr& c) {
  switch (c->kind) {
    case Command::Kind::Skip:
      return undefined("InternalError", "step on a finished command");

    case Command::Kind::Seq: {
      if (c->c1->is_skip()) return StepOut{lctx, gctx, c->c2, Log{}};
      TXF_TRY(r, step_once(eng, lctx, gctx, c->c1));
      return StepOut{std::move(r.lctx), std::move(r.gctx),
                     Command::seq(r.remaining, c->c2), std::move(r.log)};
    }

    case Command::Kind::Assign: {
      TXF_TRY(ev, eng.eval_expr(*c->e, lctx, gctx));
      LocalContext l2{lctx.env.bind(c->var, ev.value), lctx.path, lctx.zipper};
      return StepOut{std::move(l2), gctx, Command::skip(), std::move(ev.log)};
    }

    case Command::Kind::If: {
      TXF_TRY(ev, eng.eval_expr(*c->e, lctx, gctx));
      if (!ev.value.is_bool())
        return undefined("TypeError", "if condition is not a bool");
      return StepOut{lctx, gctx, ev.value.as_bool() ? c->c1 : c->c2,
                     std::move(ev.log)};
    }

    case Command::Kind::While: {
      TXF_TRY(ev, eng.eval_expr(*c->e, lctx, gctx));
      if (!ev.value.is_bool())
        return undefined("TypeError", "while condition is not a bool");
      CmdPtr rest =
          ev.value.as_bool() ? Command::seq(c->c1, c) : Command::skip();
      return StepOut{lctx, gctx, std::move(rest), std::move(ev.log)};
    }

    case Command::Kind::Nav:
    case Command::Kind::StoreFile:
    case Command::Kind::StoreDir:
    case Command::Kind::CreatePath: {
      // Forest commands are atomic steps of the denotational semantics.
      TXF_TRY(r, eng.exec_forest(*c, lctx, gctx));
      return StepOut{std::move(r.lctx), std::move(r.gctx), Command::skip(),
                     std::move(r.log)};
    }
  }
  return undefined("InternalError", "unhandled command");
}

}  // namespace

Result<std::pair<Thread, Log>> step_local(const Engine& eng, const Thread& th) {
  LocalContext lctx{th.env, th.path, th.zipper};
  GlobalContext gctx{th.pathset, th.fs};
  TXF_TRY(r, step_once(eng, lctx, gctx, th.remaining));
  Thread out{r.lctx.env,       std::move(r.gctx.fs), r.lctx.path,
             r.gctx.pathset,   r.lctx.zipper,        r.remaining};
  return std::make_pair(std::move(out), std::move(r.log));
}

const PooledTxn* GlobalState::find(int id) const {
  for (const auto& pt : pool)
    if (pt.id == id) return &pt;
  return nullptr;
}

StepEvent step(const Engine& eng, GlobalState& gs, const Decision& d) {
  size_t idx = gs.pool.size();
  for (size_t i = 0; i < gs.pool.size(); ++i)
    if (gs.pool[i].id == d.txn_id) idx = i;
  if (idx == gs.pool.size())
    return StepEvent{StepEvent::Kind::NoOp, d.txn_id, "no such transaction"};
  PooledTxn& pt = gs.pool[idx];

  if (d.kind == Decision::Kind::LocalStep) {
    if (pt.stuck)
      return StepEvent{StepEvent::Kind::NoOp, d.txn_id,
                       "stuck: " + pt.stuck_reason};
    if (is_done(pt.txn))
      return StepEvent{StepEvent::Kind::NoOp, d.txn_id, "already done"};
    auto r = step_local(eng, pt.txn.thread);
    if (!r.ok()) {
      pt.stuck = true;
      pt.stuck_reason = r.error().to_string();
      return StepEvent{StepEvent::Kind::BecameStuck, d.txn_id, pt.stuck_reason};
    }
    pt.txn.thread = r.value().first;
    append_log(pt.txn.state.log, r.value().second);
    return StepEvent{StepEvent::Kind::LocalStepped, d.txn_id, ""};
  }

  // TryCommit
  if (pt.stuck)
    return StepEvent{StepEvent::Kind::NoOp, d.txn_id,
                     "stuck: " + pt.stuck_reason};
  if (!is_done(pt.txn))
    return StepEvent{StepEvent::Kind::NoOp, d.txn_id,
                     "commit attempted on an unfinished transaction"};
  if (check_log(gs.glog, pt.txn.state.start, pt.txn.state.log)) {
    gs.fs = merge(gs.fs, pt.txn.state.log);
    Timestamp ts = gs.fresh_ts();
    for (const auto& e : pt.txn.state.log)
      gs.glog.push_back(TimestampedEntry{ts, e});
    int id = pt.id;
    gs.pool.erase(gs.pool.begin() + (long)idx);
    return StepEvent{StepEvent::Kind::Committed, id, ""};
  }
  Timestamp fresh = gs.fresh_ts();
  pt.txn = restart(gs.fs, pt.txn, fresh);
  return StepEvent{StepEvent::Kind::Restarted, d.txn_id, ""};
}

// ---- canonize / compat ------------------------------------------------------

namespace {

struct CanonBuilder {
  CanonLog out;
  std::set<Path> reads;
  std::set<Path> writes;

  bool shadowed_by_write(const Path& p) const {
    for (const auto& w : writes)
      if (w.is_prefix_of(p)) return true;
    return false;
  }

  void add_read(std::optional<Contents> c, const Path& p) {
    if (shadowed_by_write(p) || reads.count(p)) return;
    reads.insert(p);
    out.push_back(CanonEntry{CanonEntry::Kind::Read, std::move(c), p});
  }

  void add_write(const Path& p) {
    writes.insert(p);
    out.push_back(CanonEntry{CanonEntry::Kind::PathWrite, std::nullopt, p});
  }

  void necessary(const LogEntry& e) {
    switch (e.kind) {
      case LogEntry::Kind::Read:
        add_read(e.before, e.path);
        break;
      case LogEntry::Kind::WriteFile:
        add_read(e.before, e.path);
        add_write(e.path);
        break;
      case LogEntry::Kind::WriteDir: {
        add_read(e.before, e.path);
        if (e.before && e.before->is_dir()) {
          // Dir-to-dir writes touch exactly the changed children.
          const auto& olds = e.before->children();
          const auto& news = e.after->children();
          for (const auto& s : olds)
            if (!news.count(s)) add_write(e.path / s);
          for (const auto& s : news)
            if (!olds.count(s)) add_write(e.path / s);
        } else {
          add_write(e.path);
        }
        break;
      }
    }
  }
};

}  // namespace

CanonLog canonize(const Log& log) {
  CanonBuilder b;
  for (const auto& e : log) b.necessary(e);
  return b.out;
}

bool compat(const FileStoreState& fs, const Log& log) {
  for (const auto& e : canonize(log)) {
    if (e.kind != CanonEntry::Kind::Read) continue;
    if (fs.get(e.path) != e.contents) return false;
  }
  return true;
}

// ---- GlobalStore / run_txn ---------------------------------------------------

GlobalStore::GlobalStore(FileStoreState initial) : fs_(std::move(initial)) {}

GlobalStore::GlobalStore(std::shared_ptr<StorageAdapter> backing)
    : backing_(std::move(backing)) {
  auto snap = backing_->snapshot();
  fs_ = snap.ok() ? snap.value() : FileStoreState::empty_root();
}

std::pair<FileStoreState, Timestamp> GlobalStore::begin() {
  std::lock_guard<std::mutex> lock(mu_);
  return {fs_, next_ts_++};
}

bool GlobalStore::try_commit(Timestamp start, const Log& log) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!check_log(glog_, start, log)) {
    ++conflicts_;
    return false;
  }
  fs_ = merge(fs_, log);
  Timestamp ts = next_ts_++;
  for (const auto& e : log) glog_.push_back(TimestampedEntry{ts, e});
  ++commits_;
  if (backing_) backing_->apply(writes_only(log));
  return true;
}

FileStoreState GlobalStore::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return fs_;
}

GlobalLog GlobalStore::global_log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return glog_;
}

uint64_t GlobalStore::commit_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return commits_;
}

uint64_t GlobalStore::conflict_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return conflicts_;
}

// ---- TxnCtx ------------------------------------------------------------------

TxnCtx::TxnCtx(Engine eng, const SpecPtr& spec, const Path& path,
               FileStoreState snapshot)
    : eng_(eng),
      lctx_(initial_context(path, spec)),
      gctx_{PathSet{}, std::move(snapshot)} {}

TxnCtx::TxnCtx(Engine eng, LocalContext lctx, GlobalContext gctx)
    : eng_(eng), lctx_(std::move(lctx)), gctx_(std::move(gctx)) {}

Result<bool> TxnCtx::nav(Navigation n) {
  TXF_TRY(r, eng_.exec_nav(n, lctx_, gctx_));
  lctx_ = std::move(r.lctx);
  gctx_ = std::move(r.gctx);
  append_log(log_, r.log);
  return true;
}

Result<Value> TxnCtx::fetch() {
  TXF_TRY(r, eng_.fetch_here(lctx_, gctx_));
  append_log(log_, r.log);
  return r.value;
}

Result<std::string> TxnCtx::fetch_file() {
  TXF_TRY(r, eng_.eval_expr(*Expr::fetch(Expr::Kind::FetchFile), lctx_, gctx_));
  append_log(log_, r.log);
  return r.value.as_string();
}

Result<std::set<std::string>> TxnCtx::fetch_dir() {
  TXF_TRY(r, eng_.eval_expr(*Expr::fetch(Expr::Kind::FetchDir), lctx_, gctx_));
  append_log(log_, r.log);
  return r.value.as_set();
}

Result<bool> TxnCtx::store_file(const std::string& text) {
  return run_command(*Command::store_file(Expr::str(text)));
}

Result<bool> TxnCtx::store_dir(const std::set<std::string>& children) {
  return run_command(*Command::store_dir(Expr::lit_v(Value::set(children))));
}

Result<bool> TxnCtx::create_path() {
  return run_command(*Command::create_path());
}

Result<bool> TxnCtx::run_command(const Command& c) {
  TXF_TRY(r, eng_.exec_cmd(c, lctx_, gctx_));
  lctx_ = std::move(r.lctx);
  gctx_ = std::move(r.gctx);
  append_log(log_, r.log);
  return true;
}

Result<Value> TxnCtx::eval(const Expr& e) {
  TXF_TRY(r, eng_.eval_expr(e, lctx_, gctx_));
  append_log(log_, r.log);
  return r.value;
}

Result<ConsistencyResult> TxnCtx::verify() {
  auto [rp, rz] = goto_root(lctx_.path, lctx_.zipper);
  TXF_TRY(pc, pconsistent(eng_, gctx_.pathset, gctx_.fs, rp, rz));
  append_log(log_, pc.log);
  return pc;
}

Result<bool> TxnCtx::goto_label(const std::string& name) {
  TXF_TRY(r, eng_.goto_label(name, lctx_, gctx_));
  lctx_ = std::move(r.lctx);
  gctx_ = std::move(r.gctx);
  append_log(log_, r.log);
  return true;
}

Result<bool> TxnCtx::goto_name(const std::string& name) {
  TXF_TRY(r, eng_.goto_name(name, lctx_, gctx_));
  lctx_ = std::move(r.lctx);
  gctx_ = std::move(r.gctx);
  append_log(log_, r.log);
  return true;
}

Result<Value> TxnCtx::fold_comp(Value init, const Visitor& f) {
  auto visit = [&](const LocalContext& child, const GlobalContext& g,
                   const Value& acc) -> Result<Engine::VisitOut> {
    TxnCtx sub(eng_, child, g);
    TXF_TRY(v, f(sub, acc));
    return Engine::VisitOut{sub.gctx_, sub.log_, std::move(v)};
  };
  TXF_TRY(out, eng_.fold_comp(lctx_, gctx_, std::move(init), visit));
  gctx_ = std::move(out.gctx);
  append_log(log_, out.log);
  return out.acc;
}

Result<bool> TxnCtx::map_comp(const Visitor& f) {
  TXF_TRY(v, fold_comp(Value::boolean(true), f));
  (void)v;
  return true;
}

// ---- run_txn / loop_txn -------------------------------------------------------

TxOutcome run_txn(GlobalStore& store, const Engine& eng, const SpecPtr& spec,
                  const Path& path, const TxBody& f) {
  auto [snapshot, start] = store.begin();
  TxnCtx ctx(eng, spec, path, std::move(snapshot));
  auto r = f(ctx);
  if (!r.ok()) return TxOutcome::op_error(r.error().to_string());
  if (!store.try_commit(start, ctx.log())) return TxOutcome::conflict();
  return TxOutcome::success(r.value());
}

int loop_txn_default_retries() {
  if (const char* env = std::getenv("TXF_MAX_RETRIES")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 64;
}

TxOutcome loop_txn(GlobalStore& store, const Engine& eng, const SpecPtr& spec,
                   const Path& path, const TxBody& f, int max_retries) {
  int bound = max_retries > 0 ? max_retries : loop_txn_default_retries();
  for (int i = 0; i < bound; ++i) {
    TxOutcome out = run_txn(store, eng, spec, path, f);
    if (out.status != TxOutcome::Status::Conflict) return out;
  }
  return TxOutcome::exhausted(bound);
}

}  // namespace txf
