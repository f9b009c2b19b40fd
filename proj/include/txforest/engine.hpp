#pragma once

#include <cstdint>
#include <functional>
#include <set>

#include "txforest/filestore.hpp"
#include "txforest/log.hpp"
#include "txforest/result.hpp"
#include "txforest/spec.hpp"
#include "txforest/value.hpp"
#include "txforest/zipper.hpp"

namespace txf {

using PathSet = std::set<Path>;

// The traversed-path set plus the filesystem a computation runs against.
struct GlobalContext {
  PathSet pathset;
  FileStoreState fs;
};

struct ValueLog {
  Value value;
  Log log;
};

// Result of a command step: new navigation state, new global context, and
// the filesystem interactions performed, in order.
struct NavOut {
  LocalContext lctx;
  GlobalContext gctx;
  Log log;
};

// Interpreter for commands and expressions. The semantics is partial:
// outcomes are Result values carrying a named diagnostic when no rule
// applies. Instances are cheap and stateless apart from configuration;
// all evaluation state is confined to the caller.
class Engine {
 public:
  explicit Engine(const SpecTable* table, uint64_t while_fuel = 1'000'000)
      : table_(table), while_fuel_(while_fuel) {}

  const SpecTable* table() const { return table_; }
  uint64_t while_fuel() const { return while_fuel_; }

  // Chases Ref specs through the declaration table and materializes the
  // resolved spec in the focus node (lazy unfolding happens here).
  Result<Zipper> resolve_focus(const Zipper& z) const;
  Result<SpecPtr> resolve(const SpecPtr& s) const;

  // Expression evaluation in the context environment (program expressions).
  Result<ValueLog> eval_expr(const Expr& e, const LocalContext& lctx,
                             const GlobalContext& gctx) const;
  // Evaluation of a spec-embedded expression: runs in the focus node's
  // environment, where pair/comprehension binders live.
  Result<ValueLog> eval_spec_expr(const Expr& e, const LocalContext& lctx,
                                  const GlobalContext& gctx) const;

  Result<NavOut> exec_nav(Navigation n, const LocalContext& lctx,
                          const GlobalContext& gctx) const;
  Result<NavOut> exec_update(const Command& u, const LocalContext& lctx,
                             const GlobalContext& gctx) const;
  Result<NavOut> exec_forest(const Command& c, const LocalContext& lctx,
                             const GlobalContext& gctx) const;
  Result<NavOut> exec_cmd(const Command& c, const LocalContext& lctx,
                          const GlobalContext& gctx) const;

  // Program denotation: fresh zipper over `spec`, empty environment and
  // path set, then the command; projects the resulting filesystem.
  Result<FileStoreState> run_program(const Path& p, const SpecPtr& spec,
                                     const Command& c,
                                     const FileStoreState& fs) const;

  // Fetch dispatched on the focus kind (file/dir/path/comp/opt/pred).
  Result<ValueLog> fetch_here(const LocalContext& lctx,
                              const GlobalContext& gctx) const;

  // Navigation helpers in the style of the library API: goto_label walks
  // pair labels and comprehension element names without descending a final
  // Path focus; goto_name descends it.
  Result<NavOut> goto_label(const std::string& name, const LocalContext& lctx,
                            const GlobalContext& gctx) const;
  Result<NavOut> goto_name(const std::string& name, const LocalContext& lctx,
                           const GlobalContext& gctx) const;

  struct VisitOut {
    GlobalContext gctx;
    Log log;
    Value acc;
  };
  using CompVisitor = std::function<Result<VisitOut>(
      const LocalContext& child, const GlobalContext& gctx, const Value& acc)>;

  // Visits comprehension children left-to-right, threading an accumulator,
  // the global context, and the log. An empty comprehension is a no-op (the
  // element list is consulted first). The caller's focus is unchanged.
  Result<VisitOut> fold_comp(const LocalContext& lctx,
                             const GlobalContext& gctx, Value init,
                             const CompVisitor& f) const;
  Result<VisitOut> map_comp(const LocalContext& lctx,
                            const GlobalContext& gctx,
                            const CompVisitor& f) const;

 private:
  const SpecTable* table_;
  uint64_t while_fuel_;
};

// Initial local context of a program: empty environment, the given path, a
// fresh root zipper over the spec.
inline LocalContext initial_context(const Path& p, const SpecPtr& spec) {
  return LocalContext{Env{}, p, Zipper::root(spec)};
}

}  // namespace txf
