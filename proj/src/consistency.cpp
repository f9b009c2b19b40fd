#include "txforest/consistency.hpp"

#include <algorithm>

namespace txf {

namespace {

struct PCRes {
  bool consistent;
  bool total;
  Log log;
};

// The conjunction table: a false left operand short-circuits to
// {false,false} and discards the right operand (callers skip computing it).
PCRes and_combine(PCRes a, PCRes b) {
  PCRes out{a.consistent && b.consistent, a.total && b.total, std::move(a.log)};
  append_log(out.log, b.log);
  return out;
}

PCRes or_combine(PCRes a, PCRes b) {
  PCRes out{a.consistent || b.consistent, a.total || b.total, std::move(a.log)};
  append_log(out.log, b.log);
  return out;
}

struct Checker {
  const Engine& eng;
  const FileStoreState& fs;
  const PathSet* guard;  // null: full consistency (no path-set condition)
  PathSet* collect;      // non-null: record every visited path (cover_set)
  uint64_t fuel;
  ConsistencyFailure* fail;
  bool fail_set = false;

  void note_fail(const Path& p, std::string expected, std::string found) {
    if (fail && !fail_set) {
      *fail = ConsistencyFailure{p, std::move(expected), std::move(found)};
      fail_set = true;
    }
  }

  std::string found_at(const Path& p) const {
    auto c = fs.get(p);
    return c ? c->to_string() : "absent";
  }

  Result<PCRes> check(const Path& p, const Zipper& z) {
    if (fuel == 0)
      return undefined("FuelExhausted", "consistency traversal too deep");
    --fuel;
    if (collect) collect->insert(p);
    if (guard && guard->count(p) == 0) return PCRes{true, false, {}};

    TXF_TRY(zr, eng.resolve_focus(z));
    const Spec& sp = *zr.current().spec;
    const Env& env = zr.current().env;
    GlobalContext gctx{guard ? *guard : PathSet{}, fs};
    LocalContext node_ctx{env, p, zr};

    switch (sp.kind) {
      case Spec::Kind::File: {
        auto c = fs.get(p);
        bool ok = c && c->is_file();
        if (!ok) note_fail(p, "a file", found_at(p));
        return PCRes{ok, true, {read_entry(c, p)}};
      }

      case Spec::Kind::Dir: {
        auto c = fs.get(p);
        bool ok = c && c->is_dir();
        if (!ok) note_fail(p, "a directory", found_at(p));
        return PCRes{ok, true, {read_entry(c, p)}};
      }

      case Spec::Kind::Path: {
        TXF_TRY(ev, eng.eval_expr(*sp.expr, node_ctx, gctx));
        if (!ev.value.is_string())
          return undefined("TypeError", "path expression is not a string");
        const std::string& u = ev.value.as_string();
        if (!Path::valid_component(u))
          return undefined("BadPathComponent", u);
        auto c = fs.get(p);
        PCRes first{c.has_value() && c->is_dir(), true, std::move(ev.log)};
        first.log.push_back(read_entry(c, p));
        if (!first.consistent) {
          note_fail(p, "a directory (path step)", found_at(p));
          return PCRes{false, false, std::move(first.log)};
        }
        Zipper child = zr.push_child(ZNode{env, sp.s1});
        TXF_TRY(rest, check(p / u, child));
        return and_combine(std::move(first), std::move(rest));
      }

      case Spec::Kind::Pair: {
        auto first_ctx = std::make_shared<LocalContext>(LocalContext{
            env, p, Zipper::root_node(ZNode{env, sp.s1})});
        Env bound = env.bind(sp.var, Value::ctx(first_ctx));
        Zipper z1 = zr.push_child(ZNode{env, sp.s1}, {ZNode{bound, sp.s2}});
        TXF_TRY(r1, check(p, z1));
        if (!r1.consistent) return PCRes{false, false, std::move(r1.log)};
        auto z2 = z1.shift_right();
        TXF_TRY(r2, check(p, *z2));
        return and_combine(std::move(r1), std::move(r2));
      }

      case Spec::Kind::Comp: {
        TXF_TRY(ev, eng.eval_expr(*sp.expr, node_ctx, gctx));
        if (!ev.value.is_list() && !ev.value.is_set())
          return undefined("TypeError", "comprehension source is not a collection");
        PCRes acc{true, true, {}};
        for (const auto& v : ev.value.as_ordered_elems()) {
          Zipper child =
              zr.push_child(ZNode{env.bind(sp.var, Value::str(v)), sp.s1});
          TXF_TRY(r, check(p, child));
          acc = and_combine(std::move(acc), std::move(r));
          if (!acc.consistent) {
            acc.total = false;
            break;
          }
        }
        PCRes out{acc.consistent, acc.total, std::move(ev.log)};
        append_log(out.log, acc.log);
        return out;
      }

      case Spec::Kind::Opt: {
        auto c = fs.get(p);
        PCRes absent{!c.has_value(), true, {read_entry(c, p)}};
        if (absent.consistent && absent.total) return absent;
        Zipper child = zr.push_child(ZNode{env, sp.s1});
        TXF_TRY(r, check(p, child));
        return or_combine(std::move(absent), std::move(r));
      }

      case Spec::Kind::Pred: {
        TXF_TRY(ev, eng.eval_expr(*sp.expr, node_ctx, gctx));
        if (!ev.value.is_bool())
          return undefined("TypeError", "predicate is not a bool");
        bool b = ev.value.as_bool();
        if (!b) note_fail(p, "predicate to hold", "false");
        return PCRes{b, true, std::move(ev.log)};
      }

      case Spec::Kind::Ref:
        return undefined("InternalError", "unresolved ref after resolve_focus");
    }
    return undefined("InternalError", "unhandled spec kind");
  }
};

uint64_t default_fuel(const FileStoreState& fs, const Zipper& z) {
  uint64_t n = (fs.size() + 1) * (spec_size(*z.current().spec) + 1) * 4;
  return std::max<uint64_t>(n, 4096);
}

}  // namespace

Result<ConsistencyResult> pconsistent(const Engine& eng, const PathSet& pathset,
                                      const FileStoreState& fs, const Path& p,
                                      const Zipper& z,
                                      ConsistencyFailure* failure) {
  Checker ck{eng, fs, &pathset, nullptr, default_fuel(fs, z), failure};
  TXF_TRY(r, ck.check(p, z));
  return ConsistencyResult{r.consistent, r.total, std::move(r.log)};
}

Result<bool> consistent(const Engine& eng, const FileStoreState& fs,
                        const Path& p, const Zipper& z,
                        ConsistencyFailure* failure) {
  Checker ck{eng, fs, nullptr, nullptr, default_fuel(fs, z), failure};
  TXF_TRY(r, ck.check(p, z));
  return r.consistent;
}

Result<bool> cover(const Engine& eng, const Path& p, const Zipper& z,
                   const PathSet& pathset, const FileStoreState& fs) {
  TXF_TRY(r, pconsistent(eng, pathset, fs, p, z));
  return r.total;
}

Result<PathSet> cover_set(const Engine& eng, const Path& p, const Zipper& z,
                          const FileStoreState& fs, uint64_t fuel) {
  PathSet out;
  Checker ck{eng,     fs, nullptr, &out, fuel ? fuel : default_fuel(fs, z),
             nullptr};
  TXF_TRY(r, ck.check(p, z));
  (void)r;
  return out;
}

}  // namespace txf
