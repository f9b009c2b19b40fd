#include "txforest/engine.hpp"

#include <regex>

#include "txforest/consistency.hpp"

namespace txf {

namespace {

const char* spec_kind_name(Spec::Kind k) {
  switch (k) {
    case Spec::Kind::File: return "file";
    case Spec::Kind::Dir: return "dir";
    case Spec::Kind::Path: return "path";
    case Spec::Kind::Pair: return "pair";
    case Spec::Kind::Comp: return "comp";
    case Spec::Kind::Opt: return "opt";
    case Spec::Kind::Pred: return "pred";
    case Spec::Kind::Ref: return "ref";
  }
  return "?";
}

Result<std::string> want_string(const Value& v, const std::string& who) {
  if (!v.is_string())
    return undefined("TypeError", who + " expects a string, got " +
                                      Value::kind_name(v.kind()));
  return v.as_string();
}

Result<bool> want_bool(const Value& v, const std::string& who) {
  if (!v.is_bool())
    return undefined("TypeError", who + " expects a bool, got " +
                                      Value::kind_name(v.kind()));
  return v.as_bool();
}

Result<int64_t> want_int(const Value& v, const std::string& who) {
  if (!v.is_int())
    return undefined("TypeError", who + " expects an int, got " +
                                      Value::kind_name(v.kind()));
  return v.as_int();
}

Result<std::vector<std::string>> want_elems(const Value& v,
                                            const std::string& who) {
  if (!v.is_list() && !v.is_set())
    return undefined("TypeError", who + " expects a string collection, got " +
                                      Value::kind_name(v.kind()));
  return v.as_ordered_elems();
}

Result<std::regex> compile_regex(const std::string& pattern) {
  try {
    return std::regex(pattern);
  } catch (const std::regex_error&) {
    return undefined("BadRegex", pattern);
  }
}

Result<Value> apply_builtin(const std::string& name,
                            const std::vector<Value>& args) {
  auto arity = [&](size_t n) -> std::optional<Undefined> {
    if (args.size() != n)
      return undefined("TypeError", name + " expects " + std::to_string(n) +
                                        " argument(s)");
    return std::nullopt;
  };

  if (name == "lines_of") {
    if (auto e = arity(1)) return *e;
    TXF_TRY(s, want_string(args[0], name));
    std::vector<std::string> lines;
    std::string cur;
    for (char c : s + "\n") {
      if (c == '\n') {
        if (!cur.empty()) lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    return Value::list(std::move(lines));
  }
  if (name == "filter") {
    if (auto e = arity(2)) return *e;
    TXF_TRY(elems, want_elems(args[0], name));
    TXF_TRY(pat, want_string(args[1], name));
    TXF_TRY(re, compile_regex(pat));
    if (args[0].is_set()) {
      std::set<std::string> kept;
      for (const auto& s : elems)
        if (std::regex_match(s, re)) kept.insert(s);
      return Value::set(std::move(kept));
    }
    std::vector<std::string> kept;
    for (const auto& s : elems)
      if (std::regex_match(s, re)) kept.push_back(s);
    return Value::list(std::move(kept));
  }
  if (name == "matches") {
    if (auto e = arity(2)) return *e;
    TXF_TRY(s, want_string(args[0], name));
    TXF_TRY(pat, want_string(args[1], name));
    TXF_TRY(re, compile_regex(pat));
    return Value::boolean(std::regex_match(s, re));
  }
  if (name == "size") {
    if (auto e = arity(1)) return *e;
    TXF_TRY(elems, want_elems(args[0], name));
    return Value::integer((int64_t)elems.size());
  }
  if (name == "contains") {
    if (auto e = arity(2)) return *e;
    TXF_TRY(elems, want_elems(args[0], name));
    TXF_TRY(s, want_string(args[1], name));
    for (const auto& x : elems)
      if (x == s) return Value::boolean(true);
    return Value::boolean(false);
  }
  if (name == "add" || name == "remove") {
    if (auto e = arity(2)) return *e;
    TXF_TRY(s, want_string(args[1], name));
    if (args[0].is_set()) {
      std::set<std::string> out = args[0].as_set();
      if (name == "add") out.insert(s);
      else out.erase(s);
      return Value::set(std::move(out));
    }
    TXF_TRY(elems, want_elems(args[0], name));
    std::vector<std::string> out;
    for (const auto& x : elems)
      if (name == "add" || x != s) out.push_back(x);
    if (name == "add") out.push_back(s);
    return Value::list(std::move(out));
  }
  if (name == "union" || name == "diff") {
    if (auto e = arity(2)) return *e;
    if (args[0].is_set() && args[1].is_set()) {
      std::set<std::string> out = args[0].as_set();
      if (name == "union") {
        out.insert(args[1].as_set().begin(), args[1].as_set().end());
      } else {
        for (const auto& s : args[1].as_set()) out.erase(s);
      }
      return Value::set(std::move(out));
    }
    if (args[0].is_list() && args[1].is_list() && name == "union") {
      std::vector<std::string> out = args[0].as_list();
      out.insert(out.end(), args[1].as_list().begin(), args[1].as_list().end());
      return Value::list(std::move(out));
    }
    return undefined("TypeError", name + " expects two sets");
  }
  if (name == "head") {
    if (auto e = arity(1)) return *e;
    TXF_TRY(elems, want_elems(args[0], name));
    if (elems.empty()) return undefined("EmptyCollection", "head of empty");
    return Value::str(elems.front());
  }
  if (name == "nth") {
    if (auto e = arity(2)) return *e;
    TXF_TRY(elems, want_elems(args[0], name));
    TXF_TRY(i, want_int(args[1], name));
    if (i < 0 || (size_t)i >= elems.size())
      return undefined("IndexOutOfRange",
                       std::to_string(i) + " of " + std::to_string(elems.size()));
    return Value::str(elems[(size_t)i]);
  }
  if (name == "to_int") {
    if (auto e = arity(1)) return *e;
    TXF_TRY(s, want_string(args[0], name));
    size_t pos = 0;
    int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (...) {
      return undefined("BadInt", "\"" + s + "\"");
    }
    if (pos != s.size()) return undefined("BadInt", "\"" + s + "\"");
    return Value::integer(v);
  }
  if (name == "to_str") {
    if (auto e = arity(1)) return *e;
    TXF_TRY(i, want_int(args[0], name));
    return Value::str(std::to_string(i));
  }
  if (name == "not") {
    if (auto e = arity(1)) return *e;
    TXF_TRY(b, want_bool(args[0], name));
    return Value::boolean(!b);
  }
  if (name == "and" || name == "or") {
    if (auto e = arity(2)) return *e;
    TXF_TRY(a, want_bool(args[0], name));
    TXF_TRY(b, want_bool(args[1], name));
    return Value::boolean(name == "and" ? (a && b) : (a || b));
  }
  if (name == "+" || name == "-" || name == "*" || name == "/" || name == "%") {
    if (auto e = arity(2)) return *e;
    if (name == "+" && args[0].is_string() && args[1].is_string())
      return Value::str(args[0].as_string() + args[1].as_string());
    TXF_TRY(a, want_int(args[0], name));
    TXF_TRY(b, want_int(args[1], name));
    if ((name == "/" || name == "%") && b == 0)
      return undefined("DivByZero", "");
    if (name == "+") return Value::integer(a + b);
    if (name == "-") return Value::integer(a - b);
    if (name == "*") return Value::integer(a * b);
    if (name == "/") return Value::integer(a / b);
    return Value::integer(a % b);
  }
  if (name == "=" || name == "!=") {
    if (auto e = arity(2)) return *e;
    if (args[0].kind() != args[1].kind())
      return undefined("TypeError", "comparing values of different kinds");
    bool eq = args[0] == args[1];
    return Value::boolean(name == "=" ? eq : !eq);
  }
  if (name == "<" || name == "<=" || name == ">" || name == ">=") {
    if (auto e = arity(2)) return *e;
    int c;
    if (args[0].is_int() && args[1].is_int()) {
      int64_t a = args[0].as_int(), b = args[1].as_int();
      c = a < b ? -1 : a > b ? 1 : 0;
    } else if (args[0].is_string() && args[1].is_string()) {
      c = args[0].as_string().compare(args[1].as_string());
      c = c < 0 ? -1 : c > 0 ? 1 : 0;
    } else {
      return undefined("TypeError", name + " expects two ints or two strings");
    }
    if (name == "<") return Value::boolean(c < 0);
    if (name == "<=") return Value::boolean(c <= 0);
    if (name == ">") return Value::boolean(c > 0);
    return Value::boolean(c >= 0);
  }
  return undefined("UnknownBuiltin", name);
}

}  // namespace

Result<SpecPtr> Engine::resolve(const SpecPtr& s) const {
  SpecPtr cur = s;
  size_t steps = table_ ? table_->size() + 1 : 1;
  while (cur->kind == Spec::Kind::Ref) {
    if (steps-- == 0) return undefined("RefCycle", cur->var);
    if (!table_) return undefined("UnknownSpecName", cur->var);
    auto it = table_->find(cur->var);
    if (it == table_->end()) return undefined("UnknownSpecName", cur->var);
    cur = it->second;
  }
  return cur;
}

Result<Zipper> Engine::resolve_focus(const Zipper& z) const {
  if (z.current().spec->kind != Spec::Kind::Ref) return z;
  TXF_TRY(resolved, resolve(z.current().spec));
  return z.with_current(ZNode{z.current().env, resolved});
}

Result<ValueLog> Engine::eval_spec_expr(const Expr& e, const LocalContext& lctx,
                                        const GlobalContext& gctx) const {
  LocalContext node_ctx{lctx.zipper.current().env, lctx.path, lctx.zipper};
  return eval_expr(e, node_ctx, gctx);
}

Result<ValueLog> Engine::eval_expr(const Expr& e, const LocalContext& lctx,
                                   const GlobalContext& gctx) const {
  switch (e.kind) {
    case Expr::Kind::Lit:
      return ValueLog{e.lit, {}};

    case Expr::Kind::Var: {
      const Value* v = lctx.env.lookup(e.name);
      if (!v) return undefined("UnboundVariable", e.name);
      return ValueLog{*v, {}};
    }

    case Expr::Kind::Call: {
      std::vector<Value> vals;
      Log log;
      for (const auto& a : e.args) {
        TXF_TRY(r, eval_expr(*a, lctx, gctx));
        vals.push_back(std::move(r.value));
        append_log(log, r.log);
      }
      TXF_TRY(v, apply_builtin(e.name, vals));
      return ValueLog{std::move(v), std::move(log)};
    }

    case Expr::Kind::FetchFile: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::File)
        return undefined("NotAFileFocus",
                         std::string("fetch_file at ") +
                             spec_kind_name(zr.current().spec->kind));
      auto c = gctx.fs.get(lctx.path);
      if (!c) return undefined("MissingPath", lctx.path.to_string());
      if (!c->is_file())
        return undefined("FsKindMismatch",
                         lctx.path.to_string() + " is a directory");
      return ValueLog{Value::str(c->text()), {read_entry(*c, lctx.path)}};
    }

    case Expr::Kind::FetchDir: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::Dir)
        return undefined("NotADirFocus",
                         std::string("fetch_dir at ") +
                             spec_kind_name(zr.current().spec->kind));
      auto c = gctx.fs.get(lctx.path);
      if (!c) return undefined("MissingPath", lctx.path.to_string());
      if (!c->is_dir())
        return undefined("FsKindMismatch", lctx.path.to_string() + " is a file");
      return ValueLog{Value::set(c->children()), {read_entry(*c, lctx.path)}};
    }

    case Expr::Kind::FetchPath: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::Path)
        return undefined("NotAPathFocus",
                         std::string("fetch_path at ") +
                             spec_kind_name(zr.current().spec->kind));
      LocalContext ctx{zr.current().env, lctx.path, zr};
      TXF_TRY(r, eval_expr(*zr.current().spec->expr, ctx, gctx));
      TXF_TRY(s, want_string(r.value, "fetch_path"));
      return ValueLog{Value::str(s), std::move(r.log)};
    }

    case Expr::Kind::FetchComp: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::Comp)
        return undefined("NotACompFocus",
                         std::string("fetch_comp at ") +
                             spec_kind_name(zr.current().spec->kind));
      LocalContext ctx{zr.current().env, lctx.path, zr};
      TXF_TRY(r, eval_expr(*zr.current().spec->expr, ctx, gctx));
      if (!r.value.is_list() && !r.value.is_set())
        return undefined("TypeError", "comprehension source is not a collection");
      return r;
    }

    case Expr::Kind::FetchOpt: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::Opt)
        return undefined("NotAnOptFocus",
                         std::string("fetch_opt at ") +
                             spec_kind_name(zr.current().spec->kind));
      auto c = gctx.fs.get(lctx.path);
      return ValueLog{Value::boolean(c.has_value()),
                      {read_entry(c, lctx.path)}};
    }

    case Expr::Kind::FetchPred: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::Pred)
        return undefined("NotAPredFocus",
                         std::string("fetch_pred at ") +
                             spec_kind_name(zr.current().spec->kind));
      LocalContext ctx{zr.current().env, lctx.path, zr};
      TXF_TRY(r, eval_expr(*zr.current().spec->expr, ctx, gctx));
      TXF_TRY(b, want_bool(r.value, "fetch_pred"));
      return ValueLog{Value::boolean(b), std::move(r.log)};
    }

    case Expr::Kind::RunNav: {
      TXF_TRY(c, eval_expr(*e.args[0], lctx, gctx));
      if (!c.value.is_ctx())
        return undefined("TypeError", "run expects a context value");
      const LocalContext& inner = *c.value.as_ctx();
      TXF_TRY(nav, exec_nav(e.nav, inner, gctx));
      Log log = std::move(c.log);
      append_log(log, nav.log);
      // Navigations never change the filesystem; the path-set extension of
      // an embedded traversal is discarded.
      auto out = std::make_shared<LocalContext>(std::move(nav.lctx));
      return ValueLog{Value::ctx(std::move(out)), std::move(log)};
    }

    case Expr::Kind::RunExpr: {
      TXF_TRY(c, eval_expr(*e.args[0], lctx, gctx));
      if (!c.value.is_ctx())
        return undefined("TypeError", "run expects a context value");
      const LocalContext& inner = *c.value.as_ctx();
      TXF_TRY(r, eval_expr(*e.args[1], inner, gctx));
      Log log = std::move(c.log);
      append_log(log, r.log);
      return ValueLog{std::move(r.value), std::move(log)};
    }

    case Expr::Kind::Verify: {
      auto [rp, rz] = goto_root(lctx.path, lctx.zipper);
      TXF_TRY(pc, pconsistent(*this, gctx.pathset, gctx.fs, rp, rz));
      // The value domain has no boolean pair: verify surfaces the
      // consistency flag; callers wanting totality use pconsistent.
      return ValueLog{Value::boolean(pc.consistent), std::move(pc.log)};
    }
  }
  return undefined("InternalError", "unhandled expression");
}

Result<NavOut> Engine::exec_nav(Navigation n, const LocalContext& lctx,
                                const GlobalContext& gctx) const {
  switch (n) {
    case Navigation::Down: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      const Spec& sp = *zr.current().spec;
      if (sp.kind != Spec::Kind::Path)
        return undefined("NotAPathFocus", std::string("down at ") +
                                              spec_kind_name(sp.kind));
      LocalContext ctx{zr.current().env, lctx.path, zr};
      TXF_TRY(ev, eval_expr(*sp.expr, ctx, gctx));
      TXF_TRY(u, want_string(ev.value, "down"));
      if (!Path::valid_component(u)) return undefined("BadPathComponent", u);
      auto c = gctx.fs.get(lctx.path);
      if (!c) return undefined("MissingPath", lctx.path.to_string());
      if (!c->is_dir())
        return undefined("FsKindMismatch", lctx.path.to_string() + " is a file");
      Log log = std::move(ev.log);
      log.push_back(read_entry(*c, lctx.path));
      Path child_path = lctx.path / u;
      Zipper child = zr.push_child(ZNode{zr.current().env, sp.s1});
      GlobalContext g2 = gctx;
      g2.pathset.insert(child_path);
      return NavOut{LocalContext{lctx.env, child_path, child}, std::move(g2),
                    std::move(log)};
    }

    case Navigation::Up: {
      if (!lctx.zipper.has_parent()) return undefined("UpAtRoot", "");
      Zipper parent = lctx.zipper.parent();
      if (parent.current().spec->kind != Spec::Kind::Path)
        return undefined("UpParentNotPath",
                         std::string("parent focus is ") +
                             spec_kind_name(parent.current().spec->kind));
      if (lctx.path.is_root()) return undefined("UpAtRoot", "path is root");
      return NavOut{LocalContext{lctx.env, *lctx.path.parent(), parent}, gctx,
                    Log{}};
    }

    case Navigation::IntoPair: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      const Spec& sp = *zr.current().spec;
      if (sp.kind != Spec::Kind::Pair)
        return undefined("NotAPairFocus", std::string("into_pair at ") +
                                              spec_kind_name(sp.kind));
      const Env& node_env = zr.current().env;
      auto first_ctx = std::make_shared<LocalContext>(LocalContext{
          node_env, lctx.path, Zipper::root_node(ZNode{node_env, sp.s1})});
      Env bound = node_env.bind(sp.var, Value::ctx(first_ctx));
      Zipper child = zr.push_child(ZNode{node_env, sp.s1},
                                   {ZNode{std::move(bound), sp.s2}});
      return NavOut{LocalContext{lctx.env, lctx.path, child}, gctx, Log{}};
    }

    case Navigation::IntoComp: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      const Spec& sp = *zr.current().spec;
      if (sp.kind != Spec::Kind::Comp)
        return undefined("NotACompFocus", std::string("into_comp at ") +
                                              spec_kind_name(sp.kind));
      LocalContext ctx{zr.current().env, lctx.path, zr};
      TXF_TRY(ev, eval_expr(*sp.expr, ctx, gctx));
      TXF_TRY(elems, want_elems(ev.value, "into_comp"));
      if (elems.empty()) return undefined("EmptyComprehension", "");
      const Env& node_env = zr.current().env;
      std::vector<ZNode> rest;
      for (size_t i = 1; i < elems.size(); ++i)
        rest.push_back(ZNode{node_env.bind(sp.var, Value::str(elems[i])), sp.s1});
      Zipper child = zr.push_child(
          ZNode{node_env.bind(sp.var, Value::str(elems[0])), sp.s1}, rest);
      return NavOut{LocalContext{lctx.env, lctx.path, child}, gctx,
                    std::move(ev.log)};
    }

    case Navigation::IntoOpt: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      const Spec& sp = *zr.current().spec;
      if (sp.kind != Spec::Kind::Opt)
        return undefined("NotAnOptFocus", std::string("into_opt at ") +
                                              spec_kind_name(sp.kind));
      Zipper child = zr.push_child(ZNode{zr.current().env, sp.s1});
      return NavOut{LocalContext{lctx.env, lctx.path, child}, gctx, Log{}};
    }

    case Navigation::Out: {
      if (!lctx.zipper.has_parent()) return undefined("OutAtRoot", "");
      Zipper parent = lctx.zipper.parent();
      if (parent.current().spec->kind == Spec::Kind::Path)
        return undefined("OutParentIsPath", "use up to leave a path focus");
      return NavOut{LocalContext{lctx.env, lctx.path, parent}, gctx, Log{}};
    }

    case Navigation::Next: {
      auto z2 = lctx.zipper.shift_right();
      if (!z2) return undefined("NoSibling", "next");
      return NavOut{LocalContext{lctx.env, lctx.path, *z2}, gctx, Log{}};
    }

    case Navigation::Prev: {
      auto z2 = lctx.zipper.shift_left();
      if (!z2) return undefined("NoSibling", "prev");
      return NavOut{LocalContext{lctx.env, lctx.path, *z2}, gctx, Log{}};
    }
  }
  return undefined("InternalError", "unhandled navigation");
}

Result<NavOut> Engine::exec_update(const Command& u, const LocalContext& lctx,
                                   const GlobalContext& gctx) const {
  switch (u.kind) {
    case Command::Kind::StoreFile: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::File)
        return undefined("NotAFileFocus",
                         std::string("store_file at ") +
                             spec_kind_name(zr.current().spec->kind));
      TXF_TRY(ev, eval_expr(*u.e, lctx, gctx));
      TXF_TRY(s, want_string(ev.value, "store_file"));
      TXF_TRY(made, make_file(gctx.fs, lctx.path, s));
      Log log = std::move(ev.log);
      append_log(log, made.second);
      return NavOut{lctx, GlobalContext{gctx.pathset, made.first},
                    std::move(log)};
    }

    case Command::Kind::StoreDir: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      if (zr.current().spec->kind != Spec::Kind::Dir)
        return undefined("NotADirFocus",
                         std::string("store_dir at ") +
                             spec_kind_name(zr.current().spec->kind));
      TXF_TRY(ev, eval_expr(*u.e, lctx, gctx));
      TXF_TRY(elems, want_elems(ev.value, "store_dir"));
      std::set<std::string> names(elems.begin(), elems.end());
      for (const auto& s : names)
        if (!Path::valid_component(s)) return undefined("BadPathComponent", s);
      auto [fs2, wlog] = make_dir(gctx.fs, lctx.path, names);
      Log log = std::move(ev.log);
      append_log(log, wlog);
      return NavOut{lctx, GlobalContext{gctx.pathset, fs2}, std::move(log)};
    }

    case Command::Kind::CreatePath: {
      TXF_TRY(zr, resolve_focus(lctx.zipper));
      const Spec& sp = *zr.current().spec;
      if (sp.kind != Spec::Kind::Path)
        return undefined("NotAPathFocus", std::string("create_path at ") +
                                              spec_kind_name(sp.kind));
      LocalContext ctx{zr.current().env, lctx.path, zr};
      TXF_TRY(ev, eval_expr(*sp.expr, ctx, gctx));
      TXF_TRY(u2, want_string(ev.value, "create_path"));
      if (!Path::valid_component(u2)) return undefined("BadPathComponent", u2);
      Log log = std::move(ev.log);
      log.push_back(read_entry(gctx.fs.get(lctx.path), lctx.path));
      auto [fs2, wlog] = add_node(gctx.fs, lctx.path, u2);
      append_log(log, wlog);
      return NavOut{lctx, GlobalContext{gctx.pathset, fs2}, std::move(log)};
    }

    default:
      return undefined("InternalError", "exec_update on a non-update");
  }
}

Result<NavOut> Engine::exec_forest(const Command& c, const LocalContext& lctx,
                                   const GlobalContext& gctx) const {
  if (c.kind == Command::Kind::Nav) return exec_nav(c.nav, lctx, gctx);
  return exec_update(c, lctx, gctx);
}

Result<NavOut> Engine::exec_cmd(const Command& c, const LocalContext& lctx,
                                const GlobalContext& gctx) const {
  switch (c.kind) {
    case Command::Kind::Skip:
      return NavOut{lctx, gctx, Log{}};

    case Command::Kind::Seq: {
      TXF_TRY(r1, exec_cmd(*c.c1, lctx, gctx));
      TXF_TRY(r2, exec_cmd(*c.c2, r1.lctx, r1.gctx));
      Log log = std::move(r1.log);
      append_log(log, r2.log);
      return NavOut{std::move(r2.lctx), std::move(r2.gctx), std::move(log)};
    }

    case Command::Kind::Assign: {
      TXF_TRY(ev, eval_expr(*c.e, lctx, gctx));
      LocalContext l2{lctx.env.bind(c.var, ev.value), lctx.path, lctx.zipper};
      return NavOut{std::move(l2), gctx, std::move(ev.log)};
    }

    case Command::Kind::If: {
      TXF_TRY(ev, eval_expr(*c.e, lctx, gctx));
      TXF_TRY(b, want_bool(ev.value, "if"));
      TXF_TRY(r, exec_cmd(b ? *c.c1 : *c.c2, lctx, gctx));
      Log log = std::move(ev.log);
      append_log(log, r.log);
      return NavOut{std::move(r.lctx), std::move(r.gctx), std::move(log)};
    }

    case Command::Kind::While: {
      LocalContext cur_l = lctx;
      GlobalContext cur_g = gctx;
      Log log;
      for (uint64_t i = 0; i < while_fuel_; ++i) {
        TXF_TRY(ev, eval_expr(*c.e, cur_l, cur_g));
        TXF_TRY(b, want_bool(ev.value, "while"));
        append_log(log, ev.log);
        if (!b) return NavOut{std::move(cur_l), std::move(cur_g), std::move(log)};
        TXF_TRY(r, exec_cmd(*c.c1, cur_l, cur_g));
        cur_l = std::move(r.lctx);
        cur_g = std::move(r.gctx);
        append_log(log, r.log);
      }
      return undefined("FuelExhausted",
                       "while exceeded " + std::to_string(while_fuel_) +
                           " iterations");
    }

    case Command::Kind::Nav:
    case Command::Kind::StoreFile:
    case Command::Kind::StoreDir:
    case Command::Kind::CreatePath:
      return exec_forest(c, lctx, gctx);
  }
  return undefined("InternalError", "unhandled command");
}

Result<FileStoreState> Engine::run_program(const Path& p, const SpecPtr& spec,
                                           const Command& c,
                                           const FileStoreState& fs) const {
  TXF_TRY(r, exec_cmd(c, initial_context(p, spec),
                      GlobalContext{PathSet{}, fs}));
  return r.gctx.fs;
}

Result<ValueLog> Engine::fetch_here(const LocalContext& lctx,
                                    const GlobalContext& gctx) const {
  TXF_TRY(zr, resolve_focus(lctx.zipper));
  Expr::Kind k;
  switch (zr.current().spec->kind) {
    case Spec::Kind::File: k = Expr::Kind::FetchFile; break;
    case Spec::Kind::Dir: k = Expr::Kind::FetchDir; break;
    case Spec::Kind::Path: k = Expr::Kind::FetchPath; break;
    case Spec::Kind::Comp: k = Expr::Kind::FetchComp; break;
    case Spec::Kind::Opt: k = Expr::Kind::FetchOpt; break;
    case Spec::Kind::Pred: k = Expr::Kind::FetchPred; break;
    default:
      return undefined("NoFetchForFocus",
                       spec_kind_name(zr.current().spec->kind));
  }
  LocalContext l2{lctx.env, lctx.path, zr};
  return eval_expr(*Expr::fetch(k), l2, gctx);
}

Result<NavOut> Engine::goto_label(const std::string& name,
                                  const LocalContext& lctx,
                                  const GlobalContext& gctx) const {
  LocalContext cur = lctx;
  GlobalContext g = gctx;
  Log log;
  for (;;) {
    TXF_TRY(zr, resolve_focus(cur.zipper));
    const Spec& sp = *zr.current().spec;
    cur.zipper = zr;
    if (sp.kind == Spec::Kind::Pair) {
      TXF_TRY(in, exec_nav(Navigation::IntoPair, cur, g));
      append_log(log, in.log);
      if (sp.var == name)
        return NavOut{std::move(in.lctx), std::move(in.gctx), std::move(log)};
      TXF_TRY(nx, exec_nav(Navigation::Next, in.lctx, in.gctx));
      append_log(log, nx.log);
      cur = std::move(nx.lctx);
      g = std::move(nx.gctx);
      continue;
    }
    if (sp.kind == Spec::Kind::Comp) {
      TXF_TRY(in, exec_nav(Navigation::IntoComp, cur, g));
      append_log(log, in.log);
      cur = std::move(in.lctx);
      g = std::move(in.gctx);
      for (;;) {
        const Value* bound = cur.zipper.current().env.lookup(sp.var);
        if (bound && bound->is_string() && bound->as_string() == name)
          return NavOut{std::move(cur), std::move(g), std::move(log)};
        auto nx = exec_nav(Navigation::Next, cur, g);
        if (!nx.ok()) return undefined("NameNotFound", name);
        append_log(log, nx.value().log);
        cur = nx.value().lctx;
        g = nx.value().gctx;
      }
    }
    return undefined("NameNotFound", name);
  }
}

Result<NavOut> Engine::goto_name(const std::string& name,
                                 const LocalContext& lctx,
                                 const GlobalContext& gctx) const {
  TXF_TRY(found, goto_label(name, lctx, gctx));
  TXF_TRY(zr, resolve_focus(found.lctx.zipper));
  if (zr.current().spec->kind != Spec::Kind::Path) return found;
  LocalContext l2{found.lctx.env, found.lctx.path, zr};
  TXF_TRY(down, exec_nav(Navigation::Down, l2, found.gctx));
  Log log = std::move(found.log);
  append_log(log, down.log);
  return NavOut{std::move(down.lctx), std::move(down.gctx), std::move(log)};
}

Result<Engine::VisitOut> Engine::fold_comp(const LocalContext& lctx,
                                           const GlobalContext& gctx,
                                           Value init,
                                           const CompVisitor& f) const {
  TXF_TRY(zr, resolve_focus(lctx.zipper));
  const Spec& sp = *zr.current().spec;
  if (sp.kind != Spec::Kind::Comp)
    return undefined("NotACompFocus",
                     std::string("fold_comp at ") + spec_kind_name(sp.kind));
  LocalContext ctx{zr.current().env, lctx.path, zr};
  TXF_TRY(ev, eval_expr(*sp.expr, ctx, gctx));
  TXF_TRY(elems, want_elems(ev.value, "fold_comp"));
  GlobalContext g = gctx;
  Log log = std::move(ev.log);
  Value acc = std::move(init);
  if (elems.empty()) return VisitOut{std::move(g), std::move(log), std::move(acc)};

  const Env& node_env = zr.current().env;
  std::vector<ZNode> rest;
  for (size_t i = 1; i < elems.size(); ++i)
    rest.push_back(ZNode{node_env.bind(sp.var, Value::str(elems[i])), sp.s1});
  Zipper child = zr.push_child(
      ZNode{node_env.bind(sp.var, Value::str(elems[0])), sp.s1}, rest);

  LocalContext cur{lctx.env, lctx.path, child};
  for (size_t i = 0;; ++i) {
    TXF_TRY(step, f(cur, g, acc));
    g = std::move(step.gctx);
    append_log(log, step.log);
    acc = std::move(step.acc);
    if (i + 1 == elems.size()) break;
    auto shifted = cur.zipper.shift_right();
    if (!shifted) return undefined("InternalError", "comprehension cursor lost");
    cur.zipper = *shifted;
  }
  return VisitOut{std::move(g), std::move(log), std::move(acc)};
}

Result<Engine::VisitOut> Engine::map_comp(const LocalContext& lctx,
                                          const GlobalContext& gctx,
                                          const CompVisitor& f) const {
  return fold_comp(lctx, gctx, Value::boolean(true), f);
}

const char* Value::kind_name(Kind k) {
  switch (k) {
    case Kind::String: return "string";
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::StrList: return "list";
    case Kind::StrSet: return "set";
    case Kind::Ctx: return "ctx";
  }
  return "?";
}

std::string Value::to_string() const {
  switch (kind()) {
    case Kind::String: return "\"" + as_string() + "\"";
    case Kind::Int: return std::to_string(as_int());
    case Kind::Bool: return as_bool() ? "true" : "false";
    case Kind::StrList: {
      std::string out = "[";
      for (size_t i = 0; i < as_list().size(); ++i) {
        if (i) out += ", ";
        out += "\"" + as_list()[i] + "\"";
      }
      return out + "]";
    }
    case Kind::StrSet: {
      std::string out = "{";
      bool first = true;
      for (const auto& s : as_set()) {
        if (!first) out += ", ";
        first = false;
        out += "\"" + s + "\"";
      }
      return out + "}";
    }
    case Kind::Ctx:
      return "<ctx>";
  }
  return "?";
}

}  // namespace txf
