#include "txforest/spec.hpp"

#include <algorithm>

namespace txf {

const char* navigation_name(Navigation n) {
  switch (n) {
    case Navigation::Down: return "down";
    case Navigation::Up: return "up";
    case Navigation::IntoPair: return "into_pair";
    case Navigation::IntoComp: return "into_comp";
    case Navigation::IntoOpt: return "into_opt";
    case Navigation::Out: return "out";
    case Navigation::Next: return "next";
    case Navigation::Prev: return "prev";
  }
  return "?";
}

SpecPtr Spec::file() {
  return std::make_shared<Spec>(Spec{Kind::File, nullptr, nullptr, nullptr, ""});
}
SpecPtr Spec::dir() {
  return std::make_shared<Spec>(Spec{Kind::Dir, nullptr, nullptr, nullptr, ""});
}
SpecPtr Spec::path(ExprPtr e, SpecPtr s) {
  return std::make_shared<Spec>(
      Spec{Kind::Path, std::move(e), std::move(s), nullptr, ""});
}
SpecPtr Spec::pair(std::string x, SpecPtr s1, SpecPtr s2) {
  return std::make_shared<Spec>(
      Spec{Kind::Pair, nullptr, std::move(s1), std::move(s2), std::move(x)});
}
SpecPtr Spec::comp(SpecPtr s, std::string x, ExprPtr e) {
  return std::make_shared<Spec>(
      Spec{Kind::Comp, std::move(e), std::move(s), nullptr, std::move(x)});
}
SpecPtr Spec::opt(SpecPtr s) {
  return std::make_shared<Spec>(
      Spec{Kind::Opt, nullptr, std::move(s), nullptr, ""});
}
SpecPtr Spec::pred(ExprPtr e) {
  return std::make_shared<Spec>(
      Spec{Kind::Pred, std::move(e), nullptr, nullptr, ""});
}
SpecPtr Spec::ref(std::string name) {
  return std::make_shared<Spec>(
      Spec{Kind::Ref, nullptr, nullptr, nullptr, std::move(name)});
}

ExprPtr Expr::lit_v(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Lit;
  e->lit = std::move(v);
  return e;
}
ExprPtr Expr::str(std::string s) { return lit_v(Value::str(std::move(s))); }
ExprPtr Expr::integer(int64_t i) { return lit_v(Value::integer(i)); }
ExprPtr Expr::boolean(bool b) { return lit_v(Value::boolean(b)); }
ExprPtr Expr::var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  return e;
}
ExprPtr Expr::call(std::string name, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Call;
  e->name = std::move(name);
  e->args = std::move(args);
  return e;
}
ExprPtr Expr::fetch(Kind fetch_kind) {
  auto e = std::make_shared<Expr>();
  e->kind = fetch_kind;
  return e;
}
ExprPtr Expr::run_nav(ExprPtr ctx, Navigation n) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::RunNav;
  e->args = {std::move(ctx)};
  e->nav = n;
  return e;
}
ExprPtr Expr::run_expr(ExprPtr ctx, ExprPtr fexp) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::RunExpr;
  e->args = {std::move(ctx), std::move(fexp)};
  return e;
}
ExprPtr Expr::verify() {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Verify;
  return e;
}

CmdPtr Command::skip() {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Skip;
  return c;
}
CmdPtr Command::seq(CmdPtr a, CmdPtr b) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Seq;
  c->c1 = std::move(a);
  c->c2 = std::move(b);
  return c;
}
CmdPtr Command::assign(std::string x, ExprPtr e) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Assign;
  c->var = std::move(x);
  c->e = std::move(e);
  return c;
}
CmdPtr Command::if_(ExprPtr b, CmdPtr then_c, CmdPtr else_c) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::If;
  c->e = std::move(b);
  c->c1 = std::move(then_c);
  c->c2 = std::move(else_c);
  return c;
}
CmdPtr Command::while_(ExprPtr b, CmdPtr body) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::While;
  c->e = std::move(b);
  c->c1 = std::move(body);
  return c;
}
CmdPtr Command::navigate(Navigation n) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Nav;
  c->nav = n;
  return c;
}
CmdPtr Command::store_file(ExprPtr e) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::StoreFile;
  c->e = std::move(e);
  return c;
}
CmdPtr Command::store_dir(ExprPtr e) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::StoreDir;
  c->e = std::move(e);
  return c;
}
CmdPtr Command::create_path() {
  auto c = std::make_shared<Command>();
  c->kind = Kind::CreatePath;
  return c;
}

CmdPtr seq_all(const std::vector<CmdPtr>& cmds) {
  if (cmds.empty()) return Command::skip();
  CmdPtr out = cmds.back();
  for (size_t i = cmds.size() - 1; i-- > 0;)
    out = Command::seq(cmds[i], out);
  return out;
}

namespace {

void expr_free_vars(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
      out.insert(e.name);
      break;
    case Expr::Kind::Lit:
    case Expr::Kind::FetchFile:
    case Expr::Kind::FetchDir:
    case Expr::Kind::FetchPath:
    case Expr::Kind::FetchComp:
    case Expr::Kind::FetchOpt:
    case Expr::Kind::FetchPred:
    case Expr::Kind::Verify:
      break;
    case Expr::Kind::Call:
    case Expr::Kind::RunNav:
    case Expr::Kind::RunExpr:
      for (const auto& a : e.args) expr_free_vars(*a, out);
      break;
  }
}

void spec_free_vars(const Spec& s, std::set<std::string>& out) {
  switch (s.kind) {
    case Spec::Kind::File:
    case Spec::Kind::Dir:
    case Spec::Kind::Ref:
      break;
    case Spec::Kind::Path:
      expr_free_vars(*s.expr, out);
      spec_free_vars(*s.s1, out);
      break;
    case Spec::Kind::Pair: {
      spec_free_vars(*s.s1, out);
      std::set<std::string> snd;
      spec_free_vars(*s.s2, snd);
      snd.erase(s.var);
      out.insert(snd.begin(), snd.end());
      break;
    }
    case Spec::Kind::Comp: {
      expr_free_vars(*s.expr, out);
      std::set<std::string> body;
      spec_free_vars(*s.s1, body);
      body.erase(s.var);
      out.insert(body.begin(), body.end());
      break;
    }
    case Spec::Kind::Opt:
      spec_free_vars(*s.s1, out);
      break;
    case Spec::Kind::Pred:
      expr_free_vars(*s.expr, out);
      break;
  }
}

// Binder renaming map used while comparing: names bound on the left map to
// their counterpart on the right.
struct AlphaEnv {
  std::vector<std::pair<std::string, std::string>> pairs;

  bool same_var(const std::string& a, const std::string& b) const {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      if (it->first == a) return it->second == b;
      if (it->second == b) return false;  // b bound to some other name
    }
    return a == b;  // both free
  }
};

bool alpha_eq_expr(const Expr& a, const Expr& b, const AlphaEnv& env) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Lit:
      return a.lit == b.lit;
    case Expr::Kind::Var:
      return env.same_var(a.name, b.name);
    case Expr::Kind::Call:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (!alpha_eq_expr(*a.args[i], *b.args[i], env)) return false;
      return true;
    case Expr::Kind::RunNav:
      return a.nav == b.nav && alpha_eq_expr(*a.args[0], *b.args[0], env);
    case Expr::Kind::RunExpr:
      return alpha_eq_expr(*a.args[0], *b.args[0], env) &&
             alpha_eq_expr(*a.args[1], *b.args[1], env);
    default:
      return true;  // nullary forest expressions
  }
}

bool alpha_eq_spec(const Spec& a, const Spec& b, AlphaEnv& env) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Spec::Kind::File:
    case Spec::Kind::Dir:
      return true;
    case Spec::Kind::Ref:
      return a.var == b.var;
    case Spec::Kind::Path:
      return alpha_eq_expr(*a.expr, *b.expr, env) &&
             alpha_eq_spec(*a.s1, *b.s1, env);
    case Spec::Kind::Pair: {
      if (!alpha_eq_spec(*a.s1, *b.s1, env)) return false;
      env.pairs.emplace_back(a.var, b.var);
      bool ok = alpha_eq_spec(*a.s2, *b.s2, env);
      env.pairs.pop_back();
      return ok;
    }
    case Spec::Kind::Comp: {
      if (!alpha_eq_expr(*a.expr, *b.expr, env)) return false;
      env.pairs.emplace_back(a.var, b.var);
      bool ok = alpha_eq_spec(*a.s1, *b.s1, env);
      env.pairs.pop_back();
      return ok;
    }
    case Spec::Kind::Opt:
      return alpha_eq_spec(*a.s1, *b.s1, env);
    case Spec::Kind::Pred:
      return alpha_eq_expr(*a.expr, *b.expr, env);
  }
  return false;
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  expr_free_vars(e, out);
  return out;
}

std::set<std::string> free_vars(const Spec& s) {
  std::set<std::string> out;
  spec_free_vars(s, out);
  return out;
}

bool alpha_eq(const Spec& a, const Spec& b) {
  AlphaEnv env;
  return alpha_eq_spec(a, b, env);
}

bool expr_eq(const Expr& a, const Expr& b) {
  AlphaEnv env;
  return alpha_eq_expr(a, b, env);
}

size_t spec_size(const Spec& s) {
  size_t n = 1;
  if (s.s1) n += spec_size(*s.s1);
  if (s.s2) n += spec_size(*s.s2);
  return n;
}

}  // namespace txf
