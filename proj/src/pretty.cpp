#include "txforest/pretty.hpp"

#include <map>

namespace txf {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

// Operator precedence, matching the parser: higher binds tighter.
int call_prec(const std::string& name) {
  if (name == "or") return 1;
  if (name == "and") return 2;
  if (name == "=" || name == "!=" || name == "<" || name == "<=" ||
      name == ">" || name == ">=")
    return 3;
  if (name == "+" || name == "-") return 4;
  if (name == "*" || name == "/" || name == "%") return 5;
  return 0;  // not an infix operator
}

const char* infix_token(const std::string& name) {
  if (name == "or") return "||";
  if (name == "and") return "&&";
  return name.c_str();
}

using Rename = std::map<std::string, std::string>;

std::string pexpr(const Expr& e, int parent_prec, const Rename& rn);

std::string pexpr_primary(const Expr& e, const Rename& rn) {
  return pexpr(e, 100, rn);
}

const char* fetch_keyword(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::FetchFile: return "fetch_file";
    case Expr::Kind::FetchDir: return "fetch_dir";
    case Expr::Kind::FetchPath: return "fetch_path";
    case Expr::Kind::FetchComp: return "fetch_comp";
    case Expr::Kind::FetchOpt: return "fetch_opt";
    case Expr::Kind::FetchPred: return "fetch_pred";
    case Expr::Kind::Verify: return "verify";
    default: return nullptr;
  }
}

std::string pexpr(const Expr& e, int parent_prec, const Rename& rn) {
  switch (e.kind) {
    case Expr::Kind::Lit: {
      const Value& v = e.lit;
      switch (v.kind()) {
        case Value::Kind::String: return quote(v.as_string());
        case Value::Kind::Int: return std::to_string(v.as_int());
        case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
        case Value::Kind::StrList: {
          std::string out = "[";
          for (size_t i = 0; i < v.as_list().size(); ++i) {
            if (i) out += ", ";
            out += quote(v.as_list()[i]);
          }
          return out + "]";
        }
        case Value::Kind::StrSet: {
          std::string out = "{";
          bool first = true;
          for (const auto& s : v.as_set()) {
            if (!first) out += ", ";
            first = false;
            out += quote(s);
          }
          return out + "}";
        }
        case Value::Kind::Ctx: return "<ctx>";
      }
      return "?";
    }
    case Expr::Kind::Var: {
      auto it = rn.find(e.name);
      return it == rn.end() ? e.name : it->second;
    }
    case Expr::Kind::Call: {
      int prec = call_prec(e.name);
      if (prec > 0 && e.args.size() == 2) {
        std::string out = pexpr(*e.args[0], prec, rn);
        out += " ";
        out += infix_token(e.name);
        out += " ";
        out += pexpr(*e.args[1], prec + 1, rn);
        if (prec < parent_prec) return "(" + out + ")";
        return out;
      }
      if (e.name == "not" && e.args.size() == 1)
        return "!" + pexpr(*e.args[0], 99, rn);
      std::string out = e.name + "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += pexpr(*e.args[i], 0, rn);
      }
      return out + ")";
    }
    case Expr::Kind::RunNav: {
      std::string out = std::string("run ") + navigation_name(e.nav) + " " +
                        pexpr_primary(*e.args[0], rn);
      if (parent_prec >= 99) return "(" + out + ")";
      return out;
    }
    case Expr::Kind::RunExpr: {
      const char* kw = fetch_keyword(e.args[1]->kind);
      std::string inner = kw ? std::string(kw)
                             : "(" + pexpr(*e.args[1], 0, rn) + ")";
      std::string out = "run " + inner + " " + pexpr_primary(*e.args[0], rn);
      if (parent_prec >= 99) return "(" + out + ")";
      return out;
    }
    default: {
      const char* kw = fetch_keyword(e.kind);
      return kw ? kw : "?";
    }
  }
}

// Recognizes the compiled form of `[x :: t | x <- matches RE "r"]`:
// Pair(d, Dir, Comp(Path(var x, t), x, filter(run fetch_dir d, "r"))).
struct CompPattern {
  const Spec* body;   // t
  std::string binder;
  std::string regex;
};

bool match_regex_comp(const Spec& s, CompPattern& out) {
  if (s.kind != Spec::Kind::Pair || s.s1->kind != Spec::Kind::Dir) return false;
  const Spec& c = *s.s2;
  if (c.kind != Spec::Kind::Comp) return false;
  if (c.s1->kind != Spec::Kind::Path) return false;
  const Expr& pe = *c.s1->expr;
  if (pe.kind != Expr::Kind::Var || pe.name != c.var) return false;
  const Expr& src = *c.expr;
  if (src.kind != Expr::Kind::Call || src.name != "filter" ||
      src.args.size() != 2)
    return false;
  const Expr& run = *src.args[0];
  if (run.kind != Expr::Kind::RunExpr ||
      run.args[0]->kind != Expr::Kind::Var || run.args[0]->name != s.var ||
      run.args[1]->kind != Expr::Kind::FetchDir)
    return false;
  const Expr& re = *src.args[1];
  if (re.kind != Expr::Kind::Lit || !re.lit.is_string()) return false;
  out = CompPattern{c.s1->s1.get(), c.var, re.lit.as_string()};
  return true;
}

std::string pspec(const Spec& s, const Rename& rn);

std::string pspec_postfix_operand(const Spec& s, const Rename& rn) {
  std::string out = pspec(s, rn);
  // directory{...}, [..] and atoms need no parens under option/where.
  return out;
}

std::string pspec(const Spec& s, const Rename& rn) {
  CompPattern cp;
  if (match_regex_comp(s, cp)) {
    return "[" + cp.binder + " :: " + pspec(*cp.body, rn) + " | " + cp.binder +
           " <- matches RE " + quote(cp.regex) + "]";
  }
  switch (s.kind) {
    case Spec::Kind::File: return "file";
    case Spec::Kind::Dir: return "<dir>";  // no surface form on its own
    case Spec::Kind::Ref: return s.var;
    case Spec::Kind::Opt:
      return pspec_postfix_operand(*s.s1, rn) + " option";
    case Spec::Kind::Path: {
      if (s.expr->kind == Expr::Kind::Lit && s.expr->lit.is_string())
        return quote(s.expr->lit.as_string()) + " :: " + pspec(*s.s1, rn);
      return "<path " + pexpr(*s.expr, 0, rn) + "> :: " + pspec(*s.s1, rn);
    }
    case Spec::Kind::Comp: {
      if (s.s1->kind == Spec::Kind::Path &&
          s.s1->expr->kind == Expr::Kind::Var && s.s1->expr->name == s.var) {
        return "[" + s.var + " :: " + pspec(*s.s1->s1, rn) + " | " + s.var +
               " <- " + pexpr(*s.expr, 0, rn) + "]";
      }
      return "<comp>";
    }
    case Spec::Kind::Pred:
      return "<pred " + pexpr(*s.expr, 0, rn) + ">";  // only under a pair
    case Spec::Kind::Pair: {
      // `t where e` compiles to Pair(x, t, Pred e); print the binder as
      // `this`, which is how the parser re-binds it.
      if (s.s2->kind == Spec::Kind::Pred) {
        Rename rn2 = rn;
        rn2[s.var] = "this";
        return pspec_postfix_operand(*s.s1, rn) + " where " +
               pexpr(*s.s2->expr, 0, rn2);
      }
      // Otherwise a directory: walk the right-nested spine. The final
      // component carries no label in core form, so one is synthesized.
      std::string out = "directory { ";
      const Spec* cur = &s;
      Rename rn2 = rn;
      std::set<std::string> labels;
      for (;;) {
        CompPattern dummy;
        if (cur->kind != Spec::Kind::Pair || cur->s2->kind == Spec::Kind::Pred ||
            match_regex_comp(*cur, dummy))
          break;
        out += cur->var + " is " + pspec(*cur->s1, rn2) + "; ";
        labels.insert(cur->var);
        cur = cur->s2.get();
      }
      std::string last = "rest";
      int i = 0;
      while (labels.count(last)) last = "rest" + std::to_string(++i);
      out += last + " is " + pspec(*cur, rn2) + "; }";
      return out;
    }
  }
  return "?";
}

std::string pcmd(const Command& c) {
  switch (c.kind) {
    case Command::Kind::Skip: return "skip";
    case Command::Kind::Seq: return pcmd(*c.c1) + "; " + pcmd(*c.c2);
    case Command::Kind::Assign:
      return c.var + " := " + pexpr(*c.e, 0, {});
    case Command::Kind::If:
      return "if " + pexpr(*c.e, 0, {}) + " then " + pcmd(*c.c1) + " else " +
             pcmd(*c.c2) + " end";
    case Command::Kind::While:
      return "while " + pexpr(*c.e, 0, {}) + " do " + pcmd(*c.c1) + " end";
    case Command::Kind::Nav: return navigation_name(c.nav);
    case Command::Kind::StoreFile:
      return "store_file " + pexpr(*c.e, 99, {});
    case Command::Kind::StoreDir:
      return "store_dir " + pexpr(*c.e, 99, {});
    case Command::Kind::CreatePath: return "create_path";
  }
  return "?";
}

}  // namespace

std::string pretty(const Spec& s) { return pspec(s, {}); }
std::string pretty(const Expr& e) { return pexpr(e, 0, {}); }
std::string pretty(const Command& c) { return pcmd(c); }

}  // namespace txf
