#include "txforest/surface.hpp"

#include <cctype>
#include <functional>
#include <optional>
#include <map>
#include <set>

namespace txf {

namespace {

struct Token {
  enum class Kind { Ident, Int, String, Sym, End };
  Kind kind;
  std::string text;
  int64_t ival = 0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token tok;
  std::optional<Undefined> err;

  explicit Lexer(const std::string& s) : src(s) { advance(); }

  Undefined error_at(int l, int c, const std::string& msg) {
    return undefined("SyntaxError",
                     std::to_string(l) + ":" + std::to_string(c) + ": " + msg);
  }

  void bump(char ch) {
    if (ch == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
      } else if (isspace((unsigned char)c)) {
        bump(c);
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_ws();
    tok.line = line;
    tok.col = col;
    if (pos >= src.size()) {
      tok.kind = Token::Kind::End;
      tok.text.clear();
      return;
    }
    char c = src[pos];
    if (isalpha((unsigned char)c) || c == '_') {
      std::string id;
      while (pos < src.size() &&
             (isalnum((unsigned char)src[pos]) || src[pos] == '_')) {
        id += src[pos];
        bump(src[pos]);
      }
      tok.kind = Token::Kind::Ident;
      tok.text = std::move(id);
      return;
    }
    if (isdigit((unsigned char)c)) {
      std::string num;
      while (pos < src.size() && isdigit((unsigned char)src[pos])) {
        num += src[pos];
        bump(src[pos]);
      }
      tok.kind = Token::Kind::Int;
      tok.text = num;
      tok.ival = std::stoll(num);
      return;
    }
    if (c == '"') {
      int sl = line, sc = col;
      bump(c);
      std::string s;
      while (pos < src.size() && src[pos] != '"') {
        char d = src[pos];
        if (d == '\\') {
          bump(d);
          if (pos >= src.size()) break;
          char e = src[pos];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '"': s += '"'; break;
            case '\\': s += '\\'; break;
            default: s += e;
          }
          bump(e);
        } else {
          s += d;
          bump(d);
        }
      }
      if (pos >= src.size()) {
        err = error_at(sl, sc, "unterminated string literal");
        tok.kind = Token::Kind::End;
        return;
      }
      bump('"');
      tok.kind = Token::Kind::String;
      tok.text = std::move(s);
      return;
    }
    // Multi-character symbols first.
    static const char* two[] = {"::", ":=", "<-", "<=", ">=", "!=", "&&", "||"};
    for (const char* t : two) {
      if (src.compare(pos, 2, t) == 0) {
        tok.kind = Token::Kind::Sym;
        tok.text = t;
        bump(src[pos]);
        bump(src[pos]);
        return;
      }
    }
    tok.kind = Token::Kind::Sym;
    tok.text = std::string(1, c);
    bump(c);
  }

  bool is_sym(const char* s) const {
    return tok.kind == Token::Kind::Sym && tok.text == s;
  }
  bool is_ident(const char* s) const {
    return tok.kind == Token::Kind::Ident && tok.text == s;
  }
};

struct Parser {
  Lexer lx;

  explicit Parser(const std::string& text) : lx(text) {}

  Undefined error(const std::string& msg) {
    if (lx.err) return *lx.err;
    return lx.error_at(lx.tok.line, lx.tok.col,
                       msg + " (got \"" + lx.tok.text + "\")");
  }

  Result<bool> expect_sym(const char* s) {
    if (!lx.is_sym(s)) return error(std::string("expected \"") + s + "\"");
    lx.advance();
    return true;
  }

  Result<std::string> expect_ident() {
    if (lx.tok.kind != Token::Kind::Ident) return error("expected identifier");
    std::string name = lx.tok.text;
    lx.advance();
    return name;
  }

  // ---- expressions -------------------------------------------------------

  static const std::set<std::string>& keywords() {
    static const std::set<std::string> kws = {
        "file",       "directory", "is",        "option",    "where",
        "matches",    "RE",        "skip",      "if",        "then",
        "else",       "end",       "while",     "do",        "true",
        "false",      "down",      "up",        "into_pair", "into_comp",
        "into_opt",   "out",       "next",      "prev",      "store_file",
        "store_dir",  "create_path", "fetch_file", "fetch_dir", "fetch_path",
        "fetch_comp", "fetch_opt", "fetch_pred", "verify",    "run"};
    return kws;
  }

  static std::optional<Expr::Kind> fetch_kind(const std::string& id) {
    if (id == "fetch_file") return Expr::Kind::FetchFile;
    if (id == "fetch_dir") return Expr::Kind::FetchDir;
    if (id == "fetch_path") return Expr::Kind::FetchPath;
    if (id == "fetch_comp") return Expr::Kind::FetchComp;
    if (id == "fetch_opt") return Expr::Kind::FetchOpt;
    if (id == "fetch_pred") return Expr::Kind::FetchPred;
    return std::nullopt;
  }

  static std::optional<Navigation> nav_kind(const std::string& id) {
    if (id == "down") return Navigation::Down;
    if (id == "up") return Navigation::Up;
    if (id == "into_pair") return Navigation::IntoPair;
    if (id == "into_comp") return Navigation::IntoComp;
    if (id == "into_opt") return Navigation::IntoOpt;
    if (id == "out") return Navigation::Out;
    if (id == "next") return Navigation::Next;
    if (id == "prev") return Navigation::Prev;
    return std::nullopt;
  }

  Result<ExprPtr> parse_expr() { return parse_or(); }

  Result<ExprPtr> parse_or() {
    TXF_TRY(lhs, parse_and());
    while (lx.is_sym("||")) {
      lx.advance();
      TXF_TRY(rhs, parse_and());
      lhs = Expr::call("or", {lhs, rhs});
    }
    return lhs;
  }

  Result<ExprPtr> parse_and() {
    TXF_TRY(lhs, parse_cmp());
    while (lx.is_sym("&&")) {
      lx.advance();
      TXF_TRY(rhs, parse_cmp());
      lhs = Expr::call("and", {lhs, rhs});
    }
    return lhs;
  }

  Result<ExprPtr> parse_cmp() {
    TXF_TRY(lhs, parse_add());
    static const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
    for (const char* op : ops) {
      if (lx.is_sym(op)) {
        lx.advance();
        TXF_TRY(rhs, parse_add());
        return Expr::call(op, {lhs, rhs});
      }
    }
    return lhs;
  }

  Result<ExprPtr> parse_add() {
    TXF_TRY(lhs, parse_mul());
    while (lx.is_sym("+") || lx.is_sym("-")) {
      std::string op = lx.tok.text;
      lx.advance();
      TXF_TRY(rhs, parse_mul());
      lhs = Expr::call(op, {lhs, rhs});
    }
    return lhs;
  }

  Result<ExprPtr> parse_mul() {
    TXF_TRY(lhs, parse_unary());
    while (lx.is_sym("*") || lx.is_sym("/") || lx.is_sym("%")) {
      std::string op = lx.tok.text;
      lx.advance();
      TXF_TRY(rhs, parse_unary());
      lhs = Expr::call(op, {lhs, rhs});
    }
    return lhs;
  }

  Result<ExprPtr> parse_unary() {
    if (lx.is_sym("!")) {
      lx.advance();
      TXF_TRY(inner, parse_unary());
      return Expr::call("not", {inner});
    }
    return parse_primary();
  }

  Result<ExprPtr> parse_primary() {
    const Token& t = lx.tok;
    if (t.kind == Token::Kind::Int) {
      int64_t v = t.ival;
      lx.advance();
      return Expr::integer(v);
    }
    if (t.kind == Token::Kind::String) {
      std::string s = t.text;
      lx.advance();
      return Expr::str(std::move(s));
    }
    if (lx.is_sym("(")) {
      lx.advance();
      TXF_TRY(e, parse_expr());
      TXF_TRY(close, expect_sym(")"));
      (void)close;
      return e;
    }
    if (lx.is_sym("[") || lx.is_sym("{")) {
      bool is_set = lx.is_sym("{");
      const char* close = is_set ? "}" : "]";
      lx.advance();
      std::vector<std::string> elems;
      if (!lx.is_sym(close)) {
        for (;;) {
          if (lx.tok.kind != Token::Kind::String)
            return error("expected string literal in collection");
          elems.push_back(lx.tok.text);
          lx.advance();
          if (lx.is_sym(",")) {
            lx.advance();
            continue;
          }
          break;
        }
      }
      TXF_TRY(c2, expect_sym(close));
      (void)c2;
      if (is_set)
        return Expr::lit_v(Value::set(
            std::set<std::string>(elems.begin(), elems.end())));
      return Expr::lit_v(Value::list(std::move(elems)));
    }
    if (t.kind == Token::Kind::Ident) {
      std::string id = t.text;
      if (id == "true" || id == "false") {
        lx.advance();
        return Expr::boolean(id == "true");
      }
      if (id == "verify") {
        lx.advance();
        return Expr::verify();
      }
      if (auto fk = fetch_kind(id)) {
        lx.advance();
        return Expr::fetch(*fk);
      }
      if (id == "run") {
        lx.advance();
        if (lx.tok.kind != Token::Kind::Ident)
          return error("expected a fetch or navigation after run");
        std::string what = lx.tok.text;
        if (auto fk = fetch_kind(what)) {
          lx.advance();
          TXF_TRY(ctx, parse_primary());
          return Expr::run_expr(ctx, Expr::fetch(*fk));
        }
        if (what == "verify") {
          lx.advance();
          TXF_TRY(ctx, parse_primary());
          return Expr::run_expr(ctx, Expr::verify());
        }
        if (auto nk = nav_kind(what)) {
          lx.advance();
          TXF_TRY(ctx, parse_primary());
          return Expr::run_nav(ctx, *nk);
        }
        return error("expected a fetch or navigation after run");
      }
      lx.advance();
      if (lx.is_sym("(")) {
        lx.advance();
        std::vector<ExprPtr> args;
        if (!lx.is_sym(")")) {
          for (;;) {
            TXF_TRY(a, parse_expr());
            args.push_back(a);
            if (lx.is_sym(",")) {
              lx.advance();
              continue;
            }
            break;
          }
        }
        TXF_TRY(c3, expect_sym(")"));
        (void)c3;
        return Expr::call(id, std::move(args));
      }
      if (keywords().count(id))
        return lx.error_at(t.line, t.col, "keyword \"" + id +
                                              "\" is not an expression");
      return Expr::var(id);
    }
    return error("expected expression");
  }

  // ---- commands ----------------------------------------------------------

  Result<CmdPtr> parse_commands(const std::set<std::string>& stop) {
    std::vector<CmdPtr> cmds;
    for (;;) {
      if (lx.tok.kind == Token::Kind::End) break;
      if (lx.tok.kind == Token::Kind::Ident && stop.count(lx.tok.text)) break;
      TXF_TRY(c, parse_command_one());
      cmds.push_back(c);
      if (lx.is_sym(";")) {
        lx.advance();
        continue;
      }
      break;
    }
    return seq_all(cmds);
  }

  Result<CmdPtr> parse_command_one() {
    const Token& t = lx.tok;
    if (t.kind != Token::Kind::Ident) return error("expected command");
    std::string id = t.text;
    if (id == "skip") {
      lx.advance();
      return Command::skip();
    }
    if (auto nk = nav_kind(id)) {
      lx.advance();
      return Command::navigate(*nk);
    }
    if (id == "store_file" || id == "store_dir") {
      lx.advance();
      TXF_TRY(e, parse_expr());
      return id == "store_file" ? Command::store_file(e)
                                : Command::store_dir(e);
    }
    if (id == "create_path") {
      lx.advance();
      return Command::create_path();
    }
    if (id == "if") {
      lx.advance();
      TXF_TRY(b, parse_expr());
      if (!lx.is_ident("then")) return error("expected then");
      lx.advance();
      TXF_TRY(then_c, parse_commands({"else", "end"}));
      if (!lx.is_ident("else")) return error("expected else");
      lx.advance();
      TXF_TRY(else_c, parse_commands({"end"}));
      if (!lx.is_ident("end")) return error("expected end");
      lx.advance();
      return Command::if_(b, then_c, else_c);
    }
    if (id == "while") {
      lx.advance();
      TXF_TRY(b, parse_expr());
      if (!lx.is_ident("do")) return error("expected do");
      lx.advance();
      TXF_TRY(body, parse_commands({"end"}));
      if (!lx.is_ident("end")) return error("expected end");
      lx.advance();
      return Command::while_(b, body);
    }
    if (keywords().count(id)) return error("unexpected keyword " + id);
    // assignment
    lx.advance();
    TXF_TRY(asn, expect_sym(":="));
    (void)asn;
    TXF_TRY(e, parse_expr());
    return Command::assign(id, e);
  }

  // ---- surface specs -----------------------------------------------------

  Result<SurfacePtr> parse_spec() {
    TXF_TRY(base, parse_spec_primary());
    for (;;) {
      if (lx.is_ident("option")) {
        auto node = std::make_shared<SurfaceSpec>();
        node->kind = SurfaceSpec::Kind::Opt;
        node->line = lx.tok.line;
        node->col = lx.tok.col;
        lx.advance();
        node->child = base;
        base = node;
        continue;
      }
      if (lx.is_ident("where")) {
        auto node = std::make_shared<SurfaceSpec>();
        node->kind = SurfaceSpec::Kind::Where;
        node->line = lx.tok.line;
        node->col = lx.tok.col;
        lx.advance();
        TXF_TRY(e, parse_expr());
        node->child = base;
        node->expr = e;
        base = node;
        continue;
      }
      break;
    }
    return base;
  }

  Result<SurfacePtr> parse_spec_primary() {
    auto node = std::make_shared<SurfaceSpec>();
    node->line = lx.tok.line;
    node->col = lx.tok.col;

    if (lx.tok.kind == Token::Kind::String) {
      node->kind = SurfaceSpec::Kind::PathLit;
      node->lit = lx.tok.text;
      lx.advance();
      TXF_TRY(cc, expect_sym("::"));
      (void)cc;
      TXF_TRY(child, parse_spec());
      node->child = child;
      return SurfacePtr(node);
    }
    if (lx.is_sym("(")) {
      lx.advance();
      TXF_TRY(inner, parse_spec());
      TXF_TRY(cp, expect_sym(")"));
      (void)cp;
      return inner;
    }
    if (lx.is_sym("[")) {
      lx.advance();
      node->kind = SurfaceSpec::Kind::Comp;
      TXF_TRY(binder, expect_ident());
      node->name = binder;
      TXF_TRY(cc, expect_sym("::"));
      (void)cc;
      TXF_TRY(child, parse_spec());
      node->child = child;
      TXF_TRY(bar, expect_sym("|"));
      (void)bar;
      TXF_TRY(binder2, expect_ident());
      if (binder2 != binder)
        return lx.error_at(node->line, node->col,
                           "comprehension binders disagree: " + binder +
                               " vs " + binder2);
      TXF_TRY(arrow, expect_sym("<-"));
      (void)arrow;
      if (lx.is_ident("matches")) {
        lx.advance();
        if (!lx.is_ident("RE")) return error("expected RE after matches");
        lx.advance();
        if (lx.tok.kind != Token::Kind::String)
          return error("expected regex string");
        node->comp_is_matches = true;
        node->comp_regex = lx.tok.text;
        lx.advance();
      } else {
        TXF_TRY(e, parse_expr());
        node->expr = e;
      }
      TXF_TRY(cb, expect_sym("]"));
      (void)cb;
      return SurfacePtr(node);
    }
    if (lx.tok.kind == Token::Kind::Ident) {
      std::string id = lx.tok.text;
      if (id == "file") {
        lx.advance();
        node->kind = SurfaceSpec::Kind::File;
        return SurfacePtr(node);
      }
      if (id == "directory") {
        lx.advance();
        TXF_TRY(ob, expect_sym("{"));
        (void)ob;
        node->kind = SurfaceSpec::Kind::Directory;
        if (lx.is_sym("}"))
          return lx.error_at(node->line, node->col, "empty directory body");
        for (;;) {
          TXF_TRY(label, expect_ident());
          if (!lx.is_ident("is")) return error("expected is");
          lx.advance();
          TXF_TRY(sub, parse_spec());
          node->entries.emplace_back(label, sub);
          if (lx.is_sym(";")) {
            lx.advance();
            if (lx.is_sym("}")) break;
            continue;
          }
          break;
        }
        TXF_TRY(cb, expect_sym("}"));
        (void)cb;
        return SurfacePtr(node);
      }
      if (id == "this" || keywords().count(id))
        return error("\"" + id + "\" cannot start a specification");
      lx.advance();
      node->kind = SurfaceSpec::Kind::Named;
      node->name = id;
      return SurfacePtr(node);
    }
    return error("expected specification");
  }

  Result<std::vector<SurfaceDecl>> parse_decls_all() {
    std::vector<SurfaceDecl> decls;
    std::set<std::string> seen;
    while (lx.tok.kind != Token::Kind::End) {
      SurfaceDecl d;
      d.line = lx.tok.line;
      d.col = lx.tok.col;
      TXF_TRY(name, expect_ident());
      if (keywords().count(name) || name == "this")
        return lx.error_at(d.line, d.col,
                           "reserved word used as declaration name: " + name);
      if (!seen.insert(name).second)
        return lx.error_at(d.line, d.col, "duplicate declaration: " + name);
      d.name = name;
      TXF_TRY(eq, expect_sym("="));
      (void)eq;
      TXF_TRY(body, parse_spec());
      d.body = body;
      decls.push_back(std::move(d));
    }
    return decls;
  }
};

// ---- compilation ---------------------------------------------------------

struct CompileCtx {
  const std::set<std::string>* decl_names;
  std::set<std::string>* used;  // every identifier in play, for fresh names
  int fresh_counter = 0;

  std::string fresh(const std::string& base) {
    std::string name = base;
    while (used->count(name))
      name = base + "_" + std::to_string(++fresh_counter);
    used->insert(name);
    return name;
  }
};

Undefined error_at(int line, int col, const std::string& msg) {
  return undefined("CompileError", std::to_string(line) + ":" +
                                       std::to_string(col) + ": " + msg);
}

Result<SpecPtr> compile_spec(const SurfaceSpec& s, CompileCtx& ctx) {
  switch (s.kind) {
    case SurfaceSpec::Kind::File:
      return Spec::file();

    case SurfaceSpec::Kind::Named:
      if (!ctx.decl_names->count(s.name))
        return error_at(s.line, s.col, "unbound declaration name: " + s.name);
      return Spec::ref(s.name);

    case SurfaceSpec::Kind::PathLit: {
      TXF_TRY(child, compile_spec(*s.child, ctx));
      return Spec::path(Expr::str(s.lit), child);
    }

    case SurfaceSpec::Kind::Directory: {
      // directory {l1 is t1; ...; ln is tn} becomes right-nested pairs
      // Pair(l1, t1', Pair(l2, t2', ... tn')); the last label vanishes, as
      // nothing can scope over it.
      TXF_TRY(acc0, compile_spec(*s.entries.back().second, ctx));
      SpecPtr acc = acc0;
      for (size_t i = s.entries.size() - 1; i-- > 0;) {
        TXF_TRY(sub, compile_spec(*s.entries[i].second, ctx));
        acc = Spec::pair(s.entries[i].first, sub, acc);
      }
      return acc;
    }

    case SurfaceSpec::Kind::Comp: {
      TXF_TRY(body, compile_spec(*s.child, ctx));
      SpecPtr path_body = Spec::path(Expr::var(s.name), body);
      if (s.comp_is_matches) {
        std::string d = ctx.fresh("dir");
        ExprPtr source = Expr::call(
            "filter", {Expr::run_expr(Expr::var(d),
                                      Expr::fetch(Expr::Kind::FetchDir)),
                       Expr::str(s.comp_regex)});
        return Spec::pair(d, Spec::dir(),
                          Spec::comp(path_body, s.name, source));
      }
      return Spec::comp(path_body, s.name, s.expr);
    }

    case SurfaceSpec::Kind::Opt: {
      TXF_TRY(child, compile_spec(*s.child, ctx));
      return Spec::opt(child);
    }

    case SurfaceSpec::Kind::Where: {
      TXF_TRY(child, compile_spec(*s.child, ctx));
      // The checked component is bound as `this` for the predicate.
      return Spec::pair("this", child, Spec::pred(s.expr));
    }
  }
  return undefined("InternalError", "unhandled surface kind");
}

// Refs reachable without crossing a Path constructor; recursion through
// such a ref would unfold forever at a single path.
void unguarded_refs(const Spec& s, std::set<std::string>& out) {
  switch (s.kind) {
    case Spec::Kind::Ref:
      out.insert(s.var);
      break;
    case Spec::Kind::Path:
      break;  // guarded: descending consumes a filesystem step
    case Spec::Kind::Pair:
      unguarded_refs(*s.s1, out);
      unguarded_refs(*s.s2, out);
      break;
    case Spec::Kind::Comp:
    case Spec::Kind::Opt:
      unguarded_refs(*s.s1, out);
      break;
    default:
      break;
  }
}

}  // namespace

Result<std::vector<SurfaceDecl>> parse_decls(const std::string& text) {
  Parser p(text);
  return p.parse_decls_all();
}

Result<SpecTable> compile(const std::vector<SurfaceDecl>& decls) {
  std::set<std::string> names;
  for (const auto& d : decls) names.insert(d.name);

  // All identifiers already in use, so fresh binders never collide.
  std::set<std::string> used = names;
  std::function<void(const SurfaceSpec&)> scan = [&](const SurfaceSpec& s) {
    if (!s.name.empty()) used.insert(s.name);
    for (const auto& [l, sub] : s.entries) {
      used.insert(l);
      scan(*sub);
    }
    if (s.child) scan(*s.child);
  };
  for (const auto& d : decls) scan(*d.body);

  CompileCtx ctx{&names, &used};
  SpecTable table;
  for (const auto& d : decls) {
    TXF_TRY(core, compile_spec(*d.body, ctx));
    auto fv = free_vars(*core);
    if (!fv.empty())
      return error_at(d.line, d.col,
                      "unbound variable in declaration " + d.name + ": " +
                          *fv.begin());
    table.emplace(d.name, core);
  }

  // Reject recursion that never crosses a path step.
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& [name, spec] : table) unguarded_refs(*spec, edges[name]);
  for (const auto& d : decls) {
    std::set<std::string> reached;
    std::vector<std::string> stack(edges[d.name].begin(), edges[d.name].end());
    while (!stack.empty()) {
      std::string n = stack.back();
      stack.pop_back();
      if (n == d.name)
        return error_at(d.line, d.col,
                        "recursion through a non-path position in " + d.name);
      if (!reached.insert(n).second) continue;
      for (const auto& m : edges[n]) stack.push_back(m);
    }
  }
  return table;
}

Result<SpecTable> compile_text(const std::string& text) {
  TXF_TRY(decls, parse_decls(text));
  return compile(decls);
}

Result<ExprPtr> parse_expr_text(const std::string& text) {
  Parser p(text);
  TXF_TRY(e, p.parse_expr());
  if (p.lx.tok.kind != Token::Kind::End)
    return p.error("trailing input after expression");
  return e;
}

Result<CmdPtr> parse_command_text(const std::string& text) {
  Parser p(text);
  TXF_TRY(c, p.parse_commands({}));
  if (p.lx.tok.kind != Token::Kind::End)
    return p.error("trailing input after command");
  return c;
}

}  // namespace txf
